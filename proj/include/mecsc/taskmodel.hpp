#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "mecsc/config.hpp"
#include "mecsc/errors.hpp"
#include "mecsc/random.hpp"
#include "mecsc/scenario.hpp"

namespace mecsc {

struct UserTask {
    std::size_t task_index = 0;
    double raw_volume = 0.0;  // data-units
};

/// Uniform task type and uniform raw volume per user, seeded from cfg.rng_seed.
inline std::vector<UserTask> generate_tasks(const SystemConfig& cfg, const TaskCatalog& catalog) {
    Rng rng(cfg.rng_seed, Rng::Stream::tasks);
    std::vector<UserTask> out(cfg.num_users);
    for (auto& t : out) {
        t.task_index = static_cast<std::size_t>(rng.index(catalog.size()));
        t.raw_volume = rng.uniform(cfg.volume_min, cfg.volume_max);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Delay chain and accuracy
// ---------------------------------------------------------------------------

inline double overhead_cycles(double volume, const SystemConfig& cfg) {
    return cfg.overhead_slope * volume + cfg.overhead_intercept;
}

inline double local_delay(double volume, const SystemConfig& cfg) {
    return overhead_cycles(volume, cfg) / cfg.local_capacity;
}

inline double compressed_volume(double raw_volume, double ratio) {
    if (!(ratio >= 1.0)) throw ConstraintViolation("compression ratio must be >= 1");
    return raw_volume / ratio;
}

inline double comm_delay(double compressed, double rate, const SystemConfig& cfg) {
    return compressed * cfg.bits_per_unit / rate;
}

inline double offload_comp_delay(double compressed, double capacity, const SystemConfig& cfg) {
    if (!(capacity > 0.0)) throw DomainError("offloaded user needs a positive MEC capacity");
    return overhead_cycles(compressed, cfg) / capacity;
}

inline double accuracy(double effective_volume, const FitParams& fit) {
    if (!(effective_volume > 0.0)) throw DomainError("effective volume must be > 0");
    return fit.p - fit.q * std::pow(effective_volume, -fit.r);
}

/// Smallest effective volume reaching `target` percent.
inline double volume_for_accuracy(double target, const FitParams& fit) {
    if (!(target < fit.p)) return std::numeric_limits<double>::infinity();
    if (target <= 0.0) return 0.0;
    if (fit.r == 0.0) return fit.p - fit.q >= target ? 0.0 : std::numeric_limits<double>::infinity();
    return std::pow(fit.q / (fit.p - target), 1.0 / fit.r);
}

// ---------------------------------------------------------------------------
// Problem instance
// ---------------------------------------------------------------------------

/// Per-user constants that do not depend on the decision.
struct UserContext {
    std::size_t sbs = 0;
    double volume = 0.0;       // a
    double rate = 0.0;         // bits/s
    double local_delay = 0.0;  // T^L
    double delay_limit = 0.0;
    double accuracy_limit = 0.0;
};

struct Problem {
    SystemConfig cfg;
    FitParams fit;
    TaskCatalog catalog;
    Scenario scenario;
    std::vector<UserTask> tasks;
    std::vector<UserContext> users;

    std::size_t num_users() const { return users.size(); }
    std::size_t num_sbs() const { return scenario.num_sbs(); }
};

inline Problem make_problem(const SystemConfig& cfg, const FitParams& fit, const TaskCatalog& catalog,
                            Scenario scenario, std::vector<UserTask> tasks) {
    validate(cfg);
    validate(fit);
    validate(catalog, fit);
    if (tasks.size() != scenario.num_users())
        throw DomainError("task list and scenario disagree on the number of users");
    Problem p{cfg, fit, catalog, std::move(scenario), std::move(tasks), {}};
    p.users.reserve(p.tasks.size());
    for (std::size_t u = 0; u < p.tasks.size(); ++u) {
        const UserTask& t = p.tasks[u];
        if (t.task_index >= catalog.size()) throw DomainError("task index out of range");
        if (!(t.raw_volume > 0.0)) throw DomainError("raw volume must be > 0");
        const TaskType& type = catalog[t.task_index];
        p.users.push_back({p.scenario.association[u], t.raw_volume, p.scenario.rates[u],
                           local_delay(t.raw_volume, cfg), type.delay_limit, type.accuracy_limit});
    }
    return p;
}

/// Scenario and tasks drawn from cfg.rng_seed.
inline Problem generate_problem(const SystemConfig& cfg, const FitParams& fit = {},
                                const TaskCatalog& catalog = default_catalog()) {
    return make_problem(cfg, fit, catalog, generate_scenario(cfg), generate_tasks(cfg, catalog));
}

// ---------------------------------------------------------------------------
// Decisions
// ---------------------------------------------------------------------------

struct Decision {
    std::vector<int> offload;      // x
    std::vector<double> ratio;     // epsilon >= 1
    std::vector<double> capacity;  // f^O, cycles/s

    static Decision all_local(std::size_t n) {
        return {std::vector<int>(n, 0), std::vector<double>(n, 1.0), std::vector<double>(n, 0.0)};
    }
    std::size_t size() const { return offload.size(); }
    /// eta = 1 - x + x / epsilon
    double effective_fraction(std::size_t u) const {
        const double x = offload[u];
        return 1.0 - x + x / ratio[u];
    }
};

struct UserOutcome {
    double effective_volume;  // alpha
    double accuracy;          // percent
    double comm_delay;
    double comp_delay;
    double delay;  // total
};

inline UserOutcome evaluate_user(const Problem& p, std::size_t u, int offload, double ratio, double capacity) {
    const UserContext& c = p.users[u];
    UserOutcome o{};
    if (offload == 0) {
        o.effective_volume = c.volume;
        o.delay = c.local_delay;
    } else {
        const double b = compressed_volume(c.volume, ratio);
        o.effective_volume = b;
        o.comm_delay = comm_delay(b, c.rate, p.cfg);
        o.comp_delay = offload_comp_delay(b, capacity, p.cfg);
        o.delay = o.comm_delay + o.comp_delay;
    }
    o.accuracy = accuracy(o.effective_volume, p.fit);
    return o;
}

inline UserOutcome evaluate_user(const Problem& p, const Decision& d, std::size_t u) {
    return evaluate_user(p, u, d.offload[u], d.ratio[u], d.capacity[u]);
}

inline double user_utility(double weight, double accuracy_pct, double delay) {
    if (!(accuracy_pct > 0.0) || !(delay > 0.0))
        throw DomainError("utility needs positive accuracy and delay");
    return std::log(weight * accuracy_pct / delay);
}

/// R = sum_u ln(L * y_u / t_u).
inline double system_utility(const Problem& p, const Decision& d) {
    double total = 0.0;
    for (std::size_t u = 0; u < p.num_users(); ++u) {
        const UserOutcome o = evaluate_user(p, d, u);
        total += user_utility(p.cfg.utility_weight, o.accuracy, o.delay);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Constraint check
// ---------------------------------------------------------------------------

inline constexpr double kConstraintTol = 1e-9;

struct UserResidual {
    bool binary_ok = true;    // C1
    bool single_ok = true;    // C2
    double ratio_residual = 0.0;     // C3: 1 - epsilon
    double delay_residual = 0.0;     // C4: t - t_limit
    double accuracy_residual = 0.0;  // C5: y_limit - y
    bool capacity_ok = true;  // offloaders hold f > 0
    bool c3 = true, c4 = true, c5 = true;
    bool ok() const { return binary_ok && single_ok && c3 && c4 && c5 && capacity_ok; }
};

struct SbsResidual {
    double load = 0.0;
    double budget = 0.0;
    double residual = 0.0;  // C6: load - budget
    bool ok = true;
};

struct ConstraintReport {
    std::vector<UserResidual> users;
    std::vector<SbsResidual> servers;

    bool feasible() const {
        return std::all_of(users.begin(), users.end(), [](const UserResidual& r) { return r.ok(); }) &&
               std::all_of(servers.begin(), servers.end(), [](const SbsResidual& s) { return s.ok; });
    }
    std::size_t violations() const {
        std::size_t n = 0;
        for (const auto& r : users) n += r.ok() ? 0 : 1;
        for (const auto& s : servers) n += s.ok ? 0 : 1;
        return n;
    }
};

/// Residuals for C1-C6. Never throws on bad decisions; malformed values are
/// reported as violations.
inline ConstraintReport check_constraints(const Problem& p, const Decision& d) {
    ConstraintReport rep;
    const std::size_t U = p.num_users();
    rep.users.resize(U);
    rep.servers.resize(p.num_sbs());
    for (std::size_t k = 0; k < p.num_sbs(); ++k) rep.servers[k].budget = p.cfg.mec_capacity;

    if (d.offload.size() != U || d.ratio.size() != U || d.capacity.size() != U) {
        for (auto& r : rep.users) r.binary_ok = false;
        return rep;
    }
    const double tol = kConstraintTol;
    for (std::size_t u = 0; u < U; ++u) {
        UserResidual& r = rep.users[u];
        const UserContext& c = p.users[u];
        const int x = d.offload[u];
        r.binary_ok = (x == 0 || x == 1);
        // one association per user, so x <= 1 is the whole of C2
        r.single_ok = x <= 1;
        r.ratio_residual = 1.0 - d.ratio[u];
        r.c3 = std::isfinite(d.ratio[u]) && r.ratio_residual <= tol;
        if (x == 1) {
            r.capacity_ok = d.capacity[u] > 0.0 && std::isfinite(d.capacity[u]);
            rep.servers[c.sbs].load += d.capacity[u];
        }
        if (!r.binary_ok || !r.c3 || !r.capacity_ok) {
            r.c4 = r.c5 = false;
            r.delay_residual = r.accuracy_residual = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const UserOutcome o = evaluate_user(p, u, x, std::max(d.ratio[u], 1.0), d.capacity[u]);
        r.delay_residual = o.delay - c.delay_limit;
        r.accuracy_residual = c.accuracy_limit - o.accuracy;
        r.c4 = r.delay_residual <= tol * c.delay_limit;
        r.c5 = r.accuracy_residual <= tol * c.accuracy_limit;
    }
    for (auto& s : rep.servers) {
        s.residual = s.load - s.budget;
        s.ok = s.residual <= tol * s.budget;
    }
    return rep;
}

inline void write_report_csv(const ConstraintReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    out.precision(17);
    out << "kind,index,c1,c2,c3_residual,c4_residual,c5_residual,c6_residual,ok\n";
    for (std::size_t u = 0; u < rep.users.size(); ++u) {
        const auto& r = rep.users[u];
        out << "user," << u << ',' << r.binary_ok << ',' << r.single_ok << ',' << r.ratio_residual << ','
            << r.delay_residual << ',' << r.accuracy_residual << ",," << r.ok() << '\n';
    }
    for (std::size_t k = 0; k < rep.servers.size(); ++k) {
        const auto& s = rep.servers[k];
        out << "sbs," << k << ",,,,,," << s.residual << ',' << s.ok << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace mecsc
