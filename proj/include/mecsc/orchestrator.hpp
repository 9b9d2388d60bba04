#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mecsc/capacity.hpp"
#include "mecsc/compression.hpp"
#include "mecsc/config.hpp"
#include "mecsc/errors.hpp"
#include "mecsc/taskmodel.hpp"

namespace mecsc {

enum class Scheme { proposed, ac, wcr };

inline std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::proposed: return "proposed";
        case Scheme::ac: return "ac";
        case Scheme::wcr: return "wcr";
    }
    return "?";
}

inline Scheme parse_scheme(std::string_view name) {
    if (name == "proposed") return Scheme::proposed;
    if (name == "ac") return Scheme::ac;
    if (name == "wcr") return Scheme::wcr;
    throw ConfigError("schemes", "unknown scheme '" + std::string(name) + "'");
}

struct RunTrace {
    Scheme scheme = Scheme::proposed;
    std::vector<double> outer_objectives;           // N^0, N^1, ...; -inf marks an infeasible point
    std::vector<std::vector<double>> inner_traces;  // SCA trace per outer iteration
    Decision decision;
    ConstraintReport report;
    std::vector<bool> pinned_local;
    std::size_t iterations = 0;
    bool converged = false;
    double wall_time = 0.0;

    double utility() const { return outer_objectives.empty() ? -std::numeric_limits<double>::infinity() : outer_objectives.back(); }
};

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double objective_or_neg_inf(const Problem& p, const Decision& d) {
    if (!check_constraints(p, d).feasible()) return kNegInf;
    return system_utility(p, d);
}

/// Offload feasibility with the whole server to oneself; with `pinned_ratio`
/// the ratio must be 1.
inline bool offload_possible(const Problem& p, std::size_t u, bool uncompressed) {
    const EtaInterval r = eta_bounds(make_compression_instance(p, u, p.cfg.mec_capacity));
    if (r.empty()) return false;
    return !uncompressed || r.hi >= 1.0;
}

class Runner {
public:
    Runner(const Problem& p, const SolverConfig& sc, Scheme scheme) : p_(p), sc_(sc), scheme_(scheme) {}

    RunTrace run(const std::optional<Decision>& init) {
        const auto t0 = std::chrono::steady_clock::now();
        validate(sc_);
        classify();
        RunTrace tr;
        tr.scheme = scheme_;
        tr.pinned_local = pinned_;
        d_ = init ? *init : initial_decision();
        if (d_.size() != p_.num_users()) throw DomainError("initial decision has the wrong size");
        for (std::size_t u = 0; u < p_.num_users(); ++u)
            if (pinned_[u] && d_.offload[u] == 1) set_local(u);
        tr.outer_objectives.push_back(objective_or_neg_inf(p_, d_));

        for (std::size_t q = 1; q <= sc_.max_outer; ++q) {
            const std::vector<double> f = capacity_step();
            tr.inner_traces.push_back(compression_step(f));
            tr.outer_objectives.push_back(objective_or_neg_inf(p_, d_));
            tr.iterations = q;
            const double now = tr.outer_objectives.back();
            const double prev = tr.outer_objectives[tr.outer_objectives.size() - 2];
            if (std::isfinite(now) && std::isfinite(prev) && std::abs(now - prev) <= sc_.outer_tol) {
                tr.converged = true;
                break;
            }
        }
        tr.decision = d_;
        tr.report = check_constraints(p_, d_);
        tr.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return tr;
    }

private:
    bool uncompressed() const { return scheme_ == Scheme::wcr; }

    void classify() {
        const std::size_t U = p_.num_users();
        pinned_.assign(U, false);
        local_ok_.assign(U, false);
        std::vector<std::size_t> bad;
        for (std::size_t u = 0; u < U; ++u) {
            local_ok_[u] = local_feasible(make_compression_instance(p_, u, 0.0, false));
            const bool off = offload_possible(p_, u, uncompressed());
            pinned_[u] = !off;
            if (!off && !local_ok_[u]) bad.push_back(u);
        }
        if (!bad.empty()) {
            std::string names;
            for (std::size_t u : bad) names += (names.empty() ? "" : ",") + std::to_string(u);
            throw InfeasibleRun(bad, "users infeasible both locally and offloaded: " + names);
        }
    }

    void set_local(std::size_t u) {
        d_.offload[u] = 0;
        d_.ratio[u] = 1.0;
        d_.capacity[u] = 0.0;
    }

    void set_offload(std::size_t u, double eta) {
        d_.offload[u] = 1;
        d_.ratio[u] = 1.0 / eta;
    }

    Decision initial_decision() {
        const std::size_t U = p_.num_users();
        d_ = Decision::all_local(U);
        std::vector<std::size_t> candidates(p_.num_sbs(), 0);
        for (std::size_t u = 0; u < U; ++u)
            if (!pinned_[u]) ++candidates[p_.users[u].sbs];
        for (std::size_t u = 0; u < U; ++u) {
            if (pinned_[u]) continue;
            const double f0 = p_.cfg.mec_capacity / static_cast<double>(candidates[p_.users[u].sbs]);
            const CompressionInstance inst = make_compression_instance(p_, u, f0);
            const EtaInterval r = eta_bounds(inst);
            if (uncompressed()) {
                if (!r.empty() && r.hi >= 1.0) set_offload(u, 1.0);
                else if (!local_ok_[u]) set_offload(u, 1.0);
            } else if (!r.empty()) {
                set_offload(u, r.mid());
            } else if (!local_ok_[u]) {
                set_offload(u, eta_accuracy_min(inst));
            }
        }
        // f^0: even split among the initial offloaders
        std::vector<std::size_t> n_off(p_.num_sbs(), 0);
        for (std::size_t u = 0; u < U; ++u) n_off[p_.users[u].sbs] += d_.offload[u];
        for (std::size_t u = 0; u < U; ++u)
            if (d_.offload[u] == 1) d_.capacity[u] = p_.cfg.mec_capacity / static_cast<double>(n_off[p_.users[u].sbs]);
        return d_;
    }

    CapacityUser capacity_user(std::size_t u) const {
        const UserContext& c = p_.users[u];
        CapacityUser cu;
        cu.delay_limit = c.delay_limit;
        if (d_.offload[u] == 1) {
            const double b = compressed_volume(c.volume, d_.ratio[u]);
            cu.accuracy_const = accuracy(b, p_.fit);
            cu.fixed_delay = comm_delay(b, c.rate, p_.cfg);
            cu.work = overhead_cycles(b, p_.cfg);
            cu.offloading = true;
        } else {
            cu.accuracy_const = accuracy(c.volume, p_.fit);
            cu.fixed_delay = c.local_delay;
        }
        return cu;
    }

    [[noreturn]] void fail(std::size_t u, const std::string& why) const {
        throw InfeasibleRun({u}, "user " + std::to_string(u) + ": " + why);
    }

    /// Capacity subproblem per SBS. Offloaders whose deadline cannot be met
    /// are first compressed to the accuracy floor, then moved to local
    /// computing; over-subscribed servers shed the most demanding offloader.
    std::vector<double> capacity_step() {
        const std::size_t U = p_.num_users();
        std::vector<double> f(U, 0.0);
        for (std::size_t k = 0; k < p_.num_sbs(); ++k) {
            std::vector<std::size_t> members;
            for (std::size_t u = 0; u < U; ++u)
                if (p_.users[u].sbs == k) members.push_back(u);
            for (;;) {
                CapacityInstance inst;
                inst.budget = p_.cfg.mec_capacity;
                inst.weight = p_.cfg.utility_weight;
                for (std::size_t u : members) inst.users.push_back(capacity_user(u));
                const MinCapacities mins = min_capacities(inst);
                bool changed = false;
                for (std::size_t i = 0; i < members.size(); ++i) {
                    if (!mins.infeasible[i]) continue;
                    const std::size_t u = members[i];
                    const double eta_floor = eta_accuracy_min(make_compression_instance(p_, u, 0.0, false));
                    if (!uncompressed() && d_.effective_fraction(u) > eta_floor * (1.0 + 1e-12)) {
                        set_offload(u, eta_floor);
                    } else if (local_ok_[u]) {
                        set_local(u);
                    } else {
                        fail(u, "deadline unreachable at any capacity");
                    }
                    changed = true;
                }
                if (changed) continue;

                const double share = inst.budget / static_cast<double>(std::max<std::size_t>(
                                                       1, std::count_if(inst.users.begin(), inst.users.end(),
                                                                        [](const CapacityUser& c) { return c.offloading; })));
                const bool over = scheme_ == Scheme::ac
                                      ? std::any_of(mins.f_min.begin(), mins.f_min.end(), [&](double m) { return m > share; })
                                      : mins.total() > inst.budget;
                if (over) {
                    std::size_t worst = members.size();
                    for (std::size_t i = 0; i < members.size(); ++i) {
                        if (!inst.users[i].offloading || !local_ok_[members[i]]) continue;
                        if (worst == members.size() || mins.f_min[i] > mins.f_min[worst]) worst = i;
                    }
                    if (worst == members.size()) {
                        std::vector<std::size_t> off;
                        for (std::size_t i = 0; i < members.size(); ++i)
                            if (inst.users[i].offloading) off.push_back(members[i]);
                        throw InfeasibleRun(off, "SBS " + std::to_string(k) + " cannot serve its offloaders");
                    }
                    set_local(members[worst]);
                    continue;
                }

                const std::vector<double> fk = scheme_ == Scheme::ac ? even_split(inst) : solve_capacity(inst);
                for (std::size_t i = 0; i < members.size(); ++i) f[members[i]] = fk[i];
                break;
            }
        }
        for (std::size_t u = 0; u < U; ++u) d_.capacity[u] = f[u];
        return f;
    }

    /// Compression/offloading subproblem for fixed capacities; returns the
    /// SCA trace (empty for the uncompressed baseline).
    std::vector<double> compression_step(const std::vector<double>& f) {
        const std::size_t U = p_.num_users();
        std::vector<CompressionInstance> insts(U);
        for (std::size_t u = 0; u < U; ++u) insts[u] = make_compression_instance(p_, u, f[u], !pinned_[u]);

        std::vector<BinaryChoice> choice(U);
        std::vector<double> trace;
        if (uncompressed()) {
            for (std::size_t u = 0; u < U; ++u) choice[u] = choose_uncompressed(insts[u], u);
        } else {
            std::vector<Anchor> anchors(U);
            for (std::size_t u = 0; u < U; ++u) anchors[u] = {static_cast<double>(d_.offload[u]), d_.effective_fraction(u)};
            ScaState st = sca_iterate(insts, std::move(anchors), sc_.inner_tol, sc_.max_inner);
            trace = std::move(st.trace);
            choice = round_and_recover(st.anchors, insts);
        }
        for (std::size_t u = 0; u < U; ++u) {
            if (choice[u].offload == 1) {
                set_offload(u, choice[u].eta);
                d_.capacity[u] = f[u];
            } else {
                set_local(u);
            }
        }
        return trace;
    }

    const Problem& p_;
    SolverConfig sc_;
    Scheme scheme_;
    Decision d_;
    std::vector<bool> pinned_;
    std::vector<bool> local_ok_;
};

}  // namespace detail

/// Alternates the capacity subproblem and the SCA compression/offloading
/// subproblem until the system utility settles.
inline RunTrace run_algorithm1(const Problem& p, const SolverConfig& sc = {},
                               const std::optional<Decision>& init = std::nullopt) {
    return detail::Runner(p, sc, Scheme::proposed).run(init);
}

/// Same loop with MEC capacity split evenly among offloaders.
inline RunTrace run_ac(const Problem& p, const SolverConfig& sc = {},
                       const std::optional<Decision>& init = std::nullopt) {
    return detail::Runner(p, sc, Scheme::ac).run(init);
}

/// Same loop with the compression ratio pinned to 1.
inline RunTrace run_wcr(const Problem& p, const SolverConfig& sc = {},
                        const std::optional<Decision>& init = std::nullopt) {
    return detail::Runner(p, sc, Scheme::wcr).run(init);
}

inline RunTrace run_scheme(Scheme s, const Problem& p, const SolverConfig& sc = {},
                           const std::optional<Decision>& init = std::nullopt) {
    return detail::Runner(p, sc, s).run(init);
}

/// Columns: iteration, objective, scheme, seed.
inline void write_trace_csv(const std::vector<RunTrace>& traces, const std::vector<std::uint64_t>& seeds,
                            const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    out.precision(17);
    out << "iteration,objective,scheme,seed\n";
    for (std::size_t i = 0; i < traces.size(); ++i)
        for (std::size_t q = 0; q < traces[i].outer_objectives.size(); ++q)
            out << q << ',' << traces[i].outer_objectives[q] << ',' << to_string(traces[i].scheme) << ','
                << seeds[i] << '\n';
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace mecsc
