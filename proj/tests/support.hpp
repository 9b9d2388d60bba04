#pragma once

// Test-only helpers: hand-built problems, random instance generators and
// brute-force oracles. Nothing here calls into the solvers being checked.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "mecsc/mecsc.hpp"

namespace mecsc::oracle {

struct UserSpec {
    std::size_t sbs;
    double volume;
    double rate;  // bits/s
    std::size_t task;
};

/// Problem with given per-user radio rates, bypassing the channel model.
inline Problem handmade_problem(SystemConfig cfg, const std::vector<UserSpec>& users,
                                TaskCatalog catalog = default_catalog(), FitParams fit = {}) {
    cfg.num_users = users.size();
    Scenario s;
    s.sbs_positions.resize(cfg.num_sbs);
    std::vector<std::size_t> next(cfg.num_sbs, 0);
    std::vector<UserTask> tasks;
    for (const UserSpec& u : users) {
        s.user_positions.push_back({0.0, 0.0});
        s.association.push_back(u.sbs);
        s.subcarrier.push_back(next[u.sbs]++);
        s.interference.push_back(0.0);
        s.rates.push_back(u.rate);
        tasks.push_back({u.task, u.volume});
    }
    s.link_gains.assign(users.size() * cfg.num_sbs, 1e-10);
    return make_problem(cfg, fit, catalog, std::move(s), std::move(tasks));
}

inline double log_uniform(Rng& rng, double lo, double hi) {
    return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

/// Random per-user compression instance drawn around the default system.
inline CompressionInstance random_compression_instance(Rng& rng) {
    const SystemConfig cfg;
    const TaskCatalog cat = default_catalog();
    const TaskType task = cat[rng.index(cat.size())];
    const double a = rng.uniform(cfg.volume_min, cfg.volume_max);
    const double rate = log_uniform(rng, 2e3, 5e6);
    const double f = log_uniform(rng, 1e9, 200e9);
    CompressionInstance inst;
    inst.local_delay = (cfg.overhead_slope * a + cfg.overhead_intercept) / cfg.local_capacity;
    inst.offload_slope = a * cfg.bits_per_unit / rate + cfg.overhead_slope * a / f;
    inst.offload_fixed = cfg.overhead_intercept / f;
    inst.raw_volume = a;
    inst.delay_limit = task.delay_limit;
    inst.accuracy_limit = task.accuracy_limit;
    inst.weight = cfg.utility_weight;
    return inst;
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Dense grid scan for the maximum of f on [lo, hi].
template <class F>
ScalarMax grid_max(F&& f, double lo, double hi, std::size_t points) {
    ScalarMax best{lo, -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        const double v = f(x);
        if (v > best.value) best = {x, v};
    }
    return best;
}

/// Independent evaluation of the capacity objective.
inline double capacity_objective_direct(const CapacityInstance& inst, const std::vector<double>& f) {
    double total = 0.0;
    for (std::size_t u = 0; u < inst.users.size(); ++u) {
        const auto& c = inst.users[u];
        const double t = c.fixed_delay + (c.offloading ? c.work / f[u] : 0.0);
        total += std::log(inst.weight * c.accuracy_const / t);
    }
    return total;
}

/// Brute-force search over the feasible set {f >= f_min, sum f = budget} of
/// an all-offloading instance with 2 or 3 users: f_i = f_min_i + k_i * h,
/// h = budget / steps, the last user taking the remainder.
inline double capacity_grid_oracle(const CapacityInstance& inst, std::size_t steps) {
    const std::size_t n = inst.users.size();
    const double h = inst.budget / static_cast<double>(steps);
    std::vector<double> f_min(n);
    double need = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
        const auto& c = inst.users[u];
        f_min[u] = c.work / (c.delay_limit - c.fixed_delay);
        need += f_min[u];
    }
    const double spare = inst.budget - need;
    double best = -std::numeric_limits<double>::infinity();
    if (!(spare >= 0.0)) return best;
    const auto kmax = static_cast<std::size_t>(spare / h);
    std::vector<double> f(n);
    if (n == 2) {
        for (std::size_t i = 0; i <= kmax; ++i) {
            f[0] = f_min[0] + h * static_cast<double>(i);
            f[1] = inst.budget - f[0];
            best = std::max(best, capacity_objective_direct(inst, f));
        }
    } else if (n == 3) {
        for (std::size_t i = 0; i <= kmax; ++i)
            for (std::size_t j = 0; i + j <= kmax; ++j) {
                f[0] = f_min[0] + h * static_cast<double>(i);
                f[1] = f_min[1] + h * static_cast<double>(j);
                f[2] = inst.budget - f[0] - f[1];
                best = std::max(best, capacity_objective_direct(inst, f));
            }
    }
    return best;
}

/// Random all-offloading capacity instance with 2 or 3 users.
inline CapacityInstance random_capacity_instance(Rng& rng, std::size_t n) {
    CapacityInstance inst;
    inst.budget = log_uniform(rng, 5e9, 200e9);
    inst.weight = 1.0;
    for (std::size_t u = 0; u < n; ++u) {
        CapacityUser c;
        c.accuracy_const = rng.uniform(85.0, 99.0);
        c.fixed_delay = log_uniform(rng, 1e-4, 2e-2);
        c.work = log_uniform(rng, 1e6, 5e7);
        // deadline met at a random fraction of an even share
        const double share = inst.budget / static_cast<double>(n) * rng.uniform(0.1, 3.0);
        c.delay_limit = c.fixed_delay + c.work / share;
        c.offloading = true;
        inst.users.push_back(c);
    }
    return inst;
}

}  // namespace mecsc::oracle
