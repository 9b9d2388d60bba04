#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "mecsc/errors.hpp"
#include "mecsc/numeric.hpp"

namespace mecsc {

/// One user of an SBS as seen by the capacity allocation step.
struct CapacityUser {
    double accuracy_const = 0.0;  // A^delta, percent
    double fixed_delay = 0.0;     // A^beta, s
    double work = 0.0;            // cycles to run on the server
    double delay_limit = 0.0;     // s
    bool offloading = false;
};

struct CapacityInstance {
    std::vector<CapacityUser> users;
    double budget = 0.0;  // F_k
    double weight = 1.0;  // L
};

/// sum_u ln(L A^delta) - ln(A^beta + C/f); local users contribute their
/// constant term. Returns -inf if an offloader has no capacity.
inline double capacity_objective(const CapacityInstance& inst, const std::vector<double>& f) {
    double total = 0.0;
    for (std::size_t u = 0; u < inst.users.size(); ++u) {
        const CapacityUser& c = inst.users[u];
        double delay = c.fixed_delay;
        if (c.offloading) {
            if (!(f[u] > 0.0)) return -std::numeric_limits<double>::infinity();
            delay += c.work / f[u];
        }
        total += std::log(inst.weight * c.accuracy_const) - std::log(delay);
    }
    return total;
}

struct MinCapacities {
    std::vector<double> f_min;
    std::vector<bool> infeasible;

    bool any_infeasible() const { return std::find(infeasible.begin(), infeasible.end(), true) != infeasible.end(); }
    double total() const { return std::accumulate(f_min.begin(), f_min.end(), 0.0); }
};

/// Smallest capacity meeting each offloader's deadline: C / (t_limit - A^beta).
inline MinCapacities min_capacities(const CapacityInstance& inst) {
    MinCapacities out{std::vector<double>(inst.users.size(), 0.0), std::vector<bool>(inst.users.size(), false)};
    for (std::size_t u = 0; u < inst.users.size(); ++u) {
        const CapacityUser& c = inst.users[u];
        if (!c.offloading) continue;
        const double slack = c.delay_limit - c.fixed_delay;
        if (!(slack > 0.0)) {
            out.infeasible[u] = true;
            out.f_min[u] = std::numeric_limits<double>::infinity();
        } else {
            out.f_min[u] = c.work / slack;
        }
    }
    return out;
}

namespace detail {
// Positive root of lambda*A*f^2 + lambda*C*f - C = 0, written to stay exact as A -> 0.
inline double stationary_capacity(double lambda, double fixed_delay, double work) {
    return 2.0 * work / (lambda * work + std::sqrt(lambda * lambda * work * work + 4.0 * lambda * fixed_delay * work));
}
// lambda at which the unclipped stationary capacity equals f.
inline double multiplier_at(double f, double fixed_delay, double work) {
    return work / (fixed_delay * f * f + work * f);
}
}  // namespace detail

/// Optimal split of the SBS budget among offloaders.
///
/// The objective is strictly increasing in every offloader's capacity, so the
/// budget binds. Per multiplier lambda each interior user sits at the
/// positive root of lambda*A*f^2 + lambda*C*f - C = 0, clipped below at its
/// deadline minimum; lambda is found by bisection (in log space) so the
/// allocations sum to the budget. Local users receive zero.
inline std::vector<double> solve_capacity(const CapacityInstance& inst) {
    const std::size_t n = inst.users.size();
    std::vector<double> f(n, 0.0);
    const MinCapacities mins = min_capacities(inst);
    for (std::size_t u = 0; u < n; ++u)
        if (mins.infeasible[u])
            throw UserInfeasible(u, "user " + std::to_string(u) + " misses its deadline at any capacity");

    std::vector<std::size_t> off;
    for (std::size_t u = 0; u < n; ++u)
        if (inst.users[u].offloading) off.push_back(u);
    if (off.empty()) return f;

    const double budget = inst.budget;
    const double need = mins.total();
    if (need > budget * (1.0 + 1e-12))
        throw BudgetInfeasible("minimum capacities " + std::to_string(need) + " exceed budget " +
                               std::to_string(budget));
    if (off.size() == 1) {
        f[off.front()] = budget;
        return f;
    }
    if (need >= budget * (1.0 - 1e-12)) {
        for (std::size_t u : off) f[u] = mins.f_min[u];
        return f;
    }

    auto alloc = [&](double log_lambda, std::size_t u) {
        const CapacityUser& c = inst.users[u];
        return std::max(mins.f_min[u], detail::stationary_capacity(std::exp(log_lambda), c.fixed_delay, c.work));
    };
    auto excess = [&](double log_lambda) {
        double s = 0.0;
        for (std::size_t u : off) s += alloc(log_lambda, u);
        return s - budget;
    };

    double lam_lo = std::numeric_limits<double>::infinity();
    double lam_hi = 0.0;
    for (std::size_t u : off) {
        const CapacityUser& c = inst.users[u];
        lam_lo = std::min(lam_lo, detail::multiplier_at(budget, c.fixed_delay, c.work));
        lam_hi = std::max(lam_hi, detail::multiplier_at(std::max(mins.f_min[u], budget * 1e-9), c.fixed_delay, c.work));
    }
    double s_lo = std::log(lam_lo);
    double s_hi = std::log(lam_hi);
    for (int grow = 0; excess(s_hi) > 0.0 && grow < 200; ++grow) s_hi += std::log(2.0);
    for (int grow = 0; excess(s_lo) < 0.0 && grow < 200; ++grow) s_lo -= std::log(2.0);

    const double s = bisect_root(BracketedScalarProblem{excess, s_lo, s_hi, 1e-13, std::size_t{400}});

    // Rescale the unclipped users so the budget is met to rounding.
    double clipped = 0.0;
    double free = 0.0;
    for (std::size_t u : off) {
        f[u] = alloc(s, u);
        if (f[u] <= mins.f_min[u]) clipped += f[u];
        else free += f[u];
    }
    if (free > 0.0) {
        const double scale = (budget - clipped) / free;
        for (std::size_t u : off)
            if (f[u] > mins.f_min[u]) f[u] = std::max(mins.f_min[u], f[u] * scale);
    }
    return f;
}

/// Average Computing baseline: F_k split evenly among offloaders.
inline std::vector<double> even_split(const CapacityInstance& inst) {
    std::vector<double> f(inst.users.size(), 0.0);
    const auto n_off = static_cast<double>(
        std::count_if(inst.users.begin(), inst.users.end(), [](const CapacityUser& c) { return c.offloading; }));
    if (n_off == 0.0) return f;
    for (std::size_t u = 0; u < inst.users.size(); ++u)
        if (inst.users[u].offloading) f[u] = inst.budget / n_off;
    return f;
}

}  // namespace mecsc
