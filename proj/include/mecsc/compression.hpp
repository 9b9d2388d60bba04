#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "mecsc/config.hpp"
#include "mecsc/errors.hpp"
#include "mecsc/numeric.hpp"
#include "mecsc/taskmodel.hpp"

namespace mecsc {

/// Per-user constants of the compression/offloading step for a fixed
/// capacity. With eta = 1 - x + x/epsilon the delay is affine in (x, eta):
///
///   D(x, eta) = (1 - x)(B_local - B_fixed - B_slope) + B_fixed + B_slope * eta
///
/// which equals B_local at (0, 1) and B_fixed + B_slope * eta at x = 1.
/// B_fixed carries the cycle intercept of the overhead model (gamma / f); it
/// is zero when the overhead is purely proportional.
struct CompressionInstance {
    double local_delay = 0.0;    // B^delta = T^L
    double offload_slope = 0.0;  // B^beta: a*bits/r + beta*a/f
    double offload_fixed = 0.0;  // gamma / f
    double raw_volume = 0.0;     // a
    FitParams fit;
    double delay_limit = 0.0;
    double accuracy_limit = 0.0;
    double weight = 1.0;
    bool offload_allowed = true;
};

/// Builds the instance of user u given the capacity it would get on its server.
inline CompressionInstance make_compression_instance(const Problem& p, std::size_t u, double capacity,
                                                     bool offload_allowed = true) {
    const UserContext& c = p.users[u];
    CompressionInstance inst;
    inst.local_delay = c.local_delay;
    inst.raw_volume = c.volume;
    inst.fit = p.fit;
    inst.delay_limit = c.delay_limit;
    inst.accuracy_limit = c.accuracy_limit;
    inst.weight = p.cfg.utility_weight;
    inst.offload_allowed = offload_allowed && capacity > 0.0;
    if (inst.offload_allowed) {
        inst.offload_slope = c.volume * p.cfg.bits_per_unit / c.rate + p.cfg.overhead_slope * c.volume / capacity;
        inst.offload_fixed = p.cfg.overhead_intercept / capacity;
    }
    return inst;
}

struct Anchor {
    double x = 0.0;
    double eta = 1.0;
};

struct EtaInterval {
    double lo = 1.0;
    double hi = 0.0;
    bool empty() const { return !(lo <= hi); }
    double mid() const { return 0.5 * (lo + hi); }
    double clamp(double v) const { return std::clamp(v, lo, hi); }
};

inline double accuracy_at(const CompressionInstance& inst, double eta) {
    return inst.fit.p - inst.fit.q * std::pow(inst.raw_volume * eta, -inst.fit.r);
}

/// Smallest eta meeting the accuracy limit.
inline double eta_accuracy_min(const CompressionInstance& inst) {
    return volume_for_accuracy(inst.accuracy_limit, inst.fit) / inst.raw_volume;
}

inline double delay_denominator(const CompressionInstance& inst, double x, double eta) {
    return (1.0 - x) * (inst.local_delay - inst.offload_fixed - inst.offload_slope) + inst.offload_fixed +
           inst.offload_slope * eta;
}

/// Per-user relaxed objective ln(L y(a eta)) - ln D(x, eta).
inline double relaxed_objective(const CompressionInstance& inst, double x, double eta) {
    return std::log(inst.weight * accuracy_at(inst, eta)) - std::log(delay_denominator(inst, x, eta));
}

inline double offload_objective(const CompressionInstance& inst, double eta) {
    return std::log(inst.weight * accuracy_at(inst, eta)) - std::log(inst.offload_fixed + inst.offload_slope * eta);
}

inline double local_objective(const CompressionInstance& inst) {
    return std::log(inst.weight * accuracy_at(inst, 1.0)) - std::log(inst.local_delay);
}

inline bool local_feasible(const CompressionInstance& inst) {
    return inst.local_delay <= inst.delay_limit && accuracy_at(inst, 1.0) >= inst.accuracy_limit;
}

/// Feasible eta range for full offloading (x = 1): accuracy gives the lower
/// end, the deadline B_fixed + B_slope*eta <= t_limit the upper end.
inline EtaInterval eta_bounds(const CompressionInstance& inst) {
    if (!inst.offload_allowed) return {};
    const double lo = eta_accuracy_min(inst);
    const double hi = std::min(1.0, (inst.delay_limit - inst.offload_fixed) / inst.offload_slope);
    if (!std::isfinite(lo)) return {};
    return {lo, hi};
}

// ---------------------------------------------------------------------------
// SCA surrogate
// ---------------------------------------------------------------------------

/// First-order expansion of ln D(x, eta) at an anchor. ln of an affine form is
/// concave, so the expansion lies above it everywhere.
struct Linearization {
    double x0;
    double eta0;
    double d0;        // D at the anchor
    double coef_x;    // dD/dx = B_slope + B_fixed - B_local
    double coef_eta;  // dD/deta = B_slope

    double operator()(double x, double eta) const {
        return std::log(d0) + (coef_x * (x - x0) + coef_eta * (eta - eta0)) / d0;
    }
};

inline Linearization sca_linearize(Anchor anchor, const CompressionInstance& inst) {
    const double d0 = delay_denominator(inst, anchor.x, anchor.eta);
    if (!(d0 > 0.0)) throw AnchorError("SCA anchor has non-positive delay denominator");
    return {anchor.x, anchor.eta, d0, inst.offload_slope + inst.offload_fixed - inst.local_delay, inst.offload_slope};
}

struct RelaxedPoint {
    double x = 0.0;
    double eta = 1.0;
    double v = 0.0;  // surrogate bound on ln D
    bool feasible = true;
};

struct XRange {
    double lo = 1.0;
    double hi = 0.0;
    bool empty() const { return !(lo <= hi); }
};

namespace detail {
// Intersect s in [lo, hi] with s*c <= d.
inline void restrict_linear(double c, double d, double& lo, double& hi) {
    if (c > 0.0) hi = std::min(hi, d / c);
    else if (c < 0.0) lo = std::max(lo, d / c);
    else if (d < 0.0) hi = -1.0;
}
}  // namespace detail

/// x values for which the relaxed constraint set in eta is nonempty.
inline XRange relaxed_x_range(const CompressionInstance& inst) {
    if (!inst.offload_allowed) return {};
    const double eta_acc = eta_accuracy_min(inst);
    if (!(eta_acc <= 1.0)) return {};
    const double k = inst.local_delay - inst.offload_fixed - inst.offload_slope;
    const double budget = inst.delay_limit - inst.offload_fixed;
    // s = 1 - x
    double s_lo = 0.0;
    double s_hi = 1.0;
    detail::restrict_linear(k, budget - inst.offload_slope * eta_acc, s_lo, s_hi);  // eta_acc fits the deadline
    detail::restrict_linear(k + inst.offload_slope, budget, s_lo, s_hi);           // eta = 1 - x fits the deadline
    if (!(s_lo <= s_hi)) return {};
    return {1.0 - s_hi, 1.0 - s_lo};
}

/// Feasible eta range of the relaxed problem at a given x.
inline EtaInterval relaxed_eta_range(const CompressionInstance& inst, double x) {
    const double k = inst.local_delay - inst.offload_fixed - inst.offload_slope;
    const double lo = std::max(eta_accuracy_min(inst), 1.0 - x);
    const double hi = std::min(1.0, (inst.delay_limit - inst.offload_fixed - (1.0 - x) * k) / inst.offload_slope);
    return {lo, std::max(hi, lo)};  // x-range already guarantees lo <= hi up to rounding
}

inline constexpr double kInnerTol = 1e-8;

/// Maximizes ln(L y(a eta)) - v over the relaxed constraint set with v held at
/// the linearized bound. Nested golden-section: over x, of the best eta for
/// that x. Keeps the anchor if the search does not improve on it.
inline RelaxedPoint solve_inner_user(const CompressionInstance& inst, Anchor anchor) {
    const Linearization lin = sca_linearize(anchor, inst);
    auto surrogate = [&](double x, double eta) { return std::log(inst.weight * accuracy_at(inst, eta)) - lin(x, eta); };

    const XRange xs = relaxed_x_range(inst);
    if (xs.empty()) {
        if (local_feasible(inst)) return {0.0, 1.0, lin(0.0, 1.0), true};
        return {anchor.x, anchor.eta, lin(anchor.x, anchor.eta), false};
    }

    auto best_eta = [&](double x) {
        const EtaInterval r = relaxed_eta_range(inst, x);
        return maximize_concave_1d([&](double eta) { return surrogate(x, eta); }, r.lo, r.hi, kInnerTol);
    };
    const ScalarMax xm = maximize_concave_1d([&](double x) { return best_eta(x).value; }, xs.lo, xs.hi, kInnerTol);
    RelaxedPoint out{xm.argmax, best_eta(xm.argmax).argmax, 0.0, true};

    // Anchor stays if it is feasible and at least as good (monotone MM step).
    const bool anchor_in_range = anchor.x >= xs.lo && anchor.x <= xs.hi;
    if (anchor_in_range) {
        const EtaInterval r = relaxed_eta_range(inst, anchor.x);
        if (anchor.eta >= r.lo && anchor.eta <= r.hi && surrogate(anchor.x, anchor.eta) >= surrogate(out.x, out.eta)) {
            out.x = anchor.x;
            out.eta = anchor.eta;
        }
    }
    out.v = lin(out.x, out.eta);
    return out;
}

inline std::vector<RelaxedPoint> solve_inner_convex(const std::vector<CompressionInstance>& insts,
                                                    const std::vector<Anchor>& anchors) {
    std::vector<RelaxedPoint> out(insts.size());
    for (std::size_t u = 0; u < insts.size(); ++u) out[u] = solve_inner_user(insts[u], anchors[u]);
    return out;
}

inline double relaxed_total(const std::vector<CompressionInstance>& insts, const std::vector<Anchor>& anchors) {
    double total = 0.0;
    for (std::size_t u = 0; u < insts.size(); ++u) total += relaxed_objective(insts[u], anchors[u].x, anchors[u].eta);
    return total;
}

/// Starting point: full offload at the middle of the feasible eta range, or
/// local computing when offloading is infeasible.
inline Anchor default_anchor(const CompressionInstance& inst) {
    const EtaInterval r = eta_bounds(inst);
    if (r.empty()) return {0.0, 1.0};
    return {1.0, r.mid()};
}

struct ScaState {
    std::vector<Anchor> anchors;
    std::vector<double> surrogate_bound;
    std::vector<double> trace;  // relaxed objective per iteration, trace[0] at the init
    std::size_t iterations = 0;
    bool converged = false;
};

/// Successive convex approximation of the relaxed compression/offloading
/// problem. Stops when two consecutive relaxed objectives differ by at most
/// `tol` or after `max_iter` iterations.
inline ScaState sca_iterate(const std::vector<CompressionInstance>& insts, std::vector<Anchor> init, double tol,
                            std::size_t max_iter) {
    ScaState st;
    st.anchors = std::move(init);
    st.surrogate_bound.resize(insts.size());
    for (std::size_t u = 0; u < insts.size(); ++u)
        st.surrogate_bound[u] = std::log(delay_denominator(insts[u], st.anchors[u].x, st.anchors[u].eta));
    st.trace.push_back(relaxed_total(insts, st.anchors));

    for (std::size_t j = 0; j < max_iter; ++j) {
        std::vector<RelaxedPoint> pts = solve_inner_convex(insts, st.anchors);
        for (std::size_t u = 0; u < insts.size(); ++u) {
            if (!pts[u].feasible)
                throw UserInfeasible(u, "user " + std::to_string(u) + " has an empty relaxed feasible set");
            st.anchors[u] = {pts[u].x, pts[u].eta};
            st.surrogate_bound[u] = pts[u].v;
        }
        st.trace.push_back(relaxed_total(insts, st.anchors));
        ++st.iterations;
        if (std::abs(st.trace.back() - st.trace[st.trace.size() - 2]) <= tol) {
            st.converged = true;
            break;
        }
    }
    return st;
}

// ---------------------------------------------------------------------------
// Rounding and exact per-user oracle
// ---------------------------------------------------------------------------

struct BinaryChoice {
    int offload = 0;
    double eta = 1.0;
    double ratio = 1.0;  // epsilon = 1 / eta for offloaders
    double objective = -std::numeric_limits<double>::infinity();
};

/// Evaluates the true objective at x = 0 (eta = 1) and x = 1 (eta = relaxed
/// eta clamped into the offload range) and keeps the better feasible branch.
inline BinaryChoice round_user(const CompressionInstance& inst, Anchor relaxed, std::size_t index = 0) {
    BinaryChoice best;
    bool found = false;
    if (local_feasible(inst)) {
        best = {0, 1.0, 1.0, local_objective(inst)};
        found = true;
    }
    const EtaInterval r = eta_bounds(inst);
    if (!r.empty()) {
        const double eta = r.clamp(relaxed.eta);
        const double obj = offload_objective(inst, eta);
        if (!found || obj > best.objective) {
            best = {1, eta, 1.0 / eta, obj};
            found = true;
        }
    }
    if (!found) throw UserInfeasible(index, "user " + std::to_string(index) + " is infeasible in both branches");
    return best;
}

inline std::vector<BinaryChoice> round_and_recover(const std::vector<Anchor>& relaxed,
                                                   const std::vector<CompressionInstance>& insts) {
    std::vector<BinaryChoice> out(insts.size());
    for (std::size_t u = 0; u < insts.size(); ++u) out[u] = round_user(insts[u], relaxed[u], u);
    return out;
}

/// Branch choice with the compression ratio pinned to 1 (no compression).
inline BinaryChoice choose_uncompressed(const CompressionInstance& inst, std::size_t index = 0) {
    BinaryChoice best;
    bool found = false;
    if (local_feasible(inst)) {
        best = {0, 1.0, 1.0, local_objective(inst)};
        found = true;
    }
    const EtaInterval r = eta_bounds(inst);
    if (!r.empty() && r.lo <= 1.0 && r.hi >= 1.0) {
        const double obj = offload_objective(inst, 1.0);
        if (!found || obj > best.objective) {
            best = {1, 1.0, 1.0, obj};
            found = true;
        }
    }
    if (!found) throw UserInfeasible(index, "user " + std::to_string(index) + " is infeasible without compression");
    return best;
}

struct OracleResult {
    int x = 0;
    double eta = 1.0;
    double objective = -std::numeric_limits<double>::infinity();
};

/// Exact per-user optimum: x = 0 is a single point, x = 1 is a 1-D problem in
/// eta. That branch is not concave (-ln of the affine delay is convex) but it
/// is unimodal: its derivative changes sign at most once, since
/// y'(B_fixed + B_slope eta) - B_slope y is decreasing. Golden-section search
/// is exact for unimodal functions.
inline OracleResult exact_user_oracle(const CompressionInstance& inst, std::size_t index = 0) {
    OracleResult best;
    bool found = false;
    if (local_feasible(inst)) {
        best = {0, 1.0, local_objective(inst)};
        found = true;
    }
    const EtaInterval r = eta_bounds(inst);
    if (!r.empty()) {
        const ScalarMax m =
            maximize_concave_1d([&](double eta) { return offload_objective(inst, eta); }, r.lo, r.hi, 1e-10);
        if (!found || m.value > best.objective) {
            best = {1, m.argmax, m.value};
            found = true;
        }
    }
    if (!found) throw UserInfeasible(index, "user " + std::to_string(index) + " is infeasible in both branches");
    return best;
}

}  // namespace mecsc
