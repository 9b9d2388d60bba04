#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>
#include <utility>

#include "mecsc/errors.hpp"

namespace mecsc {

template <class F>
struct BracketedScalarProblem {
    F evaluate;
    double lo;
    double hi;
    double tol = 1e-10;
    std::size_t max_iter = 200;
};

template <class F>
BracketedScalarProblem(F, double, double) -> BracketedScalarProblem<F>;
template <class F>
BracketedScalarProblem(F, double, double, double) -> BracketedScalarProblem<F>;
template <class F>
BracketedScalarProblem(F, double, double, double, std::size_t) -> BracketedScalarProblem<F>;

/// Root of a sign-changing function by bisection. Stops once the bracket is
/// narrower than `tol` (absolute) or an exact zero is hit.
template <class F>
    requires std::invocable<F&, double>
double bisect_root(BracketedScalarProblem<F> prob) {
    if (!(prob.lo < prob.hi) || !(prob.tol > 0.0)) throw DomainError("bisect_root: need lo < hi and tol > 0");
    double lo = prob.lo;
    double hi = prob.hi;
    double f_lo = prob.evaluate(lo);
    const double f_hi = prob.evaluate(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if (std::signbit(f_lo) == std::signbit(f_hi))
        throw BracketError("bisect_root: no sign change on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
    for (std::size_t it = 0; it < prob.max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= prob.tol || mid == lo || mid == hi) return mid;
        const double f_mid = prob.evaluate(mid);
        if (f_mid == 0.0) return mid;
        if (std::signbit(f_mid) == std::signbit(f_lo)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= prob.tol) return mid;
    throw NonConvergence("bisect_root: iteration cap reached", mid);
}

struct ScalarMax {
    double argmax;
    double value;
};

/// Golden-section search for the maximum of a concave (or just unimodal)
/// function on [lo, hi].
/// Only points inside [lo, hi] are evaluated; both endpoints are compared
/// against the final interior point so boundary maxima come out exact.
template <class F>
    requires std::invocable<F&, double>
ScalarMax maximize_concave_1d(F&& f, double lo, double hi, double tol = 1e-8, std::size_t max_iter = 200) {
    if (!(lo <= hi)) throw DomainError("maximize_concave_1d: lo > hi");
    if (lo == hi) return {lo, f(lo)};

    constexpr double inv_phi = 0.6180339887498949;  // (sqrt(5) - 1) / 2
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (std::size_t it = 0; it < max_iter && (b - a) > tol; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    ScalarMax best = fc >= fd ? ScalarMax{c, fc} : ScalarMax{d, fd};
    if (a == lo) {
        const double f_lo = f(lo);
        if (f_lo >= best.value) best = {lo, f_lo};
    }
    if (b == hi) {
        const double f_hi = f(hi);
        if (f_hi > best.value) best = {hi, f_hi};
    }
    return best;
}

}  // namespace mecsc
