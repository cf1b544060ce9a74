#pragma once

#include "cogload/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace cogload {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

namespace detail {

template <class F>
struct SimpsonState {
    const F& f;
    int max_depth;
    long max_evaluations;
    long evaluations = 0;
    bool converged = true;
    double error = 0.0;

    double step(double a, double b, double eps, double whole, double fa, double fm, double fb, int depth)
    {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = f(lm);
        const double frm = f(rm);
        evaluations += 2;
        const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        const bool roundoff = std::abs(delta) <= 64.0 * std::numeric_limits<double>::epsilon() *
                                                      (std::abs(left) + std::abs(right));
        if (std::abs(delta) <= 15.0 * eps || roundoff) {
            error += std::abs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        if (depth >= max_depth || evaluations >= max_evaluations) {
            converged = false;
            error += std::abs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        return step(a, m, 0.5 * eps, left, fa, flm, fm, depth + 1) +
               step(m, b, 0.5 * eps, right, fm, frm, fb, depth + 1);
    }
};

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] with a relative tolerance on the result.
/// Throws SolverError carrying the achieved error estimate when the depth or evaluation
/// budget runs out.
template <class F>
QuadratureResult adaptive_simpson(const F& f, double a, double b, double rel_tol, int max_depth = 60,
                                  long max_evaluations = 50'000'000)
{
    QuadratureResult out;
    if (a == b) return out;
    detail::SimpsonState<F> st{f, max_depth, max_evaluations};
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    st.evaluations = 3;
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // The relative target is applied to the coarse estimate; a slightly
    // pessimistic scale only costs extra refinement.
    const double scale = std::max(std::abs(whole), std::numeric_limits<double>::min());
    out.value = st.step(a, b, rel_tol * scale, whole, fa, fm, fb, 0);
    out.error_estimate = st.error;
    out.evaluations = st.evaluations;
    if (!st.converged)
        throw SolverError("adaptive_simpson: no convergence within the subdivision budget, achieved error " +
                          std::to_string(st.error) + " on value " + std::to_string(out.value));
    return out;
}

/// Normalized sinc, sin(πx)/(πx), with sinc(0) = 1.
inline double sinc(double x)
{
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

/// ∫_lo^hi sinc²(x) dx. The interval is split at the integer zeros of sinc² so each
/// adaptive Simpson run sees a single smooth lobe.
inline double integrate_sinc2(double lo, double hi, double rel_tol)
{
    if (hi < lo) return -integrate_sinc2(hi, lo, rel_tol);
    auto f = [](double x) {
        const double s = sinc(x);
        return s * s;
    };
    double total = 0.0;
    double a = lo;
    while (a < hi) {
        double b = std::floor(a) + 1.0;
        if (b > hi) b = hi;
        total += adaptive_simpson(f, a, b, rel_tol).value;
        a = b;
    }
    return total;
}

}  // namespace cogload
