#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace blowup {

/// Raised when adaptive quadrature cannot meet its tolerance within the
/// recursion budget (typically a non-smooth or unbounded integrand).
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
};

namespace detail {

template <class Func>
struct SimpsonState {
    const Func& f;
    int evaluations = 0;
    int max_depth;
    double error_sum = 0.0;
};

template <class Func>
double simpson_recurse(SimpsonState<Func>& s, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = s.f(lm);
    const double frm = s.f(rm);
    s.evaluations += 2;
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (!std::isfinite(delta))
        throw QuadratureError("adaptive Simpson: non-finite integrand near t=" + std::to_string(m));
    if (std::abs(delta) <= 15.0 * tol || h <= 1e-14 * (1.0 + std::abs(m))) {
        s.error_sum += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    if (depth >= s.max_depth)
        throw QuadratureError("adaptive Simpson: recursion depth exceeded on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]");
    return simpson_recurse(s, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           simpson_recurse(s, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Adaptive Simpson rule with interval bisection and Richardson correction.
/// `abs_tol` is the target absolute error over [a, b].
template <class Func>
QuadratureResult adaptive_simpson(const Func& f, double a, double b, double abs_tol = 1e-10, int max_depth = 48) {
    if (a == b)
        return {};
    if (b < a) {
        auto r = adaptive_simpson(f, b, a, abs_tol, max_depth);
        r.value = -r.value;
        return r;
    }
    detail::SimpsonState<Func> s{f, 2, max_depth};
    const double fa = f(a);
    const double fb = f(b);
    // Pre-split into a few panels so a symmetric integrand cannot fool the
    // first error estimate.
    constexpr int panels = 4;
    double total = 0.0;
    const double w = (b - a) / panels;
    double left_val = fa;
    for (int i = 0; i < panels; ++i) {
        const double pa = a + i * w;
        const double pb = (i == panels - 1) ? b : a + (i + 1) * w;
        const double pfb = (i == panels - 1) ? fb : f(pb);
        const double pfm = f(0.5 * (pa + pb));
        s.evaluations += 2;
        const double est = (pb - pa) / 6.0 * (left_val + 4.0 * pfm + pfb);
        total += detail::simpson_recurse(s, pa, pb, left_val, pfm, pfb, est, abs_tol / panels, 0);
        left_val = pfb;
    }
    return {total, s.error_sum, s.evaluations};
}

}  // namespace blowup
