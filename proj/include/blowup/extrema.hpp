#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "model.hpp"

namespace blowup {

/// Blow-up set Sigma_delta = {(t, r): r - t >= max(sigma_n t, delta)}.
struct BlowupRegion {
    double sigma_n = 0.5;
    double delta = 0.1;

    void validate() const {
        if (!(sigma_n > 0.0 && sigma_n <= 1.0))
            throw DomainError("sigma_n must lie in (0,1), with 1 accepted as the boundary case");
        if (!(delta > 0.0))
            throw DomainError("delta must be positive");
    }

    /// Membership with a relative rounding allowance so that points built
    /// on the boundary line, such as the line entry point, count as inside.
    bool contains(double t, double r) const {
        return t > 0.0 && r - t >= std::max(sigma_n * t, delta) - 1e-12 * std::max(1.0, r);
    }

    /// Point of the line r = (1 + sigma_n) t at time t.
    double line_radius(double t) const { return (1.0 + sigma_n) * t; }

    /// Smallest t for which the line r = (1 + sigma_n) t enters the region.
    double line_entry_time() const { return delta / sigma_n; }
};

struct Extremum {
    double value = 0.0;
    double where = 0.0;
    // Bracket for the true extremum: [lo, hi]. Degenerate when exact.
    double lo = 0.0;
    double hi = 0.0;
    bool exact = false;
};

struct ExtremaOptions {
    int samples = 512;
};

namespace detail {

// Golden-section refinement of the extremum of sign*f on [a, b].
template <class Fn>
std::pair<double, double> golden_refine(const Fn& f, double a, double b, double sign, int iterations = 60) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = sign * f(x1), f2 = sign * f(x2);
    for (int i = 0; i < iterations && (b - a) > 1e-13 * (1.0 + std::abs(a)); ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = sign * f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = sign * f(x2);
        }
    }
    return f1 < f2 ? std::pair{x1, sign * f1} : std::pair{x2, sign * f2};
}

// sign = +1 for the minimum, -1 for the maximum.
template <class Fn>
Extremum sampled_extremum(const Fn& f, double a, double b, double sign, int samples) {
    Extremum e;
    if (a == b) {
        e.value = e.lo = e.hi = f(a);
        e.where = a;
        e.exact = true;
        return e;
    }
    const double h = (b - a) / (samples - 1);
    int best = 0;
    double best_val = sign * f(a);
    for (int i = 1; i < samples; ++i) {
        const double v = sign * f(i == samples - 1 ? b : a + i * h);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    const double left = a + std::max(0, best - 1) * h;
    const double right = std::min(b, a + std::min(samples - 1, best + 1) * h);
    auto [x, val] = golden_refine(f, left, right, sign);
    const double sampled = sign * best_val;
    if (sign * val < best_val) {
        e.value = val;
        e.where = x;
    } else {
        e.value = sampled;
        e.where = a + best * h;
    }
    e.lo = std::min(e.value, sampled);
    e.hi = std::max(e.value, sampled);
    return e;
}

}  // namespace detail

/// min of U over [a, b]; endpoint evaluation for monotone U, dense sampling
/// plus golden-section refinement otherwise.
inline Extremum min_U(const PerturbationField& field, double a, double b, const ExtremaOptions& opt = {}) {
    a = std::max(a, 0.0);
    if (field.U_shape != Monotonicity::none) {
        const double x = field.U_shape == Monotonicity::increasing ? a : b;
        const double v = field.eval_U(x);
        return {v, x, v, v, true};
    }
    field.check_radius(b);
    return detail::sampled_extremum([&](double r) { return field.U(r); }, a, b, +1.0, opt.samples);
}

inline Extremum max_U(const PerturbationField& field, double a, double b, const ExtremaOptions& opt = {}) {
    a = std::max(a, 0.0);
    if (field.U_shape != Monotonicity::none) {
        const double x = field.U_shape == Monotonicity::increasing ? b : a;
        const double v = field.eval_U(x);
        return {v, x, v, v, true};
    }
    field.check_radius(b);
    return detail::sampled_extremum([&](double r) { return field.U(r); }, a, b, -1.0, opt.samples);
}

/// max of G over [0, t].
inline Extremum max_G(const PerturbationField& field, double t, const ExtremaOptions& opt = {}) {
    field.check_time(t);
    if (field.G_shape == Monotonicity::increasing) {
        const double v = eval_G(field, t);
        return {v, t, v, v, true};
    }
    if (field.G_shape == Monotonicity::decreasing || t == 0.0)
        return {0.0, 0.0, 0.0, 0.0, true};
    if (field.has_closed_G())
        return detail::sampled_extremum([&](double s) { return field.G(s); }, 0.0, t, -1.0, opt.samples);
    // Cumulative panel quadrature keeps the sampling pass at one sweep of A0.
    const int n = opt.samples;
    const double h = t / (n - 1);
    double acc = 0.0, best = 0.0, where = 0.0;
    for (int i = 1; i < n; ++i) {
        acc += adaptive_simpson(field.A0, (i - 1) * h, i * h, field.quadrature_tol / n).value;
        if (acc > best) {
            best = acc;
            where = i * h;
        }
    }
    return {best, where, best, best, false};
}

/// Extremal envelope of the potentials entering the lower-bound iteration:
/// Ubar = min U on [r-t, r+t], Ubbar = max U on [r-t, r+t], Gbbar = max G on [0, t].
struct ExtremalEnvelope {
    const PerturbationField* field;
    ExtremaOptions options{};

    double Ubar(double t, double r) const { return min_U(*field, r - t, r + t, options).value; }
    double Ubbar(double t, double r) const { return max_U(*field, r - t, r + t, options).value; }
    double Gbbar(double t) const { return max_G(*field, t, options).value; }
};

}  // namespace blowup
