#pragma once

#include <cmath>
#include <string>

#include "extended_real.hpp"
#include "model.hpp"

namespace blowup {

struct ExponentReport {
    enum class Kind { strauss, glassey, slow_decay, shifted_quadratic, lifespan_kappa };

    ExtendedReal value;
    Kind kind = Kind::strauss;
    std::string inputs;  // echo, e.g. "n=3 j=0"

    bool all_powers() const { return value.is_plus_infinity(); }

    static const char* kind_name(Kind k) {
        switch (k) {
        case Kind::strauss: return "strauss";
        case Kind::glassey: return "glassey";
        case Kind::slow_decay: return "slow_decay";
        case Kind::shifted_quadratic: return "shifted_quadratic";
        case Kind::lifespan_kappa: return "lifespan_kappa";
        }
        return "?";
    }
};

namespace detail {
inline std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}
}  // namespace detail

/// Strauss exponent (j = 0), the positive root of (n-1)p^2 - (n+1)p - 2, or
/// Glassey exponent (n+1)/(n-1) (j = 1).
inline ExponentReport strauss_glassey(int n, int j) {
    if (n < 2)
        throw DomainError("strauss_glassey: n must be >= 2");
    if (j != 0 && j != 1)
        throw DomainError("strauss_glassey: j must be 0 or 1");
    const double nn = n;
    ExponentReport r;
    r.inputs = "n=" + std::to_string(n) + " j=" + std::to_string(j);
    if (j == 0) {
        r.kind = ExponentReport::Kind::strauss;
        r.value = (nn + 1.0 + std::sqrt(nn * nn + 10.0 * nn - 7.0)) / (2.0 * (nn - 1.0));
    } else {
        r.kind = ExponentReport::Kind::glassey;
        r.value = (nn + 1.0) / (nn - 1.0);
    }
    return r;
}

/// p_c(alpha) = 1 + 2/alpha; every p > 1 is subcritical when alpha <= 0.
inline ExponentReport slow_decay_critical(double alpha) {
    ExponentReport r;
    r.kind = ExponentReport::Kind::slow_decay;
    r.inputs = "alpha=" + detail::fmt(alpha);
    r.value = alpha > 0.0 ? ExtendedReal(1.0 + 2.0 / alpha) : ExtendedReal::plus_infinity();
    return r;
}

/// Coefficients of (alpha+gamma+ell) p^2 - (alpha+gamma+2 ell+2-j) p + ell.
struct ShiftedQuadratic {
    double a, b, c;

    ShiftedQuadratic(double alpha, double gamma, double ell, int j)
        : a(alpha + gamma + ell), b(alpha + gamma + 2.0 * ell + 2.0 - j), c(ell) {}

    double residual(double p) const { return a * p * p - b * p + c; }
};

/// Critical exponent p_{ell,j}(alpha+gamma): the root > 1 of the shifted
/// quadratic, or +inf when alpha+gamma+ell <= 0 (every p > 1 blows up).
inline ExponentReport shifted_critical(double alpha, double gamma, double ell, int j) {
    if (!std::isfinite(alpha) || !std::isfinite(gamma) || !std::isfinite(ell))
        throw DomainError("shifted_critical: inputs must be finite");
    if (j != 0 && j != 1)
        throw DomainError("shifted_critical: j must be 0 or 1");
    ExponentReport r;
    r.kind = ExponentReport::Kind::shifted_quadratic;
    r.inputs = "alpha=" + detail::fmt(alpha) + " gamma=" + detail::fmt(gamma) + " ell=" + detail::fmt(ell) +
               " j=" + std::to_string(j);
    const ShiftedQuadratic q(alpha, gamma, ell, j);
    if (q.a <= 0.0) {
        r.value = ExtendedReal::plus_infinity();
        return r;
    }
    const double disc = q.b * q.b - 4.0 * q.a * q.c;
    if (disc < 0.0)
        throw DomainError("shifted_critical: empty blow-up range (complex roots) for " + r.inputs);
    // Sign-aware form: no subtraction of nearly equal terms for small ell.
    const double big = 0.5 * (q.b + std::copysign(std::sqrt(disc), q.b));
    const double r1 = big / q.a;
    const double r2 = big != 0.0 ? q.c / big : 0.0;
    const double root = std::max(r1, r2);
    if (!(root > 1.0))
        throw DomainError("shifted_critical: empty blow-up range (no root above 1) for " + r.inputs);
    r.value = root;
    return r;
}

/// kappa = ((2-j)/(p-1) - alpha - gamma - ell(1-1/p))^(-1), the lifespan
/// exponent in T <= C eps^(-kappa).
inline ExponentReport lifespan_kappa(double p, double alpha, double gamma, double ell, int j) {
    if (!(p > 1.0))
        throw DomainError("lifespan_kappa: p must exceed 1");
    ExponentReport r;
    r.kind = ExponentReport::Kind::lifespan_kappa;
    r.inputs = "p=" + detail::fmt(p) + " alpha=" + detail::fmt(alpha) + " gamma=" + detail::fmt(gamma) +
               " ell=" + detail::fmt(ell) + " j=" + std::to_string(j);
    const double denom = (2.0 - j) / (p - 1.0) - alpha - gamma - ell * (1.0 - 1.0 / p);
    if (!(denom > 0.0))
        throw DomainError("lifespan_kappa: p outside blow-up range (" + r.inputs + ")");
    r.value = 1.0 / denom;
    return r;
}

/// Unperturbed lifespan exponent (p-1)/(2 - j p - (p-1) alpha).
inline double classical_lifespan_exponent(double p, double alpha, int j) {
    const double denom = 2.0 - j * p - (p - 1.0) * alpha;
    if (!(denom > 0.0))
        throw DomainError("classical_lifespan_exponent: p outside blow-up range");
    return (p - 1.0) / denom;
}

}  // namespace blowup
