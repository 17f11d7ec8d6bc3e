#pragma once

#include <cmath>
#include <functional>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "model.hpp"

// Reference values for the solver and iteration code. Everything here is
// evaluated from closed formulas or Boost quadrature; nothing depends on the
// solver stencils or the library's own adaptive Simpson.

namespace blowup::oracles {

struct OracleReport {
    std::string name;
    std::string inputs;
    double oracle = 0.0;
    double candidate = 0.0;
    double abs_dev = 0.0;
    double rel_dev = 0.0;

    bool within(double tol) const { return std::isfinite(abs_dev) && abs_dev <= tol; }
};

inline OracleReport compare(std::string name, std::string inputs, double oracle, double candidate) {
    OracleReport r{std::move(name), std::move(inputs), oracle, candidate, 0.0, 0.0};
    r.abs_dev = std::abs(candidate - oracle);
    r.rel_dev = oracle != 0.0 ? r.abs_dev / std::abs(oracle) : r.abs_dev;
    return r;
}

namespace detail {

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
    if (a == b)
        return 0.0;
    // Map to [-1, 1] so the integrand carries the half-width; otherwise the
    // error estimate has a roundoff floor set by |f| and short intervals
    // never meet the relative tolerance.
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    auto g = [&](double x) { return half * f(mid + half * x); };
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, -1.0, 1.0, 20, tol, &err);
    if (!std::isfinite(v))
        throw DomainError("oracle quadrature failed on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    return v;
}

}  // namespace detail

/// Free radial wave in three dimensions with u(0) = 0, u_t(0) = psi:
/// u(t, r) = (1/(2r)) int_{|r-t|}^{r+t} lambda psi(lambda) dlambda.
/// For r < t the odd part of lambda psi cancels, hence the lower limit |r - t|.
inline double spherical_means_n3(const std::function<double(double)>& psi, double t, double r) {
    if (!(r > 0.0) || !(t >= 0.0))
        throw DomainError("spherical_means_n3: need r > 0 and t >= 0");
    return detail::integrate([&](double l) { return l * psi(l); }, std::abs(r - t), r + t) / (2.0 * r);
}

/// (1/(8 r^m)) int_{r-t}^{r+t} lambda^m psi(lambda) dlambda, valid on
/// r - t >= sigma_n t > 0.
inline double takamura_lower_bound(const std::function<double(double)>& psi, double t, double r, int m,
                                   double sigma_n) {
    if (!(t > 0.0) || !(sigma_n > 0.0) || !(r - t >= sigma_n * t))
        throw DomainError("takamura_lower_bound: requires r - t >= sigma_n t > 0");
    const double I = detail::integrate([&](double l) { return std::pow(l, m) * psi(l); }, r - t, r + t);
    return I / (8.0 * std::pow(r, m));
}

struct BetaIntegral {
    double exact;
    double quadrature;
};

/// int_0^t (t - tau) tau^q dtau = t^(q+2) / ((q+1)(q+2)).
inline BetaIntegral beta_integral(double q, double t) {
    if (!(q > -1.0) || !(t > 0.0))
        throw DomainError("beta_integral: requires q > -1 and t > 0");
    const double exact = std::pow(t, q + 2.0) / ((q + 1.0) * (q + 2.0));
    boost::math::quadrature::tanh_sinh<double> ts;
    const double quad = ts.integrate([&](double tau) { return (t - tau) * std::pow(tau, q); }, 0.0, t);
    return {exact, quad};
}

}  // namespace blowup::oracles
