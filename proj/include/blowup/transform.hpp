#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "grid.hpp"
#include "model.hpp"

namespace blowup {

/// Local derivatives of a function of (t, r) at one point.
struct Jet {
    double f = 0.0;
    double f_t = 0.0;
    double f_tt = 0.0;
    double f_r = 0.0;
    double f_rr = 0.0;
};

/// Perturbed derivatives in radial form.
struct RadialOperatorSet {
    const PerturbationField* field;
    int n = 3;

    double tilde_dt(double t, const Jet& j) const { return j.f_t + field->eval_A0(t) * j.f; }

    double tilde_dtt(double t, const Jet& j) const {
        const double a = field->eval_A0(t);
        return j.f_tt + field->eval_A0_prime(t) * j.f + 2.0 * a * j.f_t + a * a * j.f;
    }

    double tilde_laplacian_radial(double r, const Jet& j) const {
        if (!(r > 0.0))
            throw DomainError("tilde_laplacian_radial: r must be positive");
        const double up = field->eval_U_prime(r);
        const double upp = field->eval_U_second(r);
        return j.f_rr + (n - 1) / r * j.f_r + 2.0 * up * j.f_r + (upp + (n - 1) / r * up + up * up) * j.f;
    }

    /// The A0 = 0 form: d_tt - Laplacian - 2 A.grad - (div A + |A|^2).
    double lower_order_form(double r, const Jet& j) const {
        const double up = field->eval_U_prime(r);
        const double div_A = field->eval_U_second(r) + (n - 1) / r * up;
        return j.f_tt - (j.f_rr + (n - 1) / r * j.f_r) - 2.0 * up * j.f_r - (div_A + up * up) * j.f;
    }
};

namespace detail {

inline double exp_times(double log_factor, double v) {
    if (std::abs(log_factor) <= 700.0)
        return std::exp(log_factor) * v;
    if (v == 0.0)
        return 0.0;
    const double mag = std::log(std::abs(v)) + log_factor;
    if (mag > 709.0)
        throw DomainError("transform overflow: log-magnitude " + std::to_string(mag));
    return std::copysign(std::exp(mag), v);
}

inline SolutionGrid rescale(const SolutionGrid& in, const PerturbationField& field, double sign,
                            const std::string& quantity) {
    SolutionGrid out = in;
    out.quantity = quantity;
    std::vector<double> U(in.nr());
    for (std::size_t i = 0; i < U.size(); ++i)
        U[i] = field.eval_U(in.radius(i));
    for (std::size_t k = 0; k < in.times.size(); ++k) {
        const double G = eval_G(field, in.times[k]);
        for (std::size_t i = 0; i < U.size(); ++i)
            out.slices[k][i] = exp_times(sign * (G + U[i]), in.slices[k][i]);
    }
    return out;
}

inline void require_residual_grid(const SolutionGrid& g) {
    if (g.times.size() < 7 || g.nr() < 7)
        throw DomainError("residual: grid too coarse, need >= 5 interior points in t and r");
    if (!g.uniform_in_time(1e-8))
        throw DomainError("residual: time slices are not uniformly spaced");
}

inline Jet jet_at(const SolutionGrid& g, std::size_t k, std::size_t i) {
    const auto& m = g.slices[k - 1];
    const auto& c = g.slices[k];
    const auto& p = g.slices[k + 1];
    const double dt = g.times[k + 1] - g.times[k];
    Jet j;
    j.f = c[i];
    j.f_t = (p[i] - m[i]) / (2.0 * dt);
    j.f_tt = (p[i] - 2.0 * c[i] + m[i]) / (dt * dt);
    j.f_r = (c[i + 1] - c[i - 1]) / (2.0 * g.dr);
    j.f_rr = (c[i + 1] - 2.0 * c[i] + c[i - 1]) / (g.dr * g.dr);
    return j;
}

template <class PointFn>
SolutionGrid residual_grid(const SolutionGrid& g, const PointFn& point, const std::string& quantity) {
    require_residual_grid(g);
    // r = 0 is excluded: interior radii start at the first positive node.
    const std::size_t i0 = g.r0 > 0.0 ? 1 : 2;
    SolutionGrid out;
    out.dt = g.times[2] - g.times[1];
    out.dr = g.dr;
    out.t0 = g.times[1];
    out.r0 = g.radius(i0);
    out.n = g.n;
    out.p = g.p;
    out.j = g.j;
    out.cfl = g.cfl;
    out.boundary = "interior";
    out.quantity = quantity;
    for (std::size_t k = 1; k + 1 < g.times.size(); ++k) {
        out.times.push_back(g.times[k]);
        std::vector<double> row;
        for (std::size_t i = i0; i + 1 < g.nr(); ++i)
            row.push_back(point(g.times[k], g.radius(i), jet_at(g, k, i)));
        out.slices.push_back(std::move(row));
    }
    out.r_max = out.radius(out.nr() - 1);
    return out;
}

}  // namespace detail

/// u = e^{G(t)} e^{U(r)} v, pointwise.
inline SolutionGrid to_u(const SolutionGrid& v, const PerturbationField& field) {
    return detail::rescale(v, field, +1.0, "u");
}

/// v = e^{-G(t)} e^{-U(r)} u, pointwise.
inline SolutionGrid to_v(const SolutionGrid& u, const PerturbationField& field) {
    return detail::rescale(u, field, -1.0, "v");
}

/// Optional manufactured source f(t, r) added to the right-hand side.
using SourceTerm = std::function<double(double, double)>;

/// u_tt - u_rr - (n-1)/r u_r - h u - e^{G+U} F(e^{-G-U} d_t^j u) - source,
/// by centered differences at the interior nodes.
inline SolutionGrid residual_classical(const SolutionGrid& u, const ProblemSpec& spec, const SourceTerm& source = {}) {
    const auto& f = spec.field;
    const int n = spec.n;
    return detail::residual_grid(
        u,
        [&](double t, double r, const Jet& J) {
            const double lhs = J.f_tt - J.f_rr - (n - 1) / r * J.f_r;
            const double w = eval_G(f, t) + f.eval_U(r);
            const double arg = spec.j == 0 ? J.f : J.f_t;
            double rhs = f.eval_h(t, r) * J.f;
            if (f.F.kind != Nonlinearity::Kind::zero)
                rhs += detail::exp_times(w, spec.F(detail::exp_times(-w, arg)));
            if (source)
                rhs += source(t, r);
            return lhs - rhs;
        },
        "residual_u");
}

/// tilde_dtt v - tilde_Laplacian v - h v - F(tilde_dt^j v) - source.
inline SolutionGrid residual_perturbed(const SolutionGrid& v, const ProblemSpec& spec,
                                       const SourceTerm& source = {}) {
    const RadialOperatorSet ops{&spec.field, spec.n};
    return detail::residual_grid(
        v,
        [&](double t, double r, const Jet& J) {
            const double lhs = ops.tilde_dtt(t, J) - ops.tilde_laplacian_radial(r, J);
            const double arg = spec.j == 0 ? J.f : ops.tilde_dt(t, J);
            double rhs = spec.field.eval_h(t, r) * J.f + spec.F(arg);
            if (source)
                rhs += source(t, r);
            return lhs - rhs;
        },
        "residual_v");
}

/// Max over the interior of t_grid of |tilde_dt(beta f) - beta f'| with
/// A0 = -beta'/beta, using centered differences on the (uniform) grid.
inline double shape_identity_check(const ScalarFn& beta, const ScalarFn& beta_prime, const ScalarFn& f,
                                   const std::vector<double>& t_grid) {
    if (t_grid.size() < 3)
        throw DomainError("shape_identity_check: need at least 3 grid points");
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < t_grid.size(); ++k) {
        const double t = t_grid[k];
        const double h = 0.5 * (t_grid[k + 1] - t_grid[k - 1]);
        const double b = beta(t);
        if (b == 0.0 || beta(t_grid[k - 1]) == 0.0 || beta(t_grid[k + 1]) == 0.0)
            throw DomainError("shape_identity_check: beta vanishes on the grid");
        const double A0 = -beta_prime(t) / b;
        const double d_bf = (beta(t_grid[k + 1]) * f(t_grid[k + 1]) - beta(t_grid[k - 1]) * f(t_grid[k - 1])) / (2.0 * h);
        const double df = (f(t_grid[k + 1]) - f(t_grid[k - 1])) / (2.0 * h);
        worst = std::max(worst, std::abs(d_bf + A0 * b * f(t) - b * df));
    }
    return worst;
}

/// u_t(0, r) from the transform: d_t(e^{G+U} v) at t = 0 with v(0) = 0 and
/// v_t(0) = eps v1, i.e. e^{G(0)+U}(v_t + A0(0) v).
inline double initial_velocity_u(const ProblemSpec& spec, double r) {
    const auto& f = spec.field;
    const double v0 = 0.0;
    const double vt0 = spec.eps * f.v1(r);
    return std::exp(eval_G(f, 0.0) + f.eval_U(r)) * (vt0 + f.eval_A0(0.0) * v0);
}

}  // namespace blowup
