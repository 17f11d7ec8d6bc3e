#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "grid.hpp"
#include "model.hpp"

namespace blowup {

struct MeshConfig {
    double dr = 1.0 / 64.0;
    double cfl = 0.5;
    double r_obs = -1.0;   // observation window [0, r_obs]; negative = 2 t_max
    double margin = -1.0;  // extra radius beyond r_obs + t_max; negative = automatic
    double store_interval = 0.0;  // slice spacing in time; 0 = final slice only
    int max_halvings = 40;
    double stiffness_limit = 0.05;

    /// Margin covering the numerical domain of dependence of the explicit
    /// scheme, which advances one cell per step (speed 1/cfl).
    double effective_margin(double t_max) const {
        if (margin >= 0.0)
            return margin;
        return t_max * (1.0 / cfl - 1.0) + 64.0 * dr;
    }

    double effective_r_obs(double t_max) const { return r_obs >= 0.0 ? r_obs : 2.0 * t_max; }

    double domain_radius(double t_max) const {
        return effective_r_obs(t_max) + t_max + effective_margin(t_max);
    }
};

struct DetectionPolicy {
    double threshold = 1e8;
    double sensitivity_tol = 0.02;
    double refinement_tol = 0.05;
};

class CflError : public DomainError {
public:
    using DomainError::DomainError;
};

struct SimulationResult {
    enum class Status { completed, threshold_reached, numerical_failure };

    SolutionGrid grid;
    Status status = Status::completed;
    double t_reached = 0.0;
    long steps = 0;
    int halvings = 0;
    double final_dt = 0.0;
    // First times max|u| on the observation window crosses threshold and 10x threshold.
    std::optional<double> crossing;
    std::optional<double> crossing_x10;
    double max_abs_u = 0.0;
    double r_at_max = 0.0;
    std::string failure;
};

inline const char* status_name(SimulationResult::Status s) {
    switch (s) {
    case SimulationResult::Status::completed: return "completed";
    case SimulationResult::Status::threshold_reached: return "threshold_reached";
    case SimulationResult::Status::numerical_failure: return "numerical_failure";
    }
    return "?";
}

namespace detail {

struct RadialCoefficients {
    std::vector<double> r, inv_r, eU, Up, potential;  // potential = U'' + (n-1)U'/r + U'^2
    std::vector<double> psi;                           // eps e^U v1 (u) or eps v1 (v)
};

inline RadialCoefficients radial_coefficients(const ProblemSpec& spec, std::size_t nr, double dr, SolverMode mode) {
    RadialCoefficients c;
    c.r.resize(nr);
    c.inv_r.resize(nr);
    c.eU.resize(nr);
    c.Up.resize(nr);
    c.potential.resize(nr);
    c.psi.resize(nr);
    const auto& f = spec.field;
    for (std::size_t i = 0; i < nr; ++i) {
        const double r = dr * static_cast<double>(i);
        c.r[i] = r;
        c.inv_r[i] = i == 0 ? 0.0 : 1.0 / r;
        const double U = f.eval_U(r);
        c.eU[i] = std::exp(U);
        const double up = i == 0 ? 0.0 : f.eval_U_prime(r);
        c.Up[i] = up;
        const double upp = f.eval_U_second(r);
        const double radial = i == 0 ? (spec.n - 1) * upp : (spec.n - 1) * up / r;
        c.potential[i] = upp + radial + up * up;
        const double v1 = f.v1(r);
        c.psi[i] = mode == SolverMode::transformed_u ? spec.eps * c.eU[i] * v1 : spec.eps * v1;
    }
    return c;
}

// Incremental G(t) along the time march for fields without a closed form.
class GTracker {
public:
    explicit GTracker(const PerturbationField& f) : f_(f) {}

    double at(double t) {
        if (f_.has_closed_G())
            return f_.G(t);
        if (t < t_)
            return eval_G(f_, t);
        if (t > t_) {
            g_ += adaptive_simpson(f_.A0, t_, t, f_.quadrature_tol * 1e-3).value;
            t_ = t;
        }
        return g_;
    }

private:
    const PerturbationField& f_;
    double t_ = 0.0;
    double g_ = 0.0;
};

}  // namespace detail

/// Explicit leapfrog march of the radial problem
///   transformed_u: u_tt = u_rr + (n-1)/r u_r + h u + e^{G+U} F(e^{-G-U} d_t^j u)
///   direct_v:      v_tt = perturbed operator form with A0, U', U'' coefficients
/// with u(0) = 0 and u_t(0) = eps e^U v1 (v_t(0) = eps v1). At r = 0 the
/// singular term is replaced by (n-1) u_rr; at r = R an outgoing condition
/// for r^((n-1)/2) u is applied. Time steps halve when the nonlinearity
/// becomes stiff relative to the step.
inline SimulationResult simulate(const ProblemSpec& spec, const MeshConfig& mesh, double t_max,
                                 SolverMode mode = SolverMode::transformed_u, const DetectionPolicy& policy = {}) {
    spec.validate();
    if (!(mesh.cfl > 0.0 && mesh.cfl <= 0.9))
        throw CflError("CFL number must lie in (0, 0.9]");
    if (!(mesh.dr > 0.0) || !(t_max > 0.0))
        throw DomainError("simulate: dr and t_max must be positive");

    const double R_needed = mesh.domain_radius(t_max);
    const auto nr = static_cast<std::size_t>(std::ceil(R_needed / mesh.dr)) + 1;
    const double dr = mesh.dr;
    const auto steps_nominal = static_cast<long>(std::ceil(t_max / (mesh.cfl * dr) - 1e-9));
    double dt = t_max / static_cast<double>(steps_nominal);
    const std::size_t i_obs = std::min(nr - 1, static_cast<std::size_t>(std::floor(mesh.effective_r_obs(t_max) / dr)));

    const auto& field = spec.field;
    const auto c = detail::radial_coefficients(spec, nr, dr, mode);
    detail::GTracker gtrack(field);
    const int n = spec.n;
    const int j = spec.j;
    const double p = spec.p;
    const bool pure_square = field.F.kind == Nonlinearity::Kind::pure_power && p == 2.0;
    const bool has_h = static_cast<bool>(field.h);
    const bool linear = field.F.kind == Nonlinearity::Kind::zero;

    SimulationResult res;
    SolutionGrid& g = res.grid;
    g.dr = dr;
    g.dt = dt;
    g.r_max = dr * static_cast<double>(nr - 1);
    g.cfl = mesh.cfl;
    g.n = n;
    g.p = p;
    g.j = j;
    g.quantity = mode == SolverMode::transformed_u ? "u" : "v";

    // F-part of the right-hand side at node i, given the state value s and
    // weight w = e^{-(G+U)} (u mode) or the F argument directly (v mode).
    auto F_of = [&](double s) {
        if (pure_square)
            return s * s;
        return spec.F(s);
    };

    std::vector<double> prev2(nr, 0.0), prev(nr, 0.0), cur(nr, 0.0), next(nr, 0.0), rhs(nr, 0.0);

    auto laplacian = [&](const std::vector<double>& u, std::size_t i) {
        if (i == 0)
            return static_cast<double>(n) * 2.0 * (u[1] - u[0]) / (dr * dr);
        return (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (dr * dr) +
               (n - 1) * c.inv_r[i] * (u[i + 1] - u[i - 1]) / (2.0 * dr);
    };
    auto gradient = [&](const std::vector<double>& u, std::size_t i) {
        return i == 0 ? 0.0 : (u[i + 1] - u[i - 1]) / (2.0 * dr);
    };

    double next_store = mesh.store_interval > 0.0 ? 0.0 : HUGE_VAL;
    auto store = [&](double t, const std::vector<double>& u) {
        g.times.push_back(t);
        g.slices.push_back(u);
    };
    if (next_store == 0.0) {
        store(0.0, prev);
        next_store = mesh.store_interval;
    }

    const double theta = policy.threshold;
    const double theta10 = 10.0 * policy.threshold;
    double last_max = 0.0;
    auto monitor = [&](double t_new, const std::vector<double>& u, double eG) -> bool {
        double mx = 0.0;
        std::size_t where = 0;
        for (std::size_t i = 0; i <= i_obs; ++i) {
            double v = std::abs(u[i]);
            if (mode == SolverMode::direct_v)
                v *= eG * c.eU[i];
            if (!std::isfinite(v)) {
                res.status = SimulationResult::Status::numerical_failure;
                res.failure = "non-finite value at t=" + std::to_string(t_new) + " r=" + std::to_string(c.r[i]);
                return true;
            }
            if (v > mx) {
                mx = v;
                where = i;
            }
        }
        auto cross_time = [&](double level) {
            if (last_max <= 0.0)
                return t_new;
            const double w = (std::log(level) - std::log(last_max)) / (std::log(mx) - std::log(last_max));
            return t_new - dt + std::clamp(w, 0.0, 1.0) * dt;
        };
        if (!res.crossing && mx >= theta)
            res.crossing = cross_time(theta);
        if (!res.crossing_x10 && mx >= theta10)
            res.crossing_x10 = cross_time(theta10);
        res.max_abs_u = mx;
        res.r_at_max = c.r[where];
        last_max = mx;
        if (res.crossing_x10) {
            res.status = SimulationResult::Status::threshold_reached;
            return true;
        }
        return false;
    };

    // Nonlinear source at time t for state (u at level, d_t u estimate).
    // Returns the stiffness indicator (dt^2 dH/du for j=0, dt dH/du_t for j=1).
    auto source = [&](double t, const std::vector<double>& u, const std::vector<double>* ut,
                      std::vector<double>& out) {
        const double G = gtrack.at(t);
        const double eG = std::exp(G);
        double stiff = 0.0;
        if (mode == SolverMode::transformed_u) {
            for (std::size_t i = 0; i < nr; ++i) {
                double H = has_h ? field.h(t, c.r[i]) * u[i] : 0.0;
                if (!linear) {
                    const double w = 1.0 / (eG * c.eU[i]);
                    const double arg = j == 0 ? u[i] : (*ut)[i];
                    const double Fv = F_of(w * arg) / w;
                    H += Fv;
                    if (arg != 0.0)
                        stiff = std::max(stiff, p * std::abs(Fv / arg));
                }
                out[i] = H;
            }
        } else {
            const double A0 = field.eval_A0(t);
            const double A0p = field.eval_A0_prime(t);
            for (std::size_t i = 0; i < nr; ++i) {
                double H = (c.potential[i] - A0p - A0 * A0) * u[i];
                if (has_h)
                    H += field.h(t, c.r[i]) * u[i];
                if (!linear) {
                    const double arg = j == 0 ? u[i] : (*ut)[i] + A0 * u[i];
                    const double Fv = F_of(arg);
                    H += Fv;
                    if (arg != 0.0)
                        stiff = std::max(stiff, p * std::abs(Fv / arg));
                }
                out[i] = H;
            }
        }
        return j == 0 ? stiff * dt * dt : stiff * dt;
    };

    // First step: Taylor expansion using u(0) = 0, u_t(0) = psi.
    {
        std::vector<double> zero(nr, 0.0), ut0 = c.psi;
        source(0.0, zero, &ut0, rhs);
        const double A0 = mode == SolverMode::direct_v ? field.eval_A0(0.0) : 0.0;
        for (std::size_t i = 0; i + 1 < nr; ++i) {
            double utt = rhs[i] - 2.0 * A0 * c.psi[i];
            cur[i] = dt * c.psi[i] + 0.5 * dt * dt * utt;
            if (mode == SolverMode::transformed_u)
                cur[i] += dt * dt * dt / 6.0 * laplacian(c.psi, i);
        }
        cur[nr - 1] = dt * c.psi[nr - 1];
    }
    double t = dt;
    long step_count = 1;
    bool have_prev2 = false;  // prev2 valid at t - 2dt
    const bool stopped = monitor(t, cur, std::exp(gtrack.at(t)));
    if (!stopped && t >= next_store - 1e-9 * dt) {
        store(t, cur);
        next_store += mesh.store_interval;
    }

    if (!stopped) {
        std::vector<double> ut(nr, 0.0);
        while (t < t_max - 1e-9 * dt) {
            // time derivative at the current level (one-sided, second order)
            if (j == 1) {
                for (std::size_t i = 0; i < nr; ++i)
                    ut[i] = have_prev2 ? (3.0 * cur[i] - 4.0 * prev[i] + prev2[i]) / (2.0 * dt)
                                       : 2.0 * (cur[i] - prev[i]) / dt - c.psi[i];
            }
            const double stiff = source(t, cur, &ut, rhs);
            if (stiff > mesh.stiffness_limit && res.halvings < mesh.max_halvings && have_prev2) {
                // Halve the step: rebuild the two trailing levels by quadratic
                // interpolation through (t-2dt, t-dt, t).
                for (std::size_t i = 0; i < nr; ++i) {
                    const double half = -0.125 * prev2[i] + 0.75 * prev[i] + 0.375 * cur[i];
                    prev2[i] = prev[i];
                    prev[i] = half;
                }
                // prev2 sits at t - dt_old = t - 2 dt_new.
                dt *= 0.5;
                ++res.halvings;
                continue;
            }

            const double A0 = mode == SolverMode::direct_v ? field.eval_A0(t) : 0.0;
            const double damp = A0 * dt;
            for (std::size_t i = 0; i + 1 < nr; ++i) {
                double acc = laplacian(cur, i) + rhs[i];
                if (mode == SolverMode::direct_v)
                    acc += 2.0 * c.Up[i] * gradient(cur, i);
                next[i] = (2.0 * cur[i] - (1.0 - damp) * prev[i] + dt * dt * acc) / (1.0 + damp);
            }
            {
                // outgoing characteristic for w = r^{(n-1)/2} u
                const std::size_t N = nr - 1;
                const double k = 0.5 * (n - 1);
                const double wN = std::pow(c.r[N], k) * cur[N];
                const double wM = std::pow(c.r[N - 1], k) * cur[N - 1];
                next[N] = (wN - dt / dr * (wN - wM)) / std::pow(c.r[N], k);
            }
            prev2.swap(prev);
            prev.swap(cur);
            cur.swap(next);
            have_prev2 = true;
            t += dt;
            ++step_count;
            if (std::abs(t - t_max) < 1e-9 * dt)
                t = t_max;
            if (monitor(t, cur, mode == SolverMode::direct_v ? std::exp(gtrack.at(t)) : 1.0))
                break;
            if (t >= next_store - 1e-9 * dt) {
                store(t, cur);
                next_store += mesh.store_interval;
            }
        }
    }

    if (g.times.empty() || g.times.back() != t)
        store(t, cur);
    res.t_reached = t;
    res.steps = step_count;
    res.final_dt = dt;
    return res;
}

struct BlowupVerdict {
    enum class Outcome { blew_up, no_blowup, inconclusive, numerical_failure };

    Outcome outcome = Outcome::no_blowup;
    bool blew_up = false;
    std::optional<double> T_estimate;
    double threshold = 1e8;
    double sensitivity = 0.0;        // |T(10 theta) - T(theta)| / T(theta)
    double refinement_spread = 0.0;  // |T(dr/2) - T(dr)| / T(dr)
    double r_at_blowup = 0.0;
    std::string diagnostic;
};

inline const char* outcome_name(BlowupVerdict::Outcome o) {
    switch (o) {
    case BlowupVerdict::Outcome::blew_up: return "blew_up";
    case BlowupVerdict::Outcome::no_blowup: return "no_blowup";
    case BlowupVerdict::Outcome::inconclusive: return "inconclusive";
    case BlowupVerdict::Outcome::numerical_failure: return "numerical_failure";
    }
    return "?";
}

/// Threshold-crossing blow-up detection: T is the first time max|u| on the
/// observation window reaches theta. The estimate is accepted only when the
/// 10x-threshold crossing and a half-mesh rerun agree within tolerance.
inline BlowupVerdict detect_blowup(const ProblemSpec& spec, const MeshConfig& mesh, double t_max,
                                   SolverMode mode = SolverMode::transformed_u, const DetectionPolicy& policy = {},
                                   const SimulationResult* precomputed = nullptr) {
    BlowupVerdict v;
    v.threshold = policy.threshold;
    MeshConfig m = mesh;
    m.store_interval = 0.0;
    const SimulationResult base = precomputed ? *precomputed : simulate(spec, m, t_max, mode, policy);
    if (base.status == SimulationResult::Status::numerical_failure) {
        v.outcome = BlowupVerdict::Outcome::numerical_failure;
        v.diagnostic = base.failure;
        return v;
    }
    if (!base.crossing) {
        v.outcome = BlowupVerdict::Outcome::no_blowup;
        v.diagnostic = "max|u| stayed below threshold up to t_max";
        return v;
    }
    const double T = *base.crossing;
    v.T_estimate = T;
    v.r_at_blowup = base.r_at_max;
    v.sensitivity = base.crossing_x10 ? std::abs(*base.crossing_x10 - T) / T : HUGE_VAL;

    MeshConfig fine = m;
    fine.dr = 0.5 * m.dr;
    const SimulationResult half = simulate(spec, fine, t_max, mode, policy);
    if (half.status == SimulationResult::Status::numerical_failure || !half.crossing) {
        v.refinement_spread = HUGE_VAL;
    } else {
        v.refinement_spread = std::abs(*half.crossing - T) / T;
    }
    if (v.sensitivity <= policy.sensitivity_tol && v.refinement_spread <= policy.refinement_tol) {
        v.outcome = BlowupVerdict::Outcome::blew_up;
        v.blew_up = true;
    } else {
        v.outcome = BlowupVerdict::Outcome::inconclusive;
        v.diagnostic = "sensitivity " + std::to_string(v.sensitivity) + ", refinement spread " +
                       std::to_string(v.refinement_spread);
    }
    return v;
}

}  // namespace blowup
