#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "exponents.hpp"
#include "extrema.hpp"
#include "iteration.hpp"
#include "model.hpp"

namespace blowup {

/// Window over which U is extremized in the interaction functional.
///  theorem:      [sigma_n t, (2 + sigma_n) t]
///  main_theorem: [0, 3t] (weaker, sigma-free variant)
enum class Window { theorem, main_theorem };

inline std::pair<double, double> window_bounds(double t, double sigma_n, Window w) {
    if (w == Window::main_theorem)
        return {0.0, 3.0 * t};
    return {sigma_n * t, (2.0 + sigma_n) * t};
}

/// Interaction functional
///   ((2-j)/(p-1) - alpha) log t - max_[0,t] G + (1/p) min_W U - max_W U.
/// Blow-up follows when it diverges to +inf.
inline double phi(double t, const ProblemSpec& spec, const BlowupRegion& region, Window window = Window::theorem,
                  const ExtremaOptions& opt = {}) {
    if (!(t > 0.0))
        throw DomainError("phi: t must be positive");
    const auto [lo, hi] = window_bounds(t, region.sigma_n, window);
    const double coeff = (2.0 - spec.j) / (spec.p - 1.0) - spec.alpha();
    return coeff * std::log(t) - max_G(spec.field, t, opt).value + min_U(spec.field, lo, hi, opt).value / spec.p -
           max_U(spec.field, lo, hi, opt).value;
}

/// J(t, r) = log C0 - S_pK + (m+1+(2-j)/(p-1)) log t - (alpha+1+m) log(r+t)
///           + (1/p) Ubar - Gbbar - Ubbar.
/// J > 0 at a point of the region forces the iteration envelopes to diverge.
inline double J_functional(double t, double r, const ProblemSpec& spec, const IterationParams& ip,
                           const ExtremaOptions& opt = {}) {
    const BlowupRegion region{ip.sigma_n, ip.delta};
    if (!region.contains(t, r))
        throw DomainError("J_functional: (t, r) outside the blow-up region");
    const ExtremalEnvelope env{&spec.field, opt};
    return ip.log_C0() - ip.S_pK + (ip.m + 1.0 + ip.shift()) * std::log(t) -
           (ip.alpha + 1.0 + ip.m) * std::log(r + t) + env.Ubar(t, r) / ip.p - env.Gbbar(t) - env.Ubbar(t, r);
}

/// Final inequality on the line r = (1+sigma_n) t, written as
/// lhs(t) > rhs with lhs = ((2-j)/(p-1) - alpha) log t - Gbbar + Ubar/p - Ubbar
/// and rhs = log(e^S / C0 (2+sigma_n)^(alpha+1+m)). Equivalent to J > 0.
struct FinalInequality {
    double lhs;
    double rhs;
    bool holds() const { return lhs > rhs; }
};

inline FinalInequality final_inequality(double t, const ProblemSpec& spec, const IterationParams& ip,
                                        const ExtremaOptions& opt = {}) {
    const double r = (1.0 + ip.sigma_n) * t;
    const ExtremalEnvelope env{&spec.field, opt};
    const double lhs = ip.shift() * std::log(t) - ip.alpha * std::log(t) - env.Gbbar(t) + env.Ubar(t, r) / ip.p -
                       env.Ubbar(t, r);
    const double rhs = ip.S_pK - ip.log_C0() + (ip.alpha + 1.0 + ip.m) * std::log(2.0 + ip.sigma_n);
    return {lhs, rhs};
}

/// Smallest t0 in [delta/sigma_n, horizon] with J(t0, (1+sigma_n) t0) > 0,
/// located on a geometric grid and refined by bisection.
inline std::optional<double> first_positive_time(const ProblemSpec& spec, const IterationParams& ip, double horizon,
                                                 int samples_per_decade = 32, const ExtremaOptions& opt = {}) {
    if (!(horizon > 1.0))
        throw DomainError("first_positive_time: horizon must exceed 1");
    const BlowupRegion region{ip.sigma_n, ip.delta};
    const double start = region.line_entry_time();
    if (start > horizon)
        return std::nullopt;
    auto J_line = [&](double t) { return J_functional(t, region.line_radius(t), spec, ip, opt); };
    const double ratio = std::pow(10.0, 1.0 / samples_per_decade);
    double prev = start;
    if (J_line(start) > 0.0)
        return start;
    for (double t = start * ratio;; t *= ratio) {
        const double tc = std::min(t, horizon);
        if (J_line(tc) > 0.0) {
            double lo = prev, hi = tc;
            for (int i = 0; i < 80 && hi - lo > 1e-12 * hi; ++i) {
                const double mid = 0.5 * (lo + hi);
                (J_line(mid) > 0.0 ? hi : lo) = mid;
            }
            return hi;
        }
        if (tc >= horizon)
            break;
        prev = tc;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Divergence evidence and taxonomy

struct DivergenceOptions {
    double horizon = 1e6;
    double slope_margin = 0.01;
    int decades = 3;
    int samples_per_decade = 8;
    Window window = Window::theorem;
};

struct DivergenceEvidence {
    bool passed = false;
    bool increasing = false;
    double slope = 0.0;  // dPhi / dlog t over the final decades
    std::vector<std::pair<double, double>> samples;
};

/// Phi must increase over the last `decades` geometric decades up to the
/// horizon, with slope against log t above the margin. No finite horizon
/// proves a limit; this is the evidence standard used throughout.
inline DivergenceEvidence divergence_evidence(const ProblemSpec& spec, const BlowupRegion& region,
                                              const DivergenceOptions& opt = {}) {
    DivergenceEvidence ev;
    const int n = opt.decades * opt.samples_per_decade;
    const double t0 = opt.horizon / std::pow(10.0, opt.decades);
    for (int i = 0; i <= n; ++i) {
        const double t = t0 * std::pow(10.0, static_cast<double>(i) / opt.samples_per_decade);
        ev.samples.emplace_back(t, phi(t, spec, region, opt.window));
    }
    ev.increasing = true;
    for (std::size_t i = 1; i < ev.samples.size(); ++i)
        if (!(ev.samples[i].second > ev.samples[i - 1].second))
            ev.increasing = false;
    ev.slope = (ev.samples.back().second - ev.samples.front().second) /
               (std::log(ev.samples.back().first) - std::log(ev.samples.front().first));
    ev.passed = ev.increasing && ev.slope > opt.slope_margin;
    return ev;
}

enum class Regime {
    effective_space,  // ell finite, nonzero: shifted quadratic root
    time_only,        // ell = 0: only A0 can move the exponent
    all_powers,       // ell = -inf: every p > 1
    no_conclusion,    // ell = +inf: the condition can never hold
    unclassified      // indeterminate asymptotics
};

inline const char* regime_name(Regime r) {
    switch (r) {
    case Regime::effective_space: return "effective_space";
    case Regime::time_only: return "time_only";
    case Regime::all_powers: return "all_powers";
    case Regime::no_conclusion: return "no_conclusion";
    case Regime::unclassified: return "unclassified";
    }
    return "?";
}

struct Taxonomy {
    Regime regime = Regime::unclassified;
    ExtendedReal critical;  // blow-up for 1 < p < critical; +inf = every p > 1
    std::string diagnostic;

    bool predicts_blowup(double p) const {
        if (regime == Regime::no_conclusion || regime == Regime::unclassified)
            return false;
        return critical.is_plus_infinity() || p < critical.value();
    }
};

inline Taxonomy classify(const AsymptoticProfile& profile, double alpha, int j, double zero_tolerance = 0.0) {
    Taxonomy t;
    if (!profile.determinate) {
        t.regime = Regime::unclassified;
        t.diagnostic = profile.diagnostic;
        return t;
    }
    if (profile.ell.is_plus_infinity()) {
        t.regime = Regime::no_conclusion;
        t.diagnostic = "U grows faster than any multiple of log; the interaction condition can never be satisfied";
        return t;
    }
    if (profile.ell.is_minus_infinity()) {
        t.regime = Regime::all_powers;
        t.critical = ExtendedReal::plus_infinity();
        // The bound behind this regime controls max U only; for fast decay such as
        // U = -r the min term wins and Phi falls for small p, so callers should
        // confirm with divergence_evidence.
        t.diagnostic = "U decays faster than any multiple of -log; predicted blow-up for every p > 1 "
                       "(check divergence evidence, fast decay can defeat the min-U term)";
        return t;
    }
    double ell = profile.ell.value();
    if (std::abs(ell) <= zero_tolerance)
        ell = 0.0;
    t.regime = ell == 0.0 ? Regime::time_only : Regime::effective_space;
    t.critical = shifted_critical(alpha, profile.gamma, ell, j).value;
    if (t.critical.is_plus_infinity())
        t.diagnostic = "alpha+gamma+ell <= 0: blow-up for every p > 1";
    return t;
}

}  // namespace blowup
