#pragma once

#include <algorithm>
#include <atomic>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "criterion.hpp"
#include "exponents.hpp"
#include "extrema.hpp"
#include "iteration.hpp"
#include "model.hpp"
#include "solver.hpp"

namespace blowup {

// ---------------------------------------------------------------------------
// Sweeps

struct LifespanRecord {
    double eps = 0.0;
    std::optional<double> T;
    BlowupVerdict::Outcome outcome = BlowupVerdict::Outcome::no_blowup;
    double sensitivity = 0.0;
    double refinement_spread = 0.0;
    double t_max = 0.0;  // horizon of the accepted run
    double dr = 0.0;
    double r_at_blowup = 0.0;
    std::string diagnostic;
    std::uint64_t spec_hash = 0;

    bool usable() const { return outcome == BlowupVerdict::Outcome::blew_up && T.has_value(); }
};

/// Horizon search: t_max doubles from t_start until a crossing is seen or
/// t_limit is passed. The mesh follows the horizon,
/// dr = clamp(t_max / cells_per_window, mesh.dr, dr_max).
struct SweepOptions {
    MeshConfig mesh{};
    double t_start = 16.0;
    double t_limit = 1e6;
    int cells_per_window = 2048;
    double dr_max = 8.0;
    SolverMode mode = SolverMode::transformed_u;
    DetectionPolicy policy{};
    int workers = 0;  // 0: BLOWUP_WORKERS from the environment, else 1
};

/// Worker count from BLOWUP_WORKERS (positive integer), defaulting to 1.
inline int workers_from_env() {
    const char* s = std::getenv("BLOWUP_WORKERS");
    if (!s)
        return 1;
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0' || v < 1)
        return 1;
    return static_cast<int>(std::min(v, 256L));
}

/// FNV-1a over a canonical description of the problem (eps excluded).
inline std::uint64_t spec_hash(const ProblemSpec& spec) {
    char buf[64];
    std::string s = "n=" + std::to_string(spec.n);
    auto add = [&](const char* key, double v) {
        std::snprintf(buf, sizeof buf, ";%s=%.17g", key, v);
        s += buf;
    };
    add("p", spec.p);
    s += ";j=" + std::to_string(spec.j) + ";field=" + spec.field.name;
    for (double q : spec.field.params)
        add("param", q);
    add("alpha", spec.alpha());
    add("M", spec.M());
    s += ";shape=" + std::string(DataProfile::shape_name(spec.field.v1.shape));
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline double sweep_dr(double t_max, const SweepOptions& opt) {
    return std::clamp(t_max / opt.cells_per_window, opt.mesh.dr, std::max(opt.mesh.dr, opt.dr_max));
}

inline LifespanRecord lifespan_run(const ProblemSpec& spec, const SweepOptions& opt) {
    LifespanRecord rec;
    rec.eps = spec.eps;
    rec.spec_hash = spec_hash(spec);
    try {
        for (double t_max = opt.t_start;; t_max *= 2.0) {
            MeshConfig mesh = opt.mesh;
            mesh.dr = sweep_dr(t_max, opt);
            mesh.store_interval = 0.0;
            rec.t_max = t_max;
            rec.dr = mesh.dr;
            const SimulationResult run = simulate(spec, mesh, t_max, opt.mode, opt.policy);
            if (run.crossing || run.status == SimulationResult::Status::numerical_failure ||
                t_max >= opt.t_limit) {
                const BlowupVerdict v = detect_blowup(spec, mesh, t_max, opt.mode, opt.policy, &run);
                rec.outcome = v.outcome;
                rec.T = v.T_estimate;
                rec.sensitivity = v.sensitivity;
                rec.refinement_spread = v.refinement_spread;
                rec.r_at_blowup = v.r_at_blowup;
                rec.diagnostic = v.diagnostic;
                return rec;
            }
        }
    } catch (const std::exception& e) {
        rec.outcome = BlowupVerdict::Outcome::numerical_failure;
        rec.T.reset();
        rec.diagnostic = e.what();
    }
    return rec;
}

/// Runs one horizon search per eps on a bounded worker pool. Records come
/// back in the order of eps_list whatever the scheduling.
inline std::vector<LifespanRecord> lifespan_sweep(const ProblemSpec& tmpl, const std::vector<double>& eps_list,
                                                  const SweepOptions& opt = {}) {
    for (double e : eps_list)
        if (!(e > 0.0))
            throw DomainError("lifespan_sweep: every eps must be positive");
    tmpl.validate();
    std::vector<LifespanRecord> out(eps_list.size());
    const int workers = std::max(1, std::min<int>(opt.workers > 0 ? opt.workers : workers_from_env(),
                                                  static_cast<int>(eps_list.size())));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < eps_list.size(); i = next++) {
            ProblemSpec s = tmpl;
            s.eps = eps_list[i];
            out[i] = lifespan_run(s, opt);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (auto& th : pool)
            th.join();
    }
    return out;
}

/// eps values geometric in [lo, hi], largest first.
inline std::vector<double> geometric_eps(double lo, double hi, int count) {
    if (!(lo > 0.0 && hi >= lo) || count < 1)
        throw DomainError("geometric_eps: need 0 < lo <= hi and count >= 1");
    std::vector<double> v;
    for (int i = 0; i < count; ++i)
        v.push_back(count == 1 ? hi : hi * std::pow(lo / hi, static_cast<double>(i) / (count - 1)));
    return v;
}

// ---------------------------------------------------------------------------
// Fits

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    int points = 0;
};

inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw DomainError("least_squares: need >= 2 matching points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0))
        throw DomainError("least_squares: degenerate abscissae");
    LinearFit f;
    f.points = static_cast<int>(x.size());
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (x.size() > 2) {
        double ss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = y[i] - f.intercept - f.slope * x[i];
            ss += e * e;
        }
        f.stderr_slope = std::sqrt(ss / (n - 2.0) / sxx);
    }
    return f;
}

/// Asymptotic parameters of a field: the closed form when attached,
/// otherwise the numerical estimate up to `horizon`.
inline AsymptoticProfile field_profile(const PerturbationField& field, double horizon = 1e6) {
    if (field.closed_profile)
        return *field.closed_profile;
    return estimate_asymptotics(field, horizon);
}

struct TheoryBound {
    double kappa = 0.0;
    double log_C = 0.0;  // natural log of the constant C in T <= C eps^(-kappa)
};

/// Explicit lifespan constant. For the scale-invariant field
///   C = ( ((1+d)/d)^(a+1) 4 e^S / M 2^(mu/2) s^-(m + eta/(2p)) (2+s)^(eta/2+a+1+m) )^kappa,
/// otherwise, with ell >= 0,
///   C = ( ((1+d)/d)^(a+1) 4 e^S / M s^-(m + ell/p) (2+s)^(ell+a+1+m) )^kappa
/// and with ell < 0
///   C = ( ((1+d)/d)^(a+1) 4 e^S / M s^(-m+ell) (2+s)^(a+1+m-ell/p) )^kappa.
/// Empty when kappa is undefined (p outside the range) or ell is infinite.
inline std::optional<TheoryBound> theory_bound(const ProblemSpec& spec, const BlowupRegion& region,
                                               CRecursion recursion = CRecursion::sequences) {
    const AsymptoticProfile prof = field_profile(spec.field);
    if (!prof.determinate || !prof.ell.is_finite())
        return std::nullopt;
    const double ell = prof.ell.value();
    const double p = spec.p, a = spec.alpha(), s = region.sigma_n, d = region.delta;
    const int m = spec.m();
    double kappa;
    try {
        kappa = lifespan_kappa(p, a, prof.gamma, ell, spec.j).value.value();
    } catch (const DomainError&) {
        return std::nullopt;
    }
    const double S = compute_K_and_S(p, m, spec.j, recursion).S_pK;
    double inner = (a + 1.0) * std::log((1.0 + d) / d) + std::log(4.0) + S - std::log(spec.M());
    if (spec.field.name == "scale_invariant") {
        inner += prof.gamma * std::log(2.0);
        inner += -(m + ell / p) * std::log(s) + (ell + a + 1.0 + m) * std::log(2.0 + s);
    } else if (ell >= 0.0) {
        inner += -(m + ell / p) * std::log(s) + (ell + a + 1.0 + m) * std::log(2.0 + s);
    } else {
        inner += (-m + ell) * std::log(s) + (a + 1.0 + m - ell / p) * std::log(2.0 + s);
    }
    return TheoryBound{kappa, kappa * inner};
}

struct ScalingFit {
    double slope = 0.0;  // d log T / d log eps
    double intercept = 0.0;
    double stderr_slope = 0.0;
    int used = 0;
    double decades = 0.0;
    std::optional<double> kappa_theory;
    std::optional<double> log_C_theory;
    int bound_violations = 0;  // records with T > C eps^(-kappa)
};

/// Least squares on (log eps, log T) over blow-up records, with the theory
/// exponent and constant attached.
inline ScalingFit fit_scaling(const std::vector<LifespanRecord>& records, const ProblemSpec& spec,
                              const BlowupRegion& region, CRecursion recursion = CRecursion::sequences) {
    std::vector<double> x, y;
    for (const auto& r : records)
        if (r.usable()) {
            x.push_back(std::log(r.eps));
            y.push_back(std::log(*r.T));
        }
    if (x.size() < 4)
        throw DomainError("fit_scaling: insufficient data, need >= 4 blow-up records (have " +
                          std::to_string(x.size()) + ")");
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const double decades = (*hi - *lo) / std::log(10.0);
    if (decades < 1.0 - 1e-12)
        throw DomainError("fit_scaling: insufficient data, eps must span >= 1 decade");
    const LinearFit lf = least_squares(x, y);
    ScalingFit f;
    f.slope = lf.slope;
    f.intercept = lf.intercept;
    f.stderr_slope = lf.stderr_slope;
    f.used = lf.points;
    f.decades = decades;
    if (const auto tb = theory_bound(spec, region, recursion)) {
        f.kappa_theory = tb->kappa;
        f.log_C_theory = tb->log_C;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (y[i] > tb->log_C - tb->kappa * x[i])
                ++f.bound_violations;
    }
    return f;
}

// ---------------------------------------------------------------------------
// Envelopes against the solver

struct EnvelopeRow {
    double t = 0.0;
    double r = 0.0;
    int k = 1;
    double log_envelope = 0.0;
    double u = 0.0;
    double J = 0.0;
};

struct EnvelopeReport {
    std::vector<EnvelopeRow> rows;
    // First (t, k) on the line where J > 0 and the envelope passes DBL_MAX.
    std::optional<std::pair<double, int>> first_overflow;
};

/// Envelopes k = 1..k_max against the numerical u along r = (1+sigma_n) t.
/// Times outside the grid or the region are skipped.
inline EnvelopeReport envelope_report(const SolutionGrid& grid, const ProblemSpec& spec, const IterationParams& ip,
                                      int k_max, const std::vector<double>& line_times,
                                      const ExtremaOptions& xopt = {}) {
    const BlowupRegion region{ip.sigma_n, ip.delta};
    const ExtremalEnvelope env{&spec.field, xopt};
    const double guard = std::log(DBL_MAX);
    EnvelopeReport rep;
    for (double t : line_times) {
        const double r = region.line_radius(t);
        if (!region.contains(t, r) || grid.times.empty() || t > grid.times.back() || r > grid.r_max)
            continue;
        const double J = J_functional(t, r, spec, ip, xopt);
        const double u = grid.value(t, r);
        IterationState s = initial_state(ip);
        for (int k = 1; k <= k_max; ++k) {
            if (k > 1)
                s = step(s, ip);
            const double le = log_envelope(t, r, s, ip, env);
            rep.rows.push_back({t, r, k, le, u, J});
            if (!rep.first_overflow && J > 0.0 && le > guard)
                rep.first_overflow = std::pair{t, k};
        }
    }
    return rep;
}

struct DominationReport {
    int samples = 0;
    int violations = 0;
    double worst_ratio = 0.0;  // max envelope / u
    double worst_t = 0.0;
    double worst_r = 0.0;
};

/// Envelope k against the numerical u at stored (t, r) nodes of the region
/// with r <= r_limit. A sample violates when envelope > (1 + slack) u.
inline DominationReport envelope_domination(const SolutionGrid& grid, const ProblemSpec& spec,
                                            const IterationParams& ip, int k, double slack, double r_limit,
                                            int max_samples = 400, const ExtremaOptions& xopt = {}) {
    const BlowupRegion region{ip.sigma_n, ip.delta};
    const ExtremalEnvelope env{&spec.field, xopt};
    const IterationState s = state_at(k, ip);
    std::vector<std::pair<std::size_t, std::size_t>> pts;
    for (std::size_t q = 1; q < grid.times.size(); ++q)
        for (std::size_t i = 1; i < grid.nr() && grid.radius(i) <= r_limit; ++i)
            if (region.contains(grid.times[q], grid.radius(i)))
                pts.emplace_back(q, i);
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / static_cast<std::size_t>(max_samples));
    DominationReport rep;
    for (std::size_t n = 0; n < pts.size(); n += stride) {
        const auto [q, i] = pts[n];
        const double t = grid.times[q], r = grid.radius(i);
        const double e = std::exp(log_envelope(t, r, s, ip, env));
        const double u = grid.slices[q][i];
        const double ratio = u > 0.0 ? e / u : HUGE_VAL;
        ++rep.samples;
        if (ratio > 1.0 + slack)
            ++rep.violations;
        if (ratio > rep.worst_ratio) {
            rep.worst_ratio = ratio;
            rep.worst_t = t;
            rep.worst_r = r;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Output

namespace detail {
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}
}  // namespace detail

inline void write_records_csv(const std::vector<LifespanRecord>& records, std::ostream& os) {
    os << "# eps: initial data size\n"
          "# T: first time max|u| on the observation window reaches the threshold (empty if none)\n"
          "# outcome: blow-up verdict after threshold x10 and half-mesh checks\n"
          "# sensitivity: relative change of T when the threshold grows tenfold\n"
          "# refinement_spread: relative change of T when dr is halved\n"
          "# t_max, dr: horizon and radial step of the accepted run\n"
          "# spec_hash: FNV-1a of the problem description without eps\n";
    os << "eps,T,outcome,sensitivity,refinement_spread,t_max,dr,r_at_blowup,spec_hash,diagnostic\n";
    for (const auto& r : records) {
        std::string diag = r.diagnostic;
        std::replace(diag.begin(), diag.end(), ',', ';');
        std::replace(diag.begin(), diag.end(), '\n', ' ');
        char hash[20];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.spec_hash));
        os << detail::num(r.eps) << ',' << (r.T ? detail::num(*r.T) : "") << ',' << outcome_name(r.outcome) << ','
           << detail::num(r.sensitivity) << ',' << detail::num(r.refinement_spread) << ',' << detail::num(r.t_max)
           << ',' << detail::num(r.dr) << ',' << detail::num(r.r_at_blowup) << ',' << hash << ',' << diag << '\n';
    }
}

inline void write_fit_summary(const ScalingFit& f, std::ostream& os) {
    os << "# slope: least-squares d log T / d log eps over blow-up records\n"
          "# kappa_theory: lifespan exponent, T <= C eps^(-kappa)\n"
          "# log_C_theory: natural log of the explicit lifespan constant\n";
    os << "slope," << detail::num(f.slope) << "\nintercept," << detail::num(f.intercept) << "\nstderr,"
       << detail::num(f.stderr_slope) << "\nrecords_used," << f.used << "\ndecades," << detail::num(f.decades)
       << "\nkappa_theory," << (f.kappa_theory ? detail::num(*f.kappa_theory) : "") << "\nlog_C_theory,"
       << (f.log_C_theory ? detail::num(*f.log_C_theory) : "") << "\nbound_violations," << f.bound_violations
       << '\n';
}

/// Log-log scatter of (eps, T) with the fitted line and, when it falls in
/// the plotted range, the theory bound C eps^(-kappa).
inline void write_sweep_svg(const std::vector<LifespanRecord>& records, const std::optional<ScalingFit>& fit,
                            std::ostream& os) {
    const double W = 640, H = 480, L = 70, R = 20, T = 30, B = 60;
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : records)
        if (r.usable())
            pts.emplace_back(std::log10(r.eps), std::log10(*r.T));
    double x0 = -2.0, x1 = 0.0, y0 = 0.0, y1 = 1.0;
    if (!pts.empty()) {
        x0 = x1 = pts[0].first;
        y0 = y1 = pts[0].second;
        for (auto [x, y] : pts) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    x0 = std::floor(x0 - 0.1);
    x1 = std::ceil(x1 + 0.1);
    y0 = std::floor(y0 - 0.1);
    y1 = std::ceil(y1 + 0.1);
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
    using detail::num;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double x = x0; x <= x1 + 1e-9; x += 1.0)
        os << "<text x=\"" << num(px(x)) << "\" y=\"" << H - B + 20 << "\" font-size=\"12\" text-anchor=\"middle\">1e"
           << num(x) << "</text>\n";
    for (double y = y0; y <= y1 + 1e-9; y += 1.0)
        os << "<text x=\"" << L - 8 << "\" y=\"" << num(py(y) + 4) << "\" font-size=\"12\" text-anchor=\"end\">1e"
           << num(y) << "</text>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\" font-size=\"14\" text-anchor=\"middle\">eps</text>\n";
    os << "<text x=\"18\" y=\"" << H / 2 << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << H / 2 << ")\">T</text>\n";
    for (auto [x, y] : pts)
        os << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"4\" fill=\"steelblue\"/>\n";
    if (fit) {
        // log10 T = intercept/ln10 + slope log10 eps
        auto line = [&](double x) { return fit->intercept / std::log(10.0) + fit->slope * x; };
        os << "<line x1=\"" << num(px(x0)) << "\" y1=\"" << num(py(line(x0))) << "\" x2=\"" << num(px(x1))
           << "\" y2=\"" << num(py(line(x1))) << "\" stroke=\"firebrick\"/>\n";
        os << "<text x=\"" << L + 10 << "\" y=\"" << T + 18 << "\" font-size=\"12\">fit slope " << num(fit->slope);
        if (fit->kappa_theory)
            os << ", theory -" << num(*fit->kappa_theory);
        os << "</text>\n";
        if (fit->kappa_theory && fit->log_C_theory) {
            const double c10 = *fit->log_C_theory / std::log(10.0);
            auto bound = [&](double x) { return c10 - *fit->kappa_theory * x; };
            if (bound(x1) <= y1) {
                os << "<line x1=\"" << num(px(x0)) << "\" y1=\"" << num(py(bound(x0))) << "\" x2=\"" << num(px(x1))
                   << "\" y2=\"" << num(py(bound(x1))) << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
            } else {
                os << "<text x=\"" << L + 10 << "\" y=\"" << T + 36
                   << "\" font-size=\"12\">theory bound above the plot: log10 C = " << num(c10) << "</text>\n";
            }
        }
    }
    os << "</svg>\n";
}

}  // namespace blowup
