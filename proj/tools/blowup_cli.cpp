#include <blowup/blowup.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace blowup;

namespace {

// Exit codes. simulate distinguishes blow-up (0) from no blow-up (1).
constexpr int kOk = 0;
constexpr int kNoBlowup = 1;
constexpr int kInconclusive = 2;
constexpr int kNumericalFailure = 3;
constexpr int kConfigError = 4;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string ext(const ExtendedReal& x) { return x.is_finite() ? num(x.value()) : x.to_string(); }

struct Common {
    std::string config;
    std::string out;
};

ExperimentConfig load(const Common& c) {
    ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : parse_config(c.config);
    if (!c.out.empty())
        cfg.directory = c.out;
    return cfg;
}

std::ofstream open_out(const ExperimentConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.directory);
    const fs::path path = fs::path(cfg.directory) / name;
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    return os;
}

void save_manifest(const ExperimentConfig& cfg, const std::string& cmd, const std::vector<std::string>& notes) {
    auto os = open_out(cfg, cmd + "_manifest.ini");
    std::vector<std::string> all{"command: " + cmd};
    all.insert(all.end(), notes.begin(), notes.end());
    write_manifest(cfg, os, all);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        v.push_back(std::stod(item));
    return v;
}

// ---------------------------------------------------------------------------

int cmd_exponents(int n, const std::string& alphas, const std::string& gammas, const std::string& ells,
                  const std::string& js, double p, const std::string& out) {
    std::ostringstream os;
    os << "# p_strauss_glassey: critical power of the unperturbed problem in dimension n\n"
          "# p_slow_decay: critical power 1 + 2/alpha under data decay (1+r)^(-alpha-1)\n"
          "# p_shifted: critical power with time field gamma and spatial potential growth ell (inf = every p)\n"
          "# kappa: lifespan exponent at the given p (empty outside the blow-up range)\n";
    os << "n,alpha,gamma,ell,j,p_strauss_glassey,p_slow_decay,p_shifted,p,kappa\n";
    for (double j : parse_list(js))
        for (double a : parse_list(alphas))
            for (double g : parse_list(gammas))
                for (double l : parse_list(ells)) {
                    const int jj = static_cast<int>(j);
                    std::string shifted, kappa;
                    try {
                        shifted = ext(shifted_critical(a, g, l, jj).value);
                    } catch (const DomainError&) {
                        shifted = "empty";
                    }
                    try {
                        kappa = num(lifespan_kappa(p, a, g, l, jj).value.value());
                    } catch (const DomainError&) {
                    }
                    os << n << ',' << num(a) << ',' << num(g) << ',' << num(l) << ',' << jj << ','
                       << ext(strauss_glassey(n, jj).value) << ',' << ext(slow_decay_critical(a).value) << ','
                       << shifted << ',' << num(p) << ',' << kappa << '\n';
                }
    if (out.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(out);
        f << os.str();
    }
    return kOk;
}

int cmd_criterion(const ExperimentConfig& cfg) {
    const ProblemSpec spec = cfg.spec();
    const BlowupRegion region = cfg.region();
    const AsymptoticProfile prof = field_profile(spec.field, cfg.horizon);
    const Taxonomy tax = classify(prof, spec.alpha(), spec.j);
    DivergenceOptions dopt;
    dopt.horizon = cfg.horizon;
    dopt.slope_margin = cfg.slope_margin;
    dopt.window = cfg.criterion_window();
    const DivergenceEvidence ev = divergence_evidence(spec, region, dopt);
    const IterationParams ip = make_iteration_params(spec, region, cfg.c_recursion());
    const auto t0 = first_positive_time(spec, ip, cfg.horizon);

    auto os = open_out(cfg, "criterion.csv");
    os << "# t: time sample on the geometric grid of the last decades\n"
          "# phi: interaction functional ((2-j)/(p-1)-alpha) log t - max G + min U/p - max U over the window\n";
    os << "t,phi\n";
    for (auto [t, v] : ev.samples)
        os << num(t) << ',' << num(v) << '\n';

    {
        auto js = open_out(cfg, "criterion_J.csv");
        js << "# t: time on the line r = (1+sigma_n) t inside the blow-up region\n"
              "# r: radius (1+sigma_n) t\n"
              "# J: exponent multiplying p^k in the iteration estimate; J > 0 forces blow-up\n";
        js << "t,r,J\n";
        const double start = region.line_entry_time();
        const int per_decade = 8;
        for (double t = start; t <= cfg.horizon * (1.0 + 1e-12); t *= std::pow(10.0, 1.0 / per_decade)) {
            const double r = region.line_radius(t);
            js << num(t) << ',' << num(r) << ',' << num(J_functional(t, r, spec, ip)) << '\n';
        }
    }

    std::vector<std::string> notes{
        "gamma = " + num(prof.gamma), "ell = " + ext(prof.ell), "regime = " + std::string(regime_name(tax.regime)),
        "critical_p = " + (tax.regime == Regime::unclassified || tax.regime == Regime::no_conclusion
                               ? std::string("none")
                               : ext(tax.critical)),
        "predicts_blowup = " + std::string(tax.predicts_blowup(spec.p) ? "yes" : "no"),
        "divergence_evidence = " + std::string(ev.passed ? "passed" : "failed") + " (slope " + num(ev.slope) + ")",
        "first_positive_J_time = " + (t0 ? num(*t0) : std::string("none"))};
    if (!tax.diagnostic.empty())
        notes.push_back("diagnostic = " + tax.diagnostic);
    for (const auto& n : notes)
        std::cout << n << '\n';
    save_manifest(cfg, "criterion", notes);
    return kOk;
}

int cmd_iterate(const ExperimentConfig& cfg, int k_max) {
    const ProblemSpec spec = cfg.spec();
    const IterationParams ip = make_iteration_params(spec, cfg.region(), cfg.c_recursion());
    auto os = open_out(cfg, "iterate.csv");
    os << "# a, b, d, l: exponents of the k-th lower bound u >= C t^a/(r^m (r+t)^b) e^(-l Gbar) e^(d Ubar) e^(-l Ubbar)\n"
          "# logC: log of the constant C_k from the recursion\n"
          "# logC_bound: p^(k-1) (log C0 - S_p(k-1)), the lower bound for log C_k\n";
    os << "k,a,b,d,l,logC,logC_bound\n";
    IterationState s = initial_state(ip);
    for (int k = 1; k <= k_max; ++k) {
        if (k > 1)
            s = step(s, ip);
        const std::string bound = k > 1 ? num(log_lower_bound_C(k - 1, ip)) : num(ip.log_C0());
        os << k << ',' << num(s.a) << ',' << num(s.b) << ',' << num(s.d) << ',' << num(s.l) << ',' << num(s.logC)
           << ',' << bound << '\n';
    }
    std::vector<std::string> notes{"C0 = " + num(ip.C0), "K = " + num(ip.K), "S_pK = " + num(ip.S_pK)};
    for (const auto& n : notes)
        std::cout << n << '\n';
    save_manifest(cfg, "iterate", notes);
    return kOk;
}

int cmd_simulate(const ExperimentConfig& cfg) {
    const ProblemSpec spec = cfg.spec();
    const MeshConfig mesh = cfg.mesh();
    const SimulationResult run = simulate(spec, mesh, cfg.t_max, cfg.solver_mode(), cfg.policy());
    const BlowupVerdict v = detect_blowup(spec, mesh, cfg.t_max, cfg.solver_mode(), cfg.policy(), &run);
    if (cfg.wants("csv")) {
        auto os = open_out(cfg, "simulate_grid.csv");
        write_grid_csv(run.grid, os);
    }
    std::vector<std::string> notes{"outcome = " + std::string(outcome_name(v.outcome)),
                                   "T_estimate = " + (v.T_estimate ? num(*v.T_estimate) : std::string("none")),
                                   "sensitivity = " + num(v.sensitivity),
                                   "refinement_spread = " + num(v.refinement_spread),
                                   "r_at_blowup = " + num(v.r_at_blowup), "steps = " + std::to_string(run.steps),
                                   "halvings = " + std::to_string(run.halvings)};
    if (!v.diagnostic.empty())
        notes.push_back("diagnostic = " + v.diagnostic);
    for (const auto& n : notes)
        std::cout << n << '\n';
    save_manifest(cfg, "simulate", notes);
    switch (v.outcome) {
    case BlowupVerdict::Outcome::blew_up: return kOk;
    case BlowupVerdict::Outcome::no_blowup: return kNoBlowup;
    case BlowupVerdict::Outcome::inconclusive: return kInconclusive;
    case BlowupVerdict::Outcome::numerical_failure: return kNumericalFailure;
    }
    return kNumericalFailure;
}

int cmd_sweep(ExperimentConfig cfg) {
    if (cfg.eps_list.empty())
        cfg.eps_list = geometric_eps(1e-2, 1.0, 6);
    const ProblemSpec spec = cfg.spec();
    const auto records = lifespan_sweep(spec, cfg.eps_list, cfg.sweep_options());
    {
        auto os = open_out(cfg, "sweep_records.csv");
        write_records_csv(records, os);
    }
    std::optional<ScalingFit> fit;
    std::vector<std::string> notes;
    try {
        fit = fit_scaling(records, spec, cfg.region(), cfg.c_recursion());
    } catch (const DomainError& e) {
        notes.push_back(std::string("fit = ") + e.what());
    }
    if (fit) {
        auto os = open_out(cfg, "sweep_fit.csv");
        write_fit_summary(*fit, os);
        notes.push_back("slope = " + num(fit->slope));
        notes.push_back("kappa_theory = " + (fit->kappa_theory ? num(*fit->kappa_theory) : std::string("none")));
        notes.push_back("bound_violations = " + std::to_string(fit->bound_violations));
    }
    if (cfg.wants("svg")) {
        auto os = open_out(cfg, "sweep.svg");
        write_sweep_svg(records, fit, os);
    }
    int usable = 0;
    for (const auto& r : records)
        usable += r.usable();
    notes.push_back("blow_up_records = " + std::to_string(usable) + "/" + std::to_string(records.size()));
    for (const auto& n : notes)
        std::cout << n << '\n';
    save_manifest(cfg, "sweep", notes);
    return kOk;
}

int cmd_verify(double tol) {
    using namespace blowup::oracles;
    std::vector<OracleReport> reps;
    auto one = [](double) { return 1.0; };
    auto inv = [](double l) { return 1.0 / l; };
    auto lin = [](double l) { return l; };
    reps.push_back(compare("spherical_means psi=1", "t=0.7 r=2", 0.7, spherical_means_n3(one, 0.7, 2.0)));
    reps.push_back(compare("spherical_means psi=1/l", "t=0.7 r=2", 0.35, spherical_means_n3(inv, 0.7, 2.0)));
    reps.push_back(compare("lower_bound psi=1 m=1", "t=1 r=3", 0.25, takamura_lower_bound(one, 1.0, 3.0, 1, 0.5)));
    reps.push_back(compare("lower_bound psi=l m=1", "t=1 r=3", (64.0 - 8.0) / 3.0 / 24.0,
                           takamura_lower_bound(lin, 1.0, 3.0, 1, 0.5)));
    for (auto [q, t] : {std::pair{0.0, 1.0}, {2.0, 1.0}, {2.5, 3.0}}) {
        const auto b = beta_integral(q, t);
        reps.push_back(compare("beta_integral", "q=" + num(q) + " t=" + num(t), b.exact, b.quadrature));
    }
    {
        // Linear n = 3 solver run against the spherical-means value.
        ProblemSpec s;
        s.field = catalog_field("zero", {});
        s.field.F = Nonlinearity::zero();
        s.field.v1.shape = DataProfile::Shape::smooth;
        // dr = 1/256 keeps the O(dr^2) error near 5e-7
        MeshConfig m;
        m.dr = 1.0 / 256;
        m.r_obs = 4.0;
        const auto run = simulate(s, m, 2.0);
        auto psi = [&](double l) { return s.eps * s.field.v1(l); };
        reps.push_back(compare("solver vs spherical_means", "t=2 r=3", spherical_means_n3(psi, 2.0, 3.0),
                               run.grid.value(2.0, 3.0)));
    }
    bool ok = true;
    std::cout << "name,inputs,oracle,candidate,abs_dev,rel_dev,status\n";
    for (const auto& r : reps) {
        const bool pass = r.within(tol);
        ok = ok && pass;
        std::cout << r.name << ',' << r.inputs << ',' << num(r.oracle) << ',' << num(r.candidate) << ','
                  << num(r.abs_dev) << ',' << num(r.rel_dev) << ',' << (pass ? "ok" : "FAIL") << '\n';
    }
    return ok ? kOk : kNumericalFailure;
}

int cmd_transform_check(const ExperimentConfig& cfg) {
    ProblemSpec spec = cfg.spec();
    MeshConfig mesh = cfg.mesh();
    const double t_end = std::min(cfg.t_max, 2.0);
    mesh.store_interval = 0.0;
    const auto u_run = simulate(spec, mesh, t_end, SolverMode::transformed_u);
    const auto v_run = simulate(spec, mesh, t_end, SolverMode::direct_v);
    const SolutionGrid v_as_u = to_u(v_run.grid, spec.field);
    const auto& a = u_run.grid.slices.back();
    const auto& b = v_as_u.slices.back();
    const double r_obs = std::min(mesh.effective_r_obs(t_end), u_run.grid.r_max);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.size() && u_run.grid.radius(i) <= r_obs; ++i) {
        diff = std::max(diff, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(a[i]));
    }
    double init = 0.0;
    const auto c = detail::radial_coefficients(spec, 200, 0.05, SolverMode::transformed_u);
    for (std::size_t i = 0; i < c.r.size(); ++i)
        init = std::max(init, std::abs(initial_velocity_u(spec, c.r[i]) - c.psi[i]));
    std::vector<std::string> notes{"t = " + num(t_end), "max_abs_u = " + num(scale),
                                   "max_cross_deviation = " + num(diff),
                                   "initial_velocity_deviation = " + num(init)};
    for (const auto& n : notes)
        std::cout << n << '\n';
    save_manifest(cfg, "transform-check", notes);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blow-up laboratory for semilinear waves with perturbed derivatives"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", common.config, "Experiment configuration (INI)")->check(CLI::ExistingFile);
        sub->add_option("-o,--out", common.out, "Output directory (overrides [output] directory)");
    };

    int n = 3;
    std::string alphas = "0.5,1,2,4", gammas = "0", ells = "0", js = "0,1", exp_out;
    double p = 2.0;
    auto* exponents = app.add_subcommand("exponents", "Critical exponent table over an (alpha, gamma, ell, j) grid");
    exponents->add_option("--n", n, "Dimension")->check(CLI::Range(2, 1000));
    exponents->add_option("--alpha", alphas, "Comma-separated alpha values");
    exponents->add_option("--gamma", gammas, "Comma-separated gamma values");
    exponents->add_option("--ell", ells, "Comma-separated ell values");
    exponents->add_option("--j", js, "Comma-separated j values (0, 1)");
    exponents->add_option("--p", p, "Power for the lifespan exponent column");
    exponents->add_option("-o,--out", exp_out, "CSV file (stdout when omitted)");

    auto* criterion = app.add_subcommand("criterion", "Asymptotics, taxonomy and divergence evidence");
    add_common(criterion);
    int k_iter = 0;
    auto* iterate = app.add_subcommand("iterate", "Lower-bound iteration sequences");
    add_common(iterate);
    iterate->add_option("--k", k_iter, "Number of iterates (default: [analysis] k_max)");
    auto* sim = app.add_subcommand("simulate", "Single run with blow-up detection");
    add_common(sim);
    auto* sweep = app.add_subcommand("sweep", "Lifespan sweep over eps and scaling fit");
    add_common(sweep);
    double tol = 1e-6;
    auto* verify = app.add_subcommand("verify", "Oracle comparison table");
    verify->add_option("--tol", tol, "Absolute deviation tolerance");
    auto* tcheck = app.add_subcommand("transform-check", "direct_v against transformed_u for one problem");
    add_common(tcheck);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    ExperimentConfig cfg;
    try {
        if (!exponents->parsed() && !verify->parsed())
            cfg = load(common);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (exponents->parsed())
            return cmd_exponents(n, alphas, gammas, ells, js, p, exp_out);
        if (criterion->parsed())
            return cmd_criterion(cfg);
        if (iterate->parsed())
            return cmd_iterate(cfg, k_iter > 0 ? k_iter : cfg.k_max);
        if (sim->parsed())
            return cmd_simulate(cfg);
        if (sweep->parsed())
            return cmd_sweep(cfg);
        if (verify->parsed())
            return cmd_verify(tol);
        if (tcheck->parsed())
            return cmd_transform_check(cfg);
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericalFailure;
    }
    return kOk;
}
