#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "criterion.hpp"
#include "extrema.hpp"
#include "harness.hpp"
#include "iteration.hpp"
#include "model.hpp"
#include "solver.hpp"

namespace blowup {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& where, int line, const std::string& key, const std::string& msg)
        : std::runtime_error(format(where, line, key, msg)), line_(line), key_(key) {}

    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    static std::string format(const std::string& where, int line, const std::string& key, const std::string& msg) {
        std::string s = where;
        if (line > 0)
            s += ":" + std::to_string(line);
        if (!key.empty())
            s += ": key '" + key + "'";
        return s + ": " + msg;
    }

    int line_;
    std::string key_;
};

/// Everything one CLI invocation needs, with every default materialized.
struct ExperimentConfig {
    // [problem]
    int n = 3;
    double p = 2.0;
    int j = 0;
    double alpha = 1.0;
    double M = 1.0;
    std::string data_shape = "power";
    std::string nonlinearity = "power";
    double eps = 1.0;
    std::vector<double> eps_list;  // non-empty: sweep mode

    // [field]
    std::string field = "zero";
    std::vector<double> params;
    std::vector<double> t_nodes, a0_values, r_nodes, u_values;  // field = tabulated

    // [region]
    double sigma_n = 0.5;
    double delta = 0.1;
    std::string window = "theorem";
    std::string recursion = "sequences";

    // [solver]
    double dr = 1.0 / 64.0;
    double cfl = 0.5;
    double r_obs = -1.0;
    double margin = -1.0;
    double t_max = 64.0;
    double threshold = 1e8;
    double sensitivity_tol = 0.02;
    double refinement_tol = 0.05;
    std::string mode = "transformed_u";
    double store_interval = 0.0;
    double t_start = 16.0;
    double t_limit = 1e6;
    int cells_per_window = 2048;
    double dr_max = 8.0;

    // [analysis]
    double horizon = 1e6;
    double slope_margin = 0.01;
    int k_max = 5;

    // [output]
    std::string directory = "out";
    std::string formats = "csv,svg";

    bool sweep_mode() const { return !eps_list.empty(); }
    bool wants(const std::string& fmt) const { return ("," + formats + ",").find("," + fmt + ",") != std::string::npos; }

    ProblemSpec spec() const;
    BlowupRegion region() const { return {sigma_n, delta}; }
    MeshConfig mesh() const;
    DetectionPolicy policy() const { return {threshold, sensitivity_tol, refinement_tol}; }
    SolverMode solver_mode() const { return mode == "direct_v" ? SolverMode::direct_v : SolverMode::transformed_u; }
    CRecursion c_recursion() const { return recursion == "in_text" ? CRecursion::in_text : CRecursion::sequences; }
    Window criterion_window() const { return window == "main_theorem" ? Window::main_theorem : Window::theorem; }
    SweepOptions sweep_options() const;
};

inline ProblemSpec ExperimentConfig::spec() const {
    DataProfile v1;
    v1.M = M;
    v1.alpha = alpha;
    v1.shape = data_shape == "smooth"     ? DataProfile::Shape::smooth
               : data_shape == "constant" ? DataProfile::Shape::constant
                                          : DataProfile::Shape::power;
    ProblemSpec s;
    s.n = n;
    s.p = p;
    s.j = j;
    s.eps = eps_list.empty() ? eps : eps_list.front();
    s.field = field == "tabulated" ? tabulated_field(t_nodes, a0_values, r_nodes, u_values, v1)
                                   : catalog_field(field, params, v1);
    if (nonlinearity == "zero")
        s.field.F = Nonlinearity::zero();
    return s;
}

inline MeshConfig ExperimentConfig::mesh() const {
    MeshConfig m;
    m.dr = dr;
    m.cfl = cfl;
    m.r_obs = r_obs;
    m.margin = margin;
    m.store_interval = store_interval;
    return m;
}

inline SweepOptions ExperimentConfig::sweep_options() const {
    SweepOptions o;
    o.mesh = mesh();
    o.t_start = t_start;
    o.t_limit = t_limit;
    o.cells_per_window = cells_per_window;
    o.dr_max = dr_max;
    o.mode = solver_mode();
    o.policy = policy();
    return o;
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + fmt17(v[i]);
    return s;
}

struct ConfigReader {
    std::string where;
    int line = 0;
    std::string key;

    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(where, line, key, msg); }

    double number(const std::string& v) const {
        std::size_t used = 0;
        double x;
        try {
            x = std::stod(v, &used);
        } catch (const std::exception&) {
            fail("expected a number, got '" + v + "'");
        }
        if (used != v.size())
            fail("expected a number, got '" + v + "'");
        return x;
    }

    int integer(const std::string& v) const {
        const double x = number(v);
        if (x != static_cast<double>(static_cast<int>(x)))
            fail("expected an integer, got '" + v + "'");
        return static_cast<int>(x);
    }

    std::vector<double> list(const std::string& v) const {
        std::vector<double> out;
        if (trim(v).empty())
            return out;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ','))
            out.push_back(number(trim(item)));
        return out;
    }

    std::string choice(const std::string& v, std::initializer_list<const char*> allowed) const {
        std::string opts;
        for (const char* a : allowed) {
            if (v == a)
                return v;
            opts += std::string(opts.empty() ? "" : ", ") + a;
        }
        fail("'" + v + "' is not one of {" + opts + "}");
    }
};

}  // namespace detail

/// Parses the INI-style format: [section] headers, `key = value` lines,
/// `#` or `;` comments. Unknown sections or keys are errors.
inline ExperimentConfig parse_config_text(const std::string& text, const std::string& where = "config") {
    ExperimentConfig c;
    detail::ConfigReader rd{where, 0, {}};
    std::map<std::string, int> seen;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    std::map<std::string, int> key_line;
    while (std::getline(in, raw)) {
        ++rd.line;
        rd.key.clear();
        const std::string s = detail::trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';')
            continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                rd.fail("malformed section header '" + s + "'");
            section = detail::trim(s.substr(1, s.size() - 2));
            if (section != "problem" && section != "field" && section != "region" && section != "solver" &&
                section != "analysis" && section != "output")
                rd.fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            rd.fail("expected 'key = value', got '" + s + "'");
        const std::string k = detail::trim(s.substr(0, eq));
        std::string v = detail::trim(s.substr(eq + 1));
        rd.key = section.empty() ? k : section + "." + k;
        if (section.empty())
            rd.fail("key outside of any section");
        if (seen.count(rd.key))
            rd.fail("duplicate key (first set on line " + std::to_string(seen[rd.key]) + ")");
        seen[rd.key] = rd.line;

        const std::string& K = rd.key;
        if (K == "problem.n") c.n = rd.integer(v);
        else if (K == "problem.p") c.p = rd.number(v);
        else if (K == "problem.j") c.j = rd.integer(v);
        else if (K == "problem.alpha") c.alpha = rd.number(v);
        else if (K == "problem.M") c.M = rd.number(v);
        else if (K == "problem.data_shape") c.data_shape = rd.choice(v, {"power", "smooth", "constant"});
        else if (K == "problem.nonlinearity") c.nonlinearity = rd.choice(v, {"power", "zero"});
        else if (K == "problem.eps") c.eps = rd.number(v);
        else if (K == "problem.eps_list") c.eps_list = rd.list(v);
        else if (K == "field.name") c.field = v;
        else if (K == "field.params") c.params = rd.list(v);
        else if (K == "field.t_nodes") c.t_nodes = rd.list(v);
        else if (K == "field.a0_values") c.a0_values = rd.list(v);
        else if (K == "field.r_nodes") c.r_nodes = rd.list(v);
        else if (K == "field.u_values") c.u_values = rd.list(v);
        else if (K == "region.sigma_n") c.sigma_n = rd.number(v);
        else if (K == "region.delta") c.delta = rd.number(v);
        else if (K == "region.window") c.window = rd.choice(v, {"theorem", "main_theorem"});
        else if (K == "region.recursion") c.recursion = rd.choice(v, {"sequences", "in_text"});
        else if (K == "solver.dr") c.dr = rd.number(v);
        else if (K == "solver.cfl") c.cfl = rd.number(v);
        else if (K == "solver.r_obs") c.r_obs = rd.number(v);
        else if (K == "solver.margin") c.margin = rd.number(v);
        else if (K == "solver.t_max") c.t_max = rd.number(v);
        else if (K == "solver.threshold") c.threshold = rd.number(v);
        else if (K == "solver.sensitivity_tol") c.sensitivity_tol = rd.number(v);
        else if (K == "solver.refinement_tol") c.refinement_tol = rd.number(v);
        else if (K == "solver.mode") c.mode = rd.choice(v, {"transformed_u", "direct_v"});
        else if (K == "solver.store_interval") c.store_interval = rd.number(v);
        else if (K == "solver.t_start") c.t_start = rd.number(v);
        else if (K == "solver.t_limit") c.t_limit = rd.number(v);
        else if (K == "solver.cells_per_window") c.cells_per_window = rd.integer(v);
        else if (K == "solver.dr_max") c.dr_max = rd.number(v);
        else if (K == "analysis.horizon") c.horizon = rd.number(v);
        else if (K == "analysis.slope_margin") c.slope_margin = rd.number(v);
        else if (K == "analysis.k_max") c.k_max = rd.integer(v);
        else if (K == "output.directory") c.directory = v;
        else if (K == "output.formats") c.formats = v;
        else rd.fail("unknown key");
        key_line[K] = rd.line;
    }

    // Range checks, reported against the line that set the key.
    auto check = [&](bool ok, const std::string& key, const std::string& msg) {
        if (!ok) {
            const auto it = key_line.find(key);
            throw ConfigError(where, it == key_line.end() ? 0 : it->second, key, msg);
        }
    };
    check(c.n >= 2, "problem.n", "dimension n must be >= 2");
    check(c.p > 1.0, "problem.p", "exponent p must exceed 1");
    check(c.j == 0 || c.j == 1, "problem.j", "j must be 0 or 1");
    check(c.alpha > -1.0, "problem.alpha", "alpha must exceed -1");
    check(c.M > 0.0, "problem.M", "M must be positive");
    check(c.eps > 0.0, "problem.eps", "eps must be positive");
    for (double e : c.eps_list)
        check(e > 0.0, "problem.eps_list", "every eps must be positive");
    check(c.sigma_n > 0.0 && c.sigma_n <= 1.0, "region.sigma_n",
          "sigma_n = " + detail::fmt17(c.sigma_n) + " is out of range; the region needs sigma_n in (0,1), with 1 accepted as the boundary case");
    check(c.delta > 0.0, "region.delta", "delta must be positive");
    check(c.dr > 0.0, "solver.dr", "dr must be positive");
    check(c.cfl > 0.0 && c.cfl <= 0.9, "solver.cfl", "CFL number must lie in (0, 0.9]");
    check(c.t_max > 0.0, "solver.t_max", "t_max must be positive");
    check(c.threshold > 0.0, "solver.threshold", "threshold must be positive");
    check(c.t_start > 0.0 && c.t_limit >= c.t_start, "solver.t_limit", "need 0 < t_start <= t_limit");
    check(c.cells_per_window >= 16, "solver.cells_per_window", "cells_per_window must be >= 16");
    check(c.dr_max >= c.dr, "solver.dr_max", "dr_max must be >= dr");
    check(c.horizon > 1.0, "analysis.horizon", "horizon must exceed 1");
    check(c.k_max >= 1, "analysis.k_max", "k_max must be >= 1");
    try {
        (void)c.spec();
    } catch (const DomainError& e) {
        check(false, c.field == "tabulated" ? "field.name" : "field.params", e.what());
    }
    return c;
}

inline ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path, 0, "", "cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

/// Canonical manifest with every key; it parses back to the same config.
/// Extra result lines are written as `#` comments.
inline void write_manifest(const ExperimentConfig& c, std::ostream& os, const std::vector<std::string>& notes = {}) {
    using detail::fmt17;
    using detail::join;
    os << "[problem]\n"
       << "n = " << c.n << "\np = " << fmt17(c.p) << "\nj = " << c.j << "\nalpha = " << fmt17(c.alpha)
       << "\nM = " << fmt17(c.M) << "\ndata_shape = " << c.data_shape << "\nnonlinearity = " << c.nonlinearity
       << "\neps = " << fmt17(c.eps) << "\neps_list = " << join(c.eps_list) << "\n\n";
    os << "[field]\nname = " << c.field << "\nparams = " << join(c.params) << '\n';
    if (c.field == "tabulated")
        os << "t_nodes = " << join(c.t_nodes) << "\na0_values = " << join(c.a0_values) << "\nr_nodes = "
           << join(c.r_nodes) << "\nu_values = " << join(c.u_values) << '\n';
    os << "\n[region]\nsigma_n = " << fmt17(c.sigma_n) << "\ndelta = " << fmt17(c.delta) << "\nwindow = " << c.window
       << "\nrecursion = " << c.recursion << "\n\n";
    os << "[solver]\ndr = " << fmt17(c.dr) << "\ncfl = " << fmt17(c.cfl) << "\nr_obs = " << fmt17(c.r_obs)
       << "\nmargin = " << fmt17(c.margin) << "\nt_max = " << fmt17(c.t_max) << "\nthreshold = " << fmt17(c.threshold)
       << "\nsensitivity_tol = " << fmt17(c.sensitivity_tol) << "\nrefinement_tol = " << fmt17(c.refinement_tol)
       << "\nmode = " << c.mode << "\nstore_interval = " << fmt17(c.store_interval) << "\nt_start = "
       << fmt17(c.t_start) << "\nt_limit = " << fmt17(c.t_limit) << "\ncells_per_window = " << c.cells_per_window
       << "\ndr_max = " << fmt17(c.dr_max) << "\n\n";
    os << "[analysis]\nhorizon = " << fmt17(c.horizon) << "\nslope_margin = " << fmt17(c.slope_margin)
       << "\nk_max = " << c.k_max << "\n\n";
    os << "[output]\ndirectory = " << c.directory << "\nformats = " << c.formats << '\n';
    if (!notes.empty()) {
        os << '\n';
        for (const auto& n : notes)
            os << "# " << n << '\n';
    }
}

}  // namespace blowup
