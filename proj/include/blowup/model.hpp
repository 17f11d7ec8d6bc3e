#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "extended_real.hpp"
#include "quadrature.hpp"

namespace blowup {

/// Invalid problem parameters or an argument outside an operation's domain.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using ScalarFn = std::function<double(double)>;
using SpaceTimeFn = std::function<double(double, double)>;

enum class Monotonicity { increasing, decreasing, none };

struct AsymptoticProfile {
    enum class Source { closed_form, numerically_estimated };

    double gamma = 0.0;  // lim s A0(s)
    ExtendedReal ell;    // lim U(xi) / log(xi)
    Source source = Source::closed_form;

    // Only meaningful for numerical estimates.
    bool determinate = true;
    double gamma_spread = 0.0;
    double ell_spread = 0.0;
    std::string diagnostic;
};

/// Initial velocity profile v1(r). The theory only uses the lower bound
/// M (1+r)^(-alpha-1); the other shapes dominate it.
struct DataProfile {
    enum class Shape {
        power,     // M (1+r)^(-alpha-1)
        smooth,    // M <r>^(-alpha-1), smooth at the origin
        constant,  // M, admissible for every alpha > -1
        custom
    };

    double M = 1.0;
    double alpha = 1.0;
    Shape shape = Shape::power;
    ScalarFn custom;

    double lower_bound(double r) const { return M * std::pow(1.0 + r, -alpha - 1.0); }

    double operator()(double r) const {
        switch (shape) {
        case Shape::power: return lower_bound(r);
        case Shape::smooth: return M * std::pow(1.0 + r * r, -0.5 * (alpha + 1.0));
        case Shape::constant: return M;
        case Shape::custom: return custom(r);
        }
        return 0.0;
    }

    static const char* shape_name(Shape s) {
        switch (s) {
        case Shape::power: return "power";
        case Shape::smooth: return "smooth";
        case Shape::constant: return "constant";
        case Shape::custom: return "custom";
        }
        return "?";
    }

    /// Throws DomainError unless v1 >= M (1+r)^(-alpha-1) on a sample of r > 0.
    void validate(double r_max = 1e4, int samples = 2000) const {
        if (!(M > 0.0))
            throw DomainError("data profile: M must be positive");
        if (!(alpha > -1.0))
            throw DomainError("data profile: alpha must exceed -1");
        if (shape == Shape::custom && !custom)
            throw DomainError("data profile: custom shape without a function");
        if (shape == Shape::constant && M > 1.0)
            throw DomainError("data profile: constant profile needs M <= 1 to dominate M(1+r)^(-alpha-1)");
        const double ratio = std::pow(r_max / 1e-3, 1.0 / (samples - 1));
        double r = 1e-3;
        for (int i = 0; i < samples; ++i, r *= ratio) {
            const double v = (*this)(r);
            if (!(v >= lower_bound(r) * (1.0 - 1e-12)))
                throw DomainError("data profile violates v1(r) >= M(1+r)^(-alpha-1) at r=" + std::to_string(r));
        }
    }
};

/// Nonlinearity F. The default is the pure power |s|^p, which attains the
/// lower bound F(s) >= |s|^p with equality.
struct Nonlinearity {
    enum class Kind { pure_power, zero, custom };

    Kind kind = Kind::pure_power;
    std::function<double(double, double)> custom;  // (s, p) -> F(s)

    double operator()(double s, double p) const {
        switch (kind) {
        case Kind::pure_power: return std::pow(std::abs(s), p);
        case Kind::zero: return 0.0;
        case Kind::custom: return custom(s, p);
        }
        return 0.0;
    }

    static Nonlinearity zero() { return {Kind::zero, {}}; }
};

/// One problem instance of perturbed derivatives: time field A0 with
/// antiderivative G, radial spatial field A = U'(r) x/r, mass-like term h,
/// nonlinearity F and data v1.
struct PerturbationField {
    std::string name = "zero";
    std::vector<double> params;

    ScalarFn A0;        // required
    ScalarFn A0_prime;  // optional, finite differences otherwise
    ScalarFn G;         // optional, adaptive quadrature of A0 otherwise
    ScalarFn U;         // required
    ScalarFn U_prime;   // required
    ScalarFn U_second;  // optional, finite differences of U' otherwise
    SpaceTimeFn h;      // optional, zero otherwise
    Nonlinearity F;
    DataProfile v1;

    Monotonicity U_shape = Monotonicity::none;
    Monotonicity G_shape = Monotonicity::none;
    std::optional<AsymptoticProfile> closed_profile;

    bool tabulated = false;
    double table_t_max = HUGE_VAL;
    double table_r_max = HUGE_VAL;

    double quadrature_tol = 1e-10;

    double eval_A0(double t) const {
        check_time(t);
        return A0(t);
    }

    double eval_A0_prime(double t) const {
        check_time(t);
        if (A0_prime)
            return A0_prime(t);
        const double step = 1e-5 * std::max(1.0, t);
        if (t < step)
            return (-3.0 * A0(t) + 4.0 * A0(t + step) - A0(t + 2.0 * step)) / (2.0 * step);
        return (A0(t + step) - A0(t - step)) / (2.0 * step);
    }

    double eval_U(double r) const {
        check_radius(r);
        return U(r);
    }

    double eval_U_prime(double r) const {
        check_radius(r);
        return U_prime(r);
    }

    double eval_U_second(double r) const {
        check_radius(r);
        if (U_second)
            return U_second(r);
        const double step = 1e-5 * std::max(1.0, r);
        if (r < step)  // U' is odd for smooth radial U
            return U_prime(step) / step;
        return (U_prime(r + step) - U_prime(r - step)) / (2.0 * step);
    }

    double eval_h(double t, double r) const { return h ? h(t, r) : 0.0; }

    bool has_closed_G() const { return static_cast<bool>(G); }

    void check_time(double t) const {
        if (!(t >= 0.0))
            throw DomainError("time must be nonnegative");
        if (tabulated && t > table_t_max)
            throw DomainError("time " + std::to_string(t) + " outside the tabulated A0 range");
    }

    void check_radius(double r) const {
        if (!(r >= 0.0))
            throw DomainError("radius must be nonnegative");
        if (tabulated && r > table_r_max)
            throw DomainError("radius " + std::to_string(r) + " outside the tabulated U range");
    }
};

/// G(t) = int_0^t A0; closed form when the field has one, adaptive Simpson
/// otherwise.
inline double eval_G(const PerturbationField& field, double t) {
    field.check_time(t);
    if (field.G)
        return field.G(t);
    if (t == 0.0)
        return 0.0;
    return adaptive_simpson(field.A0, 0.0, t, field.quadrature_tol).value;
}

struct ProblemSpec {
    int n = 3;
    double p = 2.0;
    int j = 0;
    double eps = 1.0;
    PerturbationField field;

    int m() const { return n / 2; }
    double alpha() const { return field.v1.alpha; }
    double M() const { return field.v1.M; }
    double F(double s) const { return field.F(s, p); }

    void validate() const {
        if (n < 2)
            throw DomainError("dimension n must be >= 2");
        if (!(p > 1.0))
            throw DomainError("exponent p must exceed 1");
        if (j != 0 && j != 1)
            throw DomainError("nonlinearity index j must be 0 or 1");
        if (!(eps > 0.0))
            throw DomainError("data size eps must be positive");
        if (!field.A0 || !field.U || !field.U_prime)
            throw DomainError("perturbation field is missing A0, U or U'");
        field.v1.validate();
    }
};

// ---------------------------------------------------------------------------
// Catalog

namespace detail {

inline double japanese(double r) { return std::sqrt(1.0 + r * r); }

inline void require_finite(const std::vector<double>& params, const std::string& name) {
    for (double v : params)
        if (!std::isfinite(v))
            throw DomainError(name + ": parameters must be finite real numbers");
}

inline void require_count(const std::vector<double>& params, std::size_t n, const std::string& name) {
    if (params.size() != n)
        throw DomainError(name + " expects " + std::to_string(n) + " parameter(s), got " +
                          std::to_string(params.size()));
}

inline void set_zero_time(PerturbationField& f) {
    f.A0 = [](double) { return 0.0; };
    f.A0_prime = [](double) { return 0.0; };
    f.G = [](double) { return 0.0; };
    f.G_shape = Monotonicity::increasing;
}

inline void set_zero_space(PerturbationField& f) {
    f.U = [](double) { return 0.0; };
    f.U_prime = [](double) { return 0.0; };
    f.U_second = [](double) { return 0.0; };
    f.U_shape = Monotonicity::increasing;
}

inline void set_log_space(PerturbationField& f, double ell) {
    // U = ell log<r>, so U/log r -> ell.
    f.U = [ell](double r) { return 0.5 * ell * std::log1p(r * r); };
    f.U_prime = [ell](double r) { return ell * r / (1.0 + r * r); };
    f.U_second = [ell](double r) {
        const double q = 1.0 + r * r;
        return ell * (1.0 - r * r) / (q * q);
    };
    f.U_shape = ell >= 0.0 ? Monotonicity::increasing : Monotonicity::decreasing;
}

}  // namespace detail

inline const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names = {"zero",          "scale_invariant", "bounded_U",
                                                   "integrable_A0", "log_growth_U",    "linear_growth_U"};
    return names;
}

/// Named perturbation fields with closed-form G, U, U' and asymptotics.
///
///  zero                  A0 = 0, U = 0
///  scale_invariant(mu, eta)  A0 = mu/(2(1+t)), U = (eta/2) log<r>
///  bounded_U(beta > 1)   A0 = 0, U = <r>^(1-beta)/(1-beta)
///  integrable_A0(c)      A0 = c e^(-t), U = 0
///  log_growth_U(ell)     A0 = 0, U = ell log<r>
///  linear_growth_U(c)    A0 = 0, U = c(<r> - 1), so U/log r -> sign(c) inf
inline PerturbationField catalog_field(const std::string& name, const std::vector<double>& params,
                                       DataProfile v1 = {}) {
    detail::require_finite(params, name);
    PerturbationField f;
    f.name = name;
    f.params = params;
    f.v1 = std::move(v1);
    AsymptoticProfile prof;

    if (name == "zero") {
        detail::require_count(params, 0, name);
        detail::set_zero_time(f);
        detail::set_zero_space(f);
    } else if (name == "scale_invariant") {
        detail::require_count(params, 2, name);
        const double mu = params[0];
        const double eta = params[1];
        f.A0 = [mu](double t) { return 0.5 * mu / (1.0 + t); };
        f.A0_prime = [mu](double t) { return -0.5 * mu / ((1.0 + t) * (1.0 + t)); };
        f.G = [mu](double t) { return 0.5 * mu * std::log1p(t); };
        f.G_shape = mu >= 0.0 ? Monotonicity::increasing : Monotonicity::decreasing;
        detail::set_log_space(f, 0.5 * eta);
        prof.gamma = 0.5 * mu;
        prof.ell = 0.5 * eta;
    } else if (name == "bounded_U") {
        detail::require_count(params, 1, name);
        const double beta = params[0];
        if (!(beta > 1.0))
            throw DomainError("bounded_U requires beta > 1");
        detail::set_zero_time(f);
        f.U = [beta](double r) { return std::pow(detail::japanese(r), 1.0 - beta) / (1.0 - beta); };
        f.U_prime = [beta](double r) { return r * std::pow(detail::japanese(r), -beta - 1.0); };
        f.U_second = [beta](double r) {
            const double q = detail::japanese(r);
            return std::pow(q, -beta - 1.0) - (beta + 1.0) * r * r * std::pow(q, -beta - 3.0);
        };
        f.U_shape = Monotonicity::increasing;
    } else if (name == "integrable_A0") {
        detail::require_count(params, 1, name);
        const double c = params[0];
        f.A0 = [c](double t) { return c * std::exp(-t); };
        f.A0_prime = [c](double t) { return -c * std::exp(-t); };
        f.G = [c](double t) { return -c * std::expm1(-t); };
        f.G_shape = c >= 0.0 ? Monotonicity::increasing : Monotonicity::decreasing;
        detail::set_zero_space(f);
    } else if (name == "log_growth_U") {
        detail::require_count(params, 1, name);
        detail::set_zero_time(f);
        detail::set_log_space(f, params[0]);
        prof.ell = params[0];
    } else if (name == "linear_growth_U") {
        detail::require_count(params, 1, name);
        const double c = params[0];
        if (c == 0.0)
            throw DomainError("linear_growth_U requires c != 0 (use zero instead)");
        detail::set_zero_time(f);
        f.U = [c](double r) { return c * (detail::japanese(r) - 1.0); };
        f.U_prime = [c](double r) { return c * r / detail::japanese(r); };
        f.U_second = [c](double r) { return c * std::pow(detail::japanese(r), -3.0); };
        f.U_shape = c > 0.0 ? Monotonicity::increasing : Monotonicity::decreasing;
        prof.ell = c > 0.0 ? ExtendedReal::plus_infinity() : ExtendedReal::minus_infinity();
    } else {
        throw DomainError("unknown catalog field '" + name + "'");
    }
    f.closed_profile = prof;
    return f;
}

/// Field from sampled A0(t_i) and U(r_i). A0 is piecewise linear (G exact
/// by cumulative trapezoids), U a C1 cubic Hermite interpolant with
/// centered-difference slopes. Evaluation outside the tables throws.
inline PerturbationField tabulated_field(std::vector<double> t_nodes, std::vector<double> a0_values,
                                         std::vector<double> r_nodes, std::vector<double> u_values,
                                         DataProfile v1 = {}) {
    auto check_nodes = [](const std::vector<double>& x, const std::vector<double>& y, const char* what) {
        if (x.size() < 3 || x.size() != y.size())
            throw DomainError(std::string("tabulated ") + what + ": need >= 3 matching samples");
        if (x.front() != 0.0)
            throw DomainError(std::string("tabulated ") + what + ": first node must be 0");
        for (std::size_t i = 1; i < x.size(); ++i)
            if (!(x[i] > x[i - 1]))
                throw DomainError(std::string("tabulated ") + what + ": nodes must increase strictly");
    };
    check_nodes(t_nodes, a0_values, "A0");
    check_nodes(r_nodes, u_values, "U");

    struct Table {
        std::vector<double> x, y, slope, cumulative;

        std::size_t cell(double v) const {
            auto it = std::upper_bound(x.begin(), x.end(), v);
            std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
            return std::min(i, x.size() - 2);
        }
    };
    auto ta = std::make_shared<Table>();
    ta->x = std::move(t_nodes);
    ta->y = std::move(a0_values);
    ta->cumulative.assign(ta->x.size(), 0.0);
    for (std::size_t i = 1; i < ta->x.size(); ++i)
        ta->cumulative[i] = ta->cumulative[i - 1] + 0.5 * (ta->y[i] + ta->y[i - 1]) * (ta->x[i] - ta->x[i - 1]);

    auto tu = std::make_shared<Table>();
    tu->x = std::move(r_nodes);
    tu->y = std::move(u_values);
    const std::size_t nu = tu->x.size();
    tu->slope.resize(nu);
    tu->slope[0] = 0.0;  // radial symmetry
    for (std::size_t i = 1; i + 1 < nu; ++i)
        tu->slope[i] = (tu->y[i + 1] - tu->y[i - 1]) / (tu->x[i + 1] - tu->x[i - 1]);
    tu->slope[nu - 1] = (tu->y[nu - 1] - tu->y[nu - 2]) / (tu->x[nu - 1] - tu->x[nu - 2]);

    PerturbationField f;
    f.name = "tabulated";
    f.tabulated = true;
    f.table_t_max = ta->x.back();
    f.table_r_max = tu->x.back();
    f.v1 = std::move(v1);
    f.A0 = [ta](double t) {
        const std::size_t i = ta->cell(t);
        const double w = (t - ta->x[i]) / (ta->x[i + 1] - ta->x[i]);
        return (1.0 - w) * ta->y[i] + w * ta->y[i + 1];
    };
    f.A0_prime = [ta](double t) {
        const std::size_t i = ta->cell(t);
        return (ta->y[i + 1] - ta->y[i]) / (ta->x[i + 1] - ta->x[i]);
    };
    f.G = [ta](double t) {
        const std::size_t i = ta->cell(t);
        const double dx = t - ta->x[i];
        const double slope = (ta->y[i + 1] - ta->y[i]) / (ta->x[i + 1] - ta->x[i]);
        return ta->cumulative[i] + ta->y[i] * dx + 0.5 * slope * dx * dx;
    };
    auto hermite = [tu](double r, int derivative) {
        const std::size_t i = tu->cell(r);
        const double hcell = tu->x[i + 1] - tu->x[i];
        const double s = (r - tu->x[i]) / hcell;
        const double y0 = tu->y[i], y1 = tu->y[i + 1];
        const double m0 = tu->slope[i] * hcell, m1 = tu->slope[i + 1] * hcell;
        if (derivative == 0) {
            const double s2 = s * s, s3 = s2 * s;
            return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * m1;
        }
        if (derivative == 1) {
            const double s2 = s * s;
            return ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * m0 + (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * m1) /
                   hcell;
        }
        return ((12 * s - 6) * y0 + (6 * s - 4) * m0 + (-12 * s + 6) * y1 + (6 * s - 2) * m1) / (hcell * hcell);
    };
    f.U = [hermite](double r) { return hermite(r, 0); };
    f.U_prime = [hermite](double r) { return hermite(r, 1); };
    f.U_second = [hermite](double r) { return hermite(r, 2); };
    return f;
}

// ---------------------------------------------------------------------------
// Asymptotics

struct AsymptoticsOptions {
    double tolerance = 1e-3;  // admissible spread over the last samples
    double infinity_cap = 100.0;
    int samples_per_decade = 4;
    int tail = 4;  // samples entering the spread diagnostic
};

/// Estimates gamma = lim s A0(s) and ell = lim U(xi)/log(xi) on a geometric
/// grid starting at 10. ell is read from secant slopes dU/dlog(xi), which
/// share the limit of U/log(xi) but are insensitive to additive constants.
inline AsymptoticProfile estimate_asymptotics(const PerturbationField& field, double horizon,
                                              const AsymptoticsOptions& opt = {}) {
    const double step = std::pow(10.0, 1.0 / opt.samples_per_decade);
    std::vector<double> grid;
    for (double s = 10.0; s <= horizon * (1.0 + 1e-12); s *= step)
        grid.push_back(std::min(s, horizon));
    if (static_cast<int>(grid.size()) < opt.tail + 1)
        throw DomainError("estimate_asymptotics: horizon too small, need at least " + std::to_string(opt.tail + 1) +
                          " geometric samples beyond 10");

    AsymptoticProfile prof;
    prof.source = AsymptoticProfile::Source::numerically_estimated;

    std::vector<double> gam, ell;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        gam.push_back(grid[i] * field.eval_A0(grid[i]));
        if (i > 0)
            ell.push_back((field.eval_U(grid[i]) - field.eval_U(grid[i - 1])) /
                          (std::log(grid[i]) - std::log(grid[i - 1])));
    }

    auto tail_spread = [&](const std::vector<double>& v) {
        const auto first = v.end() - opt.tail;
        const auto [lo, hi] = std::minmax_element(first, v.end());
        return *hi - *lo;
    };
    auto tail_monotone_beyond_cap = [&](const std::vector<double>& v, int sign) {
        for (auto it = v.end() - opt.tail + 1; it != v.end(); ++it)
            if (sign * (*it - *(it - 1)) <= 0.0)
                return false;
        return sign * v.back() > opt.infinity_cap;
    };

    prof.gamma = gam.back();
    prof.gamma_spread = tail_spread(gam);
    prof.ell_spread = tail_spread(ell);

    if (tail_monotone_beyond_cap(ell, +1)) {
        prof.ell = ExtendedReal::plus_infinity();
        prof.ell_spread = 0.0;
    } else if (tail_monotone_beyond_cap(ell, -1)) {
        prof.ell = ExtendedReal::minus_infinity();
        prof.ell_spread = 0.0;
    } else {
        prof.ell = ell.back();
    }

    std::string diag;
    if (!(prof.gamma_spread <= opt.tolerance))
        diag += "gamma spread " + std::to_string(prof.gamma_spread) + " above tolerance; ";
    if (!(prof.ell_spread <= opt.tolerance))
        diag += "ell spread " + std::to_string(prof.ell_spread) + " above tolerance; ";
    if (!diag.empty()) {
        prof.determinate = false;
        prof.diagnostic = "indeterminate: " + diag;
    }
    return prof;
}

struct FieldCheck {
    bool ok = true;
    std::string failure;  // first violated invariant
};

/// Samples the structural assumptions of a problem: G(0) = 0, G' = A0,
/// h >= 0, F(s) >= |s|^p and the data lower bound.
inline FieldCheck check_field_invariants(const ProblemSpec& spec, double t_max = 50.0, double r_max = 50.0,
                                         int samples = 200) {
    FieldCheck c;
    auto fail = [&](const std::string& msg) {
        if (c.ok) {
            c.ok = false;
            c.failure = msg;
        }
    };
    const auto& f = spec.field;
    t_max = std::min(t_max, f.table_t_max);
    r_max = std::min(r_max, f.table_r_max);
    if (std::abs(eval_G(f, 0.0)) > 1e-14)
        fail("G(0) != 0");
    for (int i = 1; i < samples; ++i) {
        const double t = t_max * i / samples;
        const double h = 1e-4 * std::max(1.0, t);
        const double dG = (eval_G(f, std::min(t + h, t_max)) - eval_G(f, t - h)) / (std::min(t + h, t_max) - t + h);
        if (std::abs(dG - f.eval_A0(t)) > 1e-5 * (1.0 + std::abs(f.eval_A0(t))))
            fail("G' != A0 at t=" + std::to_string(t));
        for (int k = 0; k <= 8; ++k) {
            const double r = r_max * k / 8.0;
            if (f.eval_h(t, r) < 0.0)
                fail("h < 0 at (t, r)=(" + std::to_string(t) + ", " + std::to_string(r) + ")");
        }
        const double s = -10.0 + 20.0 * i / samples;
        if (spec.F(s) < std::pow(std::abs(s), spec.p) * (1.0 - 1e-12) && f.F.kind != Nonlinearity::Kind::zero)
            fail("F(s) < |s|^p at s=" + std::to_string(s));
    }
    try {
        f.v1.validate(r_max);
    } catch (const DomainError& e) {
        fail(e.what());
    }
    return c;
}

}  // namespace blowup
