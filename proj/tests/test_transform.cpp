#include <blowup/transform.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace blowup;

namespace {

ProblemSpec mms_spec() {
    ProblemSpec s;
    DataProfile d;
    d.shape = DataProfile::Shape::smooth;
    s.field = catalog_field("scale_invariant", {1.0, 1.0}, d);
    return s;
}

double exact_u(double t, double r) { return std::sin(1.0 + t) * std::exp(-0.25 * r * r); }

// Source making exact_u solve the classical radial equation for n = 3.
SourceTerm classical_source(const ProblemSpec& s) {
    return [s](double t, double r) {
        const double g = std::exp(-0.25 * r * r);
        const double utt = -std::sin(1.0 + t) * g;
        const double lap = std::sin(1.0 + t) * (0.25 * r * r - 1.5) * g;
        const double u = exact_u(t, r);
        const double w = eval_G(s.field, t) + s.field.eval_U(r);
        return utt - lap - s.field.eval_h(t, r) * u - std::exp(w) * s.F(std::exp(-w) * u);
    };
}

double max_abs_beyond(const SolutionGrid& g, double r_min) {
    double e = 0.0;
    for (const auto& row : g.slices)
        for (std::size_t i = 0; i < row.size(); ++i)
            if (g.radius(i) >= r_min)
                e = std::max(e, std::abs(row[i]));
    return e;
}

}  // namespace

TEST(Transform, ZeroFieldIsIdentity) {
    const auto f = catalog_field("zero", {});
    const auto g = sample_grid(exact_u, 0.0, 0.1, 5, 0.0, 0.2, 9);
    const auto u = to_u(g, f);
    EXPECT_EQ(u.quantity, "u");
    for (std::size_t k = 0; k < g.times.size(); ++k)
        for (std::size_t i = 0; i < g.nr(); ++i)
            EXPECT_EQ(u.slices[k][i], g.slices[k][i]);
}

TEST(Transform, RoundTrip) {
    const auto f = catalog_field("scale_invariant", {3.0, 2.0});
    const auto g = sample_grid(exact_u, 0.0, 0.5, 9, 0.0, 0.75, 17);
    const auto back = to_v(to_u(g, f), f);
    for (std::size_t k = 0; k < g.times.size(); ++k)
        for (std::size_t i = 0; i < g.nr(); ++i)
            EXPECT_NEAR(back.slices[k][i], g.slices[k][i], 1e-14 * std::max(1.0, std::abs(g.slices[k][i])));
}

TEST(Transform, ScaleInvariantTimeFactor) {
    // mu = 2: e^G = 1 + t
    const auto f = catalog_field("scale_invariant", {2.0, 0.0});
    const auto ones = sample_grid([](double, double) { return 1.0; }, 0.0, 0.25, 9, 0.0, 1.0, 4);
    const auto u = to_u(ones, f);
    for (std::size_t k = 0; k < u.times.size(); ++k)
        for (double x : u.slices[k])
            EXPECT_NEAR(x, 1.0 + u.times[k], 1e-14);
}

TEST(Transform, ExpTimesOverflowIsReported) {
    EXPECT_NEAR(detail::exp_times(800.0, std::exp(-700.0)) / std::exp(100.0), 1.0, 1e-12);
    EXPECT_EQ(detail::exp_times(900.0, 0.0), 0.0);
    EXPECT_THROW(detail::exp_times(800.0, 1.0), DomainError);
}

TEST(Residual, LinearInTimeIsExact) {
    ProblemSpec s;
    s.field = catalog_field("zero", {});
    s.field.F.kind = Nonlinearity::Kind::zero;
    const auto g = sample_grid([](double t, double) { return t; }, 0.0, 0.05, 20, 0.0, 0.1, 30);
    const auto res = residual_classical(g, s);
    EXPECT_LT(max_abs_beyond(res, 0.0), 1e-10);
    EXPECT_GT(res.r0, 0.0);
}

TEST(Residual, RejectsCoarseOrUnevenGrids) {
    ProblemSpec s;
    s.field = catalog_field("zero", {});
    EXPECT_THROW(residual_classical(sample_grid(exact_u, 0.0, 0.1, 5, 0.0, 0.1, 20), s), DomainError);
    auto g = sample_grid(exact_u, 0.0, 0.1, 10, 0.0, 0.1, 20);
    g.times[4] += 0.03;
    EXPECT_THROW(residual_classical(g, s), DomainError);
}

TEST(Residual, ManufacturedSolutionSecondOrder) {
    const auto s = mms_spec();
    const auto src = classical_source(s);
    const SourceTerm src_v = [&](double t, double r) {
        return std::exp(-eval_G(s.field, t) - s.field.eval_U(r)) * src(t, r);
    };
    double prev_u = 0.0, prev_v = 0.0;
    for (double h : {0.1, 0.05, 0.025}) {
        const auto nt = static_cast<std::size_t>(std::lround(1.0 / h)) + 1;
        const auto nr = static_cast<std::size_t>(std::lround(3.0 / h)) + 1;
        const auto u = sample_grid(exact_u, 0.5, h, nt, 0.0, h, nr);
        const double eu = max_abs_beyond(residual_classical(u, s, src), 0.5);
        const double ev = max_abs_beyond(residual_perturbed(to_v(u, s.field), s, src_v), 0.5);
        if (prev_u > 0.0) {
            EXPECT_NEAR(std::log2(prev_u / eu), 2.0, 0.2) << h;
            EXPECT_NEAR(std::log2(prev_v / ev), 2.0, 0.2) << h;
        }
        prev_u = eu;
        prev_v = ev;
    }
    EXPECT_LT(prev_u, 1e-3);
}

TEST(Operators, LowerOrderFormMatchesPerturbedOperatorWithoutA0) {
    const auto f = catalog_field("bounded_U", {2.0});
    const RadialOperatorSet ops{&f, 3};
    for (double r : {0.3, 1.0, 4.0})
        for (const Jet& j : {Jet{1.0, 0.2, -0.3, 0.5, 2.0}, Jet{-0.7, 1.1, 0.4, -2.0, 0.1}})
            EXPECT_NEAR(ops.tilde_dtt(0.5, j) - ops.tilde_laplacian_radial(r, j), ops.lower_order_form(r, j), 1e-13);
    EXPECT_THROW(ops.tilde_laplacian_radial(0.0, Jet{}), DomainError);
}

TEST(Operators, PerturbedLaplacianConjugatesFlatLaplacian) {
    // e^{-U} Lap(e^U f) equals the perturbed radial Laplacian of f.
    const auto field = catalog_field("scale_invariant", {0.0, 1.5});
    const RadialOperatorSet ops{&field, 3};
    auto f = [](double r) { return std::cos(r) / (1.0 + r * r); };
    auto ef = [&](double r) { return std::exp(field.eval_U(r)) * f(r); };
    const double h = 1e-4;
    for (double r : {0.5, 1.3, 3.0}) {
        Jet J;
        J.f = f(r);
        J.f_r = (f(r + h) - f(r - h)) / (2 * h);
        J.f_rr = (f(r + h) - 2 * f(r) + f(r - h)) / (h * h);
        const double lap = (ef(r + h) - 2 * ef(r) + ef(r - h)) / (h * h) + 2.0 / r * (ef(r + h) - ef(r - h)) / (2 * h);
        EXPECT_NEAR(ops.tilde_laplacian_radial(r, J), std::exp(-field.eval_U(r)) * lap, 1e-5) << r;
    }
}

TEST(Operators, PerturbedTimeDerivativeConjugates) {
    const auto field = catalog_field("scale_invariant", {2.0, 0.0});
    const RadialOperatorSet ops{&field, 3};
    auto f = [](double t) { return std::sin(2.0 * t); };
    auto ef = [&](double t) { return std::exp(eval_G(field, t)) * f(t); };
    const double h = 1e-4;
    for (double t : {0.2, 1.0, 5.0}) {
        Jet J;
        J.f = f(t);
        J.f_t = (f(t + h) - f(t - h)) / (2 * h);
        J.f_tt = (f(t + h) - 2 * f(t) + f(t - h)) / (h * h);
        const double e = std::exp(-eval_G(field, t));
        EXPECT_NEAR(ops.tilde_dt(t, J), e * (ef(t + h) - ef(t - h)) / (2 * h), 1e-7);
        EXPECT_NEAR(ops.tilde_dtt(t, J), e * (ef(t + h) - 2 * ef(t) + ef(t - h)) / (h * h), 1e-5);
    }
}

TEST(ShapeIdentity, SecondOrderAndGuards) {
    auto beta = [](double t) { return 1.0 / std::sqrt(1.0 + t); };
    auto beta_p = [](double t) { return -0.5 * std::pow(1.0 + t, -1.5); };
    auto f = [](double t) { return std::sin(t); };
    double prev = 0.0;
    for (int n : {20, 40, 80}) {
        std::vector<double> grid;
        for (int k = 0; k <= n; ++k)
            grid.push_back(2.0 * k / n);
        const double e = shape_identity_check(beta, beta_p, f, grid);
        if (prev > 0.0) {
            EXPECT_NEAR(std::log2(prev / e), 2.0, 0.2);
        }
        prev = e;
    }
    EXPECT_THROW(shape_identity_check(beta, beta_p, f, {0.0, 1.0}), DomainError);
    EXPECT_THROW(shape_identity_check([](double t) { return t - 1.0; }, [](double) { return 1.0; }, f, {0.0, 1.0, 2.0}),
                 DomainError);
}

TEST(InitialVelocity, MatchesTransformedData) {
    auto s = mms_spec();
    s.eps = 0.3;
    for (double r : {0.0, 0.5, 2.0, 10.0}) {
        const double expect = 0.3 * std::exp(s.field.eval_U(r)) * s.field.v1(r);
        EXPECT_NEAR(initial_velocity_u(s, r), expect, 1e-12 * std::max(1.0, expect));
    }
}
