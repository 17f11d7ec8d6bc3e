#include <blowup/criterion.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace blowup;

namespace {

ProblemSpec make_spec(const std::string& name, std::vector<double> params, double p, double alpha, int j = 0,
                      double eps = 1.0) {
    ProblemSpec s;
    s.field = catalog_field(name, std::move(params));
    s.field.v1.alpha = alpha;
    s.p = p;
    s.j = j;
    s.eps = eps;
    return s;
}

}  // namespace

TEST(Phi, ZeroFieldIsLog) {
    const auto s = make_spec("zero", {}, 2.0, 1.0);
    const BlowupRegion reg;
    EXPECT_NEAR(phi(std::exp(1.0), s, reg), 1.0, 1e-14);
    for (double t : {0.5, 3.0, 1e5})
        EXPECT_NEAR(phi(t, s, reg), std::log(t), 1e-12);
    EXPECT_THROW(phi(0.0, s, reg), DomainError);
}

TEST(Phi, ScaleInvariantSlope) {
    const auto s = make_spec("scale_invariant", {1.0, 0.0}, 2.0, 0.0);
    const BlowupRegion reg;
    const double slope = (phi(1e6, s, reg) - phi(1e4, s, reg)) / (std::log(1e6) - std::log(1e4));
    EXPECT_NEAR(slope, 1.5, 1e-4);
}

TEST(Phi, LinearPotentialDivergesDown) {
    auto s = make_spec("zero", {}, 2.0, 1.0);
    s.field.U = [](double r) { return r; };
    s.field.U_prime = [](double) { return 1.0; };
    s.field.U_shape = Monotonicity::increasing;
    const BlowupRegion reg;
    double prev = phi(10.0, s, reg);
    for (double t = 100.0; t <= 1e6; t *= 10.0) {
        const double v = phi(t, s, reg);
        EXPECT_LT(v, prev);
        prev = v;
    }
    EXPECT_LT(prev, -1e5);
}

TEST(Phi, UnitSigmaWindowBoundsMainTheoremVariant) {
    BlowupRegion reg;
    reg.sigma_n = 1.0;
    for (const auto& [name, params] : std::vector<std::pair<std::string, std::vector<double>>>{
             {"bounded_U", {2.0}}, {"log_growth_U", {-0.7}}, {"scale_invariant", {3.0, 2.0}}}) {
        const auto s = make_spec(name, params, 2.0, 1.0);
        for (double t = 0.5; t < 1e5; t *= 3.7)
            EXPECT_GE(phi(t, s, reg, Window::theorem) + 1e-12, phi(t, s, reg, Window::main_theorem)) << name;
    }
}

TEST(J, ZeroFieldLineReduction) {
    const auto s = make_spec("zero", {}, 2.0, 1.0);
    const BlowupRegion reg;
    const auto ip = make_iteration_params(s, reg);
    for (double t : {1.0, 10.0, 1000.0}) {
        const double expect = ip.log_C0() - ip.S_pK + (2.0 - 1.0) * std::log(t) - 3.0 * std::log(2.5);
        EXPECT_NEAR(J_functional(t, reg.line_radius(t), s, ip), expect, 1e-11);
        const auto fi = final_inequality(t, s, ip);
        EXPECT_NEAR(fi.lhs - fi.rhs, expect, 1e-11);
    }
    EXPECT_THROW(J_functional(1.0, 1.1, s, ip), DomainError);
}

TEST(J, EpsilonShiftIsExact) {
    const BlowupRegion reg;
    for (const auto& name : {"zero", "bounded_U"}) {
        const auto s1 = make_spec(name, name == std::string("zero") ? std::vector<double>{} : std::vector<double>{2.0},
                                  2.0, 1.0, 0, 1.0);
        auto s2 = s1;
        s2.eps = 0.03;
        const auto ip1 = make_iteration_params(s1, reg), ip2 = make_iteration_params(s2, reg);
        for (double t : {0.7, 5.0, 80.0})
            for (double f : {1.6, 2.0, 4.0})
                EXPECT_NEAR(J_functional(t, f * t, s2, ip2) - J_functional(t, f * t, s1, ip1), std::log(0.03), 1e-12);
    }
}

TEST(FirstPositiveTime, MonotoneInEpsilon) {
    const BlowupRegion reg;
    double prev = 0.0;
    for (double eps : {1.0, 0.1, 0.01, 0.001}) {
        const auto s = make_spec("zero", {}, 2.0, 1.0, 0, eps);
        const auto ip = make_iteration_params(s, reg);
        const auto t0 = first_positive_time(s, ip, 1e12);
        ASSERT_TRUE(t0.has_value()) << eps;
        EXPECT_GT(*t0, prev);
        EXPECT_GT(J_functional(*t0 * (1 + 1e-9), reg.line_radius(*t0 * (1 + 1e-9)), s, ip), 0.0);
        prev = *t0;
    }
}

TEST(FirstPositiveTime, NoneForGrowingPotential) {
    const auto s = make_spec("linear_growth_U", {1.0}, 2.0, 1.0);
    const BlowupRegion reg;
    const auto ip = make_iteration_params(s, reg);
    EXPECT_FALSE(first_positive_time(s, ip, 1e8).has_value());
}

TEST(Classify, Examples) {
    AsymptoticProfile prof;
    prof.gamma = 0.0;
    prof.ell = ExtendedReal(0.0);
    auto t = classify(prof, 2.0, 0);
    EXPECT_EQ(t.regime, Regime::time_only);
    EXPECT_NEAR(t.critical.value(), 2.0, 1e-14);
    EXPECT_TRUE(t.predicts_blowup(1.9));
    EXPECT_FALSE(t.predicts_blowup(2.1));

    prof.gamma = 0.5;
    prof.ell = ExtendedReal(1.0);
    t = classify(prof, 1.0, 0);
    EXPECT_EQ(t.regime, Regime::effective_space);
    const double root = (5.5 + std::sqrt(5.5 * 5.5 - 4.0 * 2.5)) / 5.0;
    EXPECT_NEAR(t.critical.value(), root, 1e-12);

    prof.ell = ExtendedReal::plus_infinity();
    t = classify(prof, 1.0, 0);
    EXPECT_EQ(t.regime, Regime::no_conclusion);
    EXPECT_FALSE(t.predicts_blowup(1.01));

    prof.ell = ExtendedReal::minus_infinity();
    t = classify(prof, 1.0, 0);
    EXPECT_EQ(t.regime, Regime::all_powers);
    EXPECT_TRUE(t.predicts_blowup(50.0));

    prof.determinate = false;
    prof.diagnostic = "indeterminate: oscillating";
    EXPECT_EQ(classify(prof, 1.0, 0).regime, Regime::unclassified);
}

TEST(Divergence, ZeroFieldStraddlesCritical) {
    const BlowupRegion reg;
    EXPECT_TRUE(divergence_evidence(make_spec("zero", {}, 2.7, 1.0), reg).passed);
    EXPECT_FALSE(divergence_evidence(make_spec("zero", {}, 3.3, 1.0), reg).passed);
    const auto ev = divergence_evidence(make_spec("zero", {}, 2.0, 1.0), reg);
    EXPECT_NEAR(ev.slope, 1.0, 1e-12);
    EXPECT_EQ(ev.samples.size(), 25u);
}

TEST(Divergence, FastDecayingPotentialOnlyDivergesForLargeP) {
    // U = -(<r> - 1): Phi ~ t (sigma - (2 + sigma)/p), positive only for p > (2 + sigma)/sigma = 5
    const BlowupRegion reg;
    EXPECT_FALSE(divergence_evidence(make_spec("linear_growth_U", {-1.0}, 2.0, 1.0), reg).passed);
    EXPECT_TRUE(divergence_evidence(make_spec("linear_growth_U", {-1.0}, 6.0, 1.0), reg).passed);
    EXPECT_TRUE(divergence_evidence(make_spec("log_growth_U", {-0.7}, 2.0, 1.0), reg).passed);
}
