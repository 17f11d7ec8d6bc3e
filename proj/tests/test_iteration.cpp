#include <blowup/iteration.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace blowup;

namespace {

IterationParams params(double p, int m, int j, double alpha = 1.0, double eps = 1.0,
                       CRecursion rec = CRecursion::sequences) {
    IterationParams ip;
    ip.p = p;
    ip.m = m;
    ip.j = j;
    ip.alpha = alpha;
    ip.eps = eps;
    ip.recursion = rec;
    ip.C0 = initial_constant(eps, ip.sigma_n, m, ip.M, alpha, ip.delta);
    const auto ks = compute_K_and_S(p, m, j, rec);
    ip.K = ks.K;
    ip.S_pK = ks.S_pK;
    return ip;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Sequences, RecursionMatchesClosedForm) {
    for (double p : {1.5, 2.0, 3.0})
        for (int m : {1, 2})
            for (int j : {0, 1}) {
                const auto ip = params(p, m, j, 0.7);
                IterationState s = initial_state(ip);
                for (int k = 1; k <= 30; ++k) {
                    s = step(s, ip);
                    const auto c = closed_form(k, ip);
                    EXPECT_LT(rel(s.a, c.a), 1e-10) << p << " " << m << " " << j << " k=" << k;
                    EXPECT_LT(rel(s.b, c.b), 1e-10);
                    EXPECT_LT(rel(s.d, c.d), 1e-10);
                    EXPECT_LT(rel(s.l, c.l), 1e-10);
                }
            }
}

TEST(Sequences, FirstSteps) {
    const auto ip = params(2.0, 1, 0, 1.0);
    const auto s1 = initial_state(ip);
    EXPECT_EQ(s1.a, 2.0);
    EXPECT_EQ(s1.b, 2.0);
    EXPECT_EQ(s1.d, 1.0);
    EXPECT_EQ(s1.l, 0.0);
    const auto s2 = step(s1, ip);
    EXPECT_EQ(s2.k, 2);
    EXPECT_EQ(s2.a, 6.0);
    EXPECT_EQ(s2.b, 5.0);
    EXPECT_EQ(s2.d, 2.0);
    EXPECT_EQ(s2.l, 1.0);
    // log C_2 = 2 (log C0 - log 2) - log 2 - 2 log 6
    EXPECT_NEAR(s2.logC, 2.0 * (ip.log_C0() - std::log(2.0)) - std::log(2.0) - 2.0 * std::log(6.0), 1e-14);
    const auto j1 = params(2.0, 1, 1, 1.0);
    const auto t2 = step(initial_state(j1), j1);
    EXPECT_EQ(t2.a, 5.0);
    EXPECT_NEAR(t2.logC, 2.0 * j1.log_C0() - std::log(8.0) - std::log(5.0), 1e-14);
}

TEST(Sequences, DAndLGrowth) {
    const auto ip = params(3.0, 1, 0);
    const auto s = state_at(6, ip);
    EXPECT_DOUBLE_EQ(s.d, std::pow(3.0, 5));
    EXPECT_DOUBLE_EQ(s.l, std::pow(3.0, 5) - 1.0);
    EXPECT_THROW(state_at(0, ip), DomainError);
    EXPECT_THROW(closed_form(0, ip), DomainError);
}

TEST(Constants, LogBoundHoldsWithDerivedK) {
    for (double p : {1.5, 2.0, 3.0})
        for (int m : {1, 2})
            for (int j : {0, 1})
                for (auto rec : {CRecursion::sequences, CRecursion::in_text}) {
                    const auto ip = params(p, m, j, 1.0, 0.01, rec);
                    IterationState s = initial_state(ip);
                    for (int k = 1; k <= 60; ++k) {
                        s = step(s, ip);
                        ASSERT_TRUE(std::isfinite(s.logC));
                        const double bound = log_lower_bound_C(k, ip);
                        EXPECT_GE(s.logC, bound - 1e-9 * std::max(1.0, std::abs(bound)))
                            << p << " " << m << " " << j << " k=" << k;
                    }
                }
}

TEST(Constants, InitialConstantFormula) {
    EXPECT_NEAR(initial_constant(1.0, 0.5, 1, 1.0, 1.0, 0.1), 0.5 / 4.0 * std::pow(0.1 / 1.1, 2.0), 1e-16);
    EXPECT_NEAR(initial_constant(0.2, 0.5, 2, 3.0, 0.0, 1.0), 0.2 * 0.25 * 3.0 / 4.0 * 0.5, 1e-16);
}

TEST(Constants, SeriesClosedFormForPTwo) {
    // sum i log4 / 2^i - log K sum 1/2^i = 2 log 4 - log K
    for (int m : {1, 2})
        for (int j : {0, 1}) {
            const auto ks = compute_K_and_S(2.0, m, j);
            EXPECT_NEAR(ks.S_pK, 2.0 * std::log(4.0) - std::log(ks.K), 1e-12);
            EXPECT_NEAR(partial_S(2.0, ks.K, 200), ks.S_pK, 1e-12);
        }
    EXPECT_THROW(compute_K_and_S(1.0, 1, 0), DomainError);
}

TEST(Constants, PartialSumsAreSigmaTerms) {
    const double K = 0.01;
    double acc = 0.0;
    for (int k = 0; k <= 20; ++k) {
        acc += sigma_term(1.7, K, k);
        EXPECT_NEAR(partial_S(1.7, K, k), acc, 1e-12);
    }
}

TEST(Constants, EpsilonShiftsLogC0) {
    const auto a = params(2.0, 1, 0, 1.0, 1.0);
    const auto b = params(2.0, 1, 0, 1.0, 0.01);
    EXPECT_NEAR(a.log_C0() - b.log_C0(), std::log(100.0), 1e-12);
    // every C_k scales as eps^(p^(k-1))
    for (int k = 1; k <= 8; ++k)
        EXPECT_NEAR(state_at(k, a).logC - state_at(k, b).logC, std::pow(2.0, k - 1) * std::log(100.0),
                    1e-9 * std::pow(2.0, k));
}

TEST(Envelope, RegionEnforcedAndZeroFieldForm) {
    const auto spec_field = catalog_field("zero", {});
    const ExtremalEnvelope env{&spec_field};
    const auto ip = params(2.0, 1, 0);
    EXPECT_THROW(log_envelope(1.0, 1.2, initial_state(ip), ip, env), DomainError);
    const double t = 2.0, r = 4.0;
    const double expect = ip.log_C0() + 2.0 * std::log(t) - std::log(r) - 2.0 * std::log(r + t);
    EXPECT_NEAR(log_envelope(t, r, initial_state(ip), ip, env), expect, 1e-12);
    EXPECT_NEAR(std::log(envelope(t, r, 1, ip, env)), expect, 1e-12);
}
