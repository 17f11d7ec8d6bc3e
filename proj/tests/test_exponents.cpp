#include <blowup/exponents.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace blowup;

TEST(StraussGlassey, KnownValues) {
    const double p3 = strauss_glassey(3, 0).value.value();
    EXPECT_NEAR(p3, 1.0 + std::sqrt(2.0), 1e-12);
    EXPECT_LT(std::abs(2.0 * p3 * p3 - 4.0 * p3 - 2.0), 1e-12);
    EXPECT_DOUBLE_EQ(strauss_glassey(3, 1).value.value(), 2.0);
    const double p2 = strauss_glassey(2, 0).value.value();
    EXPECT_NEAR(p2, (3.0 + std::sqrt(17.0)) / 2.0, 1e-12);
    EXPECT_LT(std::abs(p2 * p2 - 3.0 * p2 - 2.0), 1e-12);
    EXPECT_EQ(strauss_glassey(3, 0).kind, ExponentReport::Kind::strauss);
    EXPECT_EQ(strauss_glassey(3, 1).kind, ExponentReport::Kind::glassey);
    EXPECT_THROW(strauss_glassey(1, 0), DomainError);
}

TEST(StraussGlassey, RootOfPolynomialForManyDimensions) {
    for (int n = 2; n <= 12; ++n) {
        const double p = strauss_glassey(n, 0).value.value();
        EXPECT_GT(p, 1.0);
        EXPECT_LT(std::abs((n - 1) * p * p - (n + 1) * p - 2.0), 1e-11) << n;
    }
}

TEST(SlowDecay, Values) {
    EXPECT_DOUBLE_EQ(slow_decay_critical(2.0).value.value(), 2.0);
    EXPECT_DOUBLE_EQ(slow_decay_critical(1.0).value.value(), 3.0);
    EXPECT_TRUE(slow_decay_critical(-0.5).all_powers());
    EXPECT_TRUE(slow_decay_critical(0.0).all_powers());
}

TEST(ShiftedCritical, Examples) {
    const auto r = shifted_critical(1.0, 0.0, 1.0, 0);
    EXPECT_NEAR(r.value.value(), (5.0 + std::sqrt(17.0)) / 4.0, 1e-12);
    EXPECT_LT(std::abs(ShiftedQuadratic(1.0, 0.0, 1.0, 0).residual(r.value.value())), 1e-12);
    // gamma folded into alpha gives the same root
    EXPECT_NEAR(shifted_critical(0.5, 0.5, 1.0, 0).value.value(), r.value.value(), 1e-14);
    EXPECT_NEAR(shifted_critical(2.0, 0.0, 0.0, 0).value.value(), 2.0, 1e-12);
    EXPECT_TRUE(shifted_critical(0.0, 0.0, -0.5, 0).all_powers());
}

TEST(ShiftedCritical, SlowDecayConsistency) {
    for (double a : {0.5, 1.0, 2.0, 4.0}) {
        EXPECT_NEAR(shifted_critical(a, 0.0, 0.0, 0).value.value(), 1.0 + 2.0 / a, 1e-12);
        EXPECT_NEAR(shifted_critical(a, 0.0, 0.0, 0).value.value(), slow_decay_critical(a).value.value(), 1e-12);
    }
}

TEST(ShiftedCritical, ReductionAtZeroEll) {
    for (int j : {0, 1})
        for (double a : {-0.5, 0.2, 1.0, 3.0})
            for (double g : {0.0, 0.4, 1.5}) {
                if (a + g <= 0.0)
                    continue;
                EXPECT_NEAR(shifted_critical(a, g, 0.0, j).value.value(), 1.0 + (2.0 - j) / (a + g), 1e-12);
            }
}

TEST(ShiftedCritical, ResidualsOnGrid) {
    int finite = 0;
    for (int j : {0, 1})
        for (double a : {-0.5, 0.1, 0.5, 1.0, 3.0})
            for (double g : {0.0, 0.3, 1.0, 2.0, 5.0})
                for (double l : {-0.4, -1e-9, 0.0, 1e-9, 0.5, 2.0}) {
                    ExponentReport r;
                    try {
                        r = shifted_critical(a, g, l, j);
                    } catch (const DomainError&) {
                        continue;
                    }
                    if (r.all_powers()) {
                        EXPECT_LE(a + g + l, 0.0);
                        continue;
                    }
                    ++finite;
                    const double p = r.value.value();
                    EXPECT_GT(p, 1.0);
                    EXPECT_LT(std::abs(ShiftedQuadratic(a, g, l, j).residual(p)), 1e-10);
                }
    EXPECT_GE(finite, 100);
}

TEST(ShiftedCritical, NonincreasingInAlphaAndGamma) {
    for (double l : {-0.3, 0.0, 0.7}) {
        double prev = HUGE_VAL;
        for (double a = 0.5; a < 6.0; a += 0.25) {
            const double p = shifted_critical(a, 0.2, l, 0).value.value();
            EXPECT_LE(p, prev + 1e-12);
            prev = p;
        }
        prev = HUGE_VAL;
        for (double g = 0.0; g < 6.0; g += 0.25) {
            const double p = shifted_critical(0.7, g, l, 1).value.value();
            EXPECT_LE(p, prev + 1e-12);
            prev = p;
        }
    }
}

TEST(ShiftedCritical, RejectsNonFinite) { EXPECT_THROW(shifted_critical(NAN, 0, 0, 0), DomainError); }

TEST(LifespanKappa, Examples) {
    EXPECT_NEAR(lifespan_kappa(2.0, 1.0, 0.0, 0.0, 0).value.value(), 1.0, 1e-14);
    EXPECT_NEAR(lifespan_kappa(2.0, 0.5, 1.0, 0.0, 0).value.value(), 2.0, 1e-14);
    EXPECT_NEAR(lifespan_kappa(2.0, 0.0, 0.0, 0.0, 1).value.value(), 1.0, 1e-14);
    EXPECT_NEAR(classical_lifespan_exponent(1.5, 0.0, 1), 1.0, 1e-14);
    EXPECT_THROW(classical_lifespan_exponent(2.0, 0.0, 1), DomainError);
    EXPECT_THROW(lifespan_kappa(4.0, 1.0, 0.0, 0.0, 0), DomainError);
    EXPECT_THROW(lifespan_kappa(1.0, 1.0, 0.0, 0.0, 0), DomainError);
}

TEST(LifespanKappa, PositiveAndVanishingTowardOne) {
    const double pc = shifted_critical(1.0, 0.0, 0.5, 0).value.value();
    double prev = HUGE_VAL;
    for (double p = pc - 1e-3; p > 1.0 + 1e-6; p = 1.0 + 0.5 * (p - 1.0)) {
        const double k = lifespan_kappa(p, 1.0, 0.0, 0.5, 0).value.value();
        EXPECT_GT(k, 0.0);
        EXPECT_LT(k, prev);
        prev = k;
    }
    EXPECT_LT(prev, 1e-4);
}

TEST(LifespanKappa, MatchesClassicalForZeroFieldWithoutDerivative) {
    for (double a : {0.0, 0.5, 1.0})
        for (double p : {1.2, 1.5, 2.0})
            EXPECT_NEAR(lifespan_kappa(p, a, 0, 0, 0).value.value(), classical_lifespan_exponent(p, a, 0), 1e-12);
}
