#include <blowup/oracles.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace blowup;
using namespace blowup::oracles;

TEST(SphericalMeans, UnitVelocityGivesT) {
    auto one = [](double) { return 1.0; };
    for (double t : {0.0, 0.5, 2.0, 7.0})
        for (double r : {0.25, 1.0, 3.0, 10.0})
            EXPECT_NEAR(spherical_means_n3(one, t, r), t, 1e-12) << t << " " << r;
}

TEST(SphericalMeans, InverseProfileGivesTOverR) {
    auto inv = [](double l) { return 1.0 / l; };
    for (double t : {0.5, 1.0, 2.0})
        for (double r : {3.0, 5.0, 11.0})
            EXPECT_NEAR(spherical_means_n3(inv, t, r), t / r, 1e-12);
}

TEST(SphericalMeans, PowerDataClosedForm) {
    // lambda (1+lambda)^-2 has antiderivative log(1+lambda) + 1/(1+lambda)
    const double M = 1.7;
    auto psi = [M](double l) { return M / ((1.0 + l) * (1.0 + l)); };
    auto F = [](double l) { return std::log1p(l) + 1.0 / (1.0 + l); };
    for (double t : {0.3, 1.0, 4.0})
        for (double r : {5.0, 8.0, 20.0}) {
            const double exact = M / (2.0 * r) * (F(r + t) - F(r - t));
            EXPECT_NEAR(spherical_means_n3(psi, t, r), exact, 1e-12);
        }
}

TEST(SphericalMeans, RejectsBadArguments) {
    auto one = [](double) { return 1.0; };
    EXPECT_THROW(spherical_means_n3(one, 1.0, 0.0), DomainError);
    EXPECT_THROW(spherical_means_n3(one, -1.0, 1.0), DomainError);
}

TEST(LowerBound, Examples) {
    auto one = [](double) { return 1.0; };
    // (1/(8r)) ((r+t)^2 - (r-t)^2)/2 = t/4
    EXPECT_NEAR(takamura_lower_bound(one, 1.0, 3.0, 1, 0.5), 0.25, 1e-12);
    auto lin = [](double l) { return l; };
    const double t = 1.0, r = 2.0;
    EXPECT_NEAR(takamura_lower_bound(lin, t, r, 1, 0.5), (std::pow(r + t, 3) - std::pow(r - t, 3)) / 3.0 / (8.0 * r),
                1e-12);
    EXPECT_LT(takamura_lower_bound(one, 1e-8, 1.0, 1, 0.5), 1e-8);
    EXPECT_THROW(takamura_lower_bound(one, 1.0, 1.2, 1, 0.5), DomainError);
}

TEST(LowerBound, BelowSphericalMeans) {
    const std::vector<std::function<double(double)>> profiles = {
        [](double) { return 1.0; }, [](double l) { return std::pow(1.0 + l, -2.0); },
        [](double l) { return std::exp(-0.1 * l); }, [](double l) { return 1.0 + std::sin(l); }};
    for (const auto& psi : profiles)
        for (double t : {0.5, 2.0, 10.0})
            for (double f : {1.5, 2.0, 5.0}) {
                const double r = f * t;
                EXPECT_LE(takamura_lower_bound(psi, t, r, 1, 0.5), spherical_means_n3(psi, t, r) + 1e-13);
            }
}

TEST(BetaIntegral, Examples) {
    EXPECT_NEAR(beta_integral(0.0, 1.0).exact, 0.5, 1e-15);
    EXPECT_NEAR(beta_integral(2.0, 1.0).exact, 1.0 / 12.0, 1e-15);
    const auto b = beta_integral(2.5, 3.0);
    EXPECT_NEAR(b.exact, std::pow(3.0, 4.5) / (3.5 * 4.5), 1e-12);
    EXPECT_NEAR(b.quadrature, b.exact, 1e-10 * b.exact);
    const auto s = beta_integral(-0.5, 2.0);
    EXPECT_NEAR(s.quadrature, s.exact, 1e-10 * s.exact);
    EXPECT_THROW(beta_integral(-1.0, 1.0), DomainError);
    EXPECT_THROW(beta_integral(1.0, 0.0), DomainError);
}

TEST(Report, Deviations) {
    const auto r = compare("x", "a=1", 2.0, 2.5);
    EXPECT_DOUBLE_EQ(r.abs_dev, 0.5);
    EXPECT_DOUBLE_EQ(r.rel_dev, 0.25);
    EXPECT_TRUE(r.within(0.5));
    EXPECT_FALSE(r.within(0.4));
    EXPECT_FALSE(compare("y", "", 1.0, NAN).within(1.0));
}
