#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "outwave/grid.hpp"
#include "outwave/norms.hpp"

using namespace outwave;

TEST(RadialGrid, SpacingAndNodes)
{
    const RadialGrid g = make_grid(101, 10.0);
    EXPECT_DOUBLE_EQ(g.h(), 0.1);
    EXPECT_DOUBLE_EQ(g.r(50), 5.0);
    EXPECT_EQ(g.size(), 101u);

    const RadialGrid small = make_grid(16, 1.5);
    EXPECT_DOUBLE_EQ(small.h(), 0.1);
    EXPECT_DOUBLE_EQ(small.r(0), 0.0);
    EXPECT_DOUBLE_EQ(small.r(15), 1.5);
}

TEST(RadialGrid, RejectsBadParameters)
{
    EXPECT_THROW(make_grid(8, 1.0), ConfigError);
    EXPECT_THROW(make_grid(100, 0.0), ConfigError);
    EXPECT_THROW(make_grid(100, -1.0), ConfigError);
}

TEST(RadialField, GridMismatchIsRejected)
{
    const RadialField a(make_grid(32, 1.0));
    const RadialField b(make_grid(33, 1.0));
    EXPECT_THROW(a + b, ConfigError);
    EXPECT_THROW(max_abs_diff(a, b), ConfigError);
}

TEST(Deriv, ConstantAndQuadratic)
{
    const RadialGrid g = make_grid(201, 4.0);
    const RadialField c = RadialField::sample(g, [](double) { return 3.0; });
    EXPECT_LE(deriv_r(c).max_abs(), 1e-12);

    const RadialField q = RadialField::sample(g, [](double r) { return r * r; });
    const RadialField dq = deriv_r(q);
    for (std::size_t j = 0; j < g.size(); ++j)
        EXPECT_NEAR(dq[j], 2.0 * g.r(j), 1e-12);
}

TEST(Deriv, SecondOrderOnSine)
{
    auto err = [](std::size_t n) {
        const RadialGrid g = make_grid(n, 3.0);
        const RadialField d = deriv_r(RadialField::sample(g, [](double r) { return std::sin(r); }));
        double e = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j)
            e = std::max(e, std::abs(d[j] - std::cos(g.r(j))));
        return e;
    };
    const double order = oracle::observed_order(err(301), err(601));
    EXPECT_NEAR(order, 2.0, 0.1);
}

TEST(CumulativeIntegral, Polynomials)
{
    const RadialGrid g = make_grid(41, 2.0);
    const RadialField one = cumulative_integral(RadialField::sample(g, [](double) { return 1.0; }));
    const RadialField lin = cumulative_integral(RadialField::sample(g, [](double r) { return r; }));
    const RadialField sq = cumulative_integral(RadialField::sample(g, [](double r) { return r * r; }));
    for (std::size_t j = 0; j < g.size(); ++j)
    {
        EXPECT_NEAR(one[j], g.r(j), 1e-12);
        EXPECT_NEAR(lin[j], 0.5 * g.r(j) * g.r(j), 1e-12);
    }
    // The trapezoid overshoots int_0^2 rho^2 by exactly 2 h^2/6 = 8.3e-4 at h = 0.05.
    const double h = g.h();
    EXPECT_NEAR(sq[g.size() - 1] - 8.0 / 3.0, 2.0 * h * h / 6.0, 1e-12);

    // a 10x finer trapezoid lands 100x closer
    const RadialGrid fine = make_grid(401, 2.0);
    const RadialField sq_fine = cumulative_integral(RadialField::sample(fine, [](double r) { return r * r; }));
    EXPECT_NEAR(sq_fine[fine.size() - 1], 8.0 / 3.0, 1e-5);
    EXPECT_NEAR((sq[g.size() - 1] - 8.0 / 3.0) / (sq_fine[fine.size() - 1] - 8.0 / 3.0), 100.0, 1e-6);
}

TEST(CumulativeIntegral, InvertsDerivative)
{
    auto err = [](std::size_t n) {
        const RadialGrid g = make_grid(n, 3.0);
        const RadialField f = RadialField::sample(g, [](double r) { return std::sin(2.0 * r) * std::exp(-r); });
        const RadialField back = cumulative_integral(deriv_r(f));
        double e = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j)
            e = std::max(e, std::abs(back[j] - (f[j] - f[0])));
        return e;
    };
    EXPECT_GE(oracle::observed_order(err(301), err(601)), 1.9);
}

TEST(CumulativeIntegral, LinearAndMonotone)
{
    const RadialGrid g = make_grid(257, 5.0);
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial)
    {
        const double a = U(gen), b = U(gen);
        const double ph = 3.0 * U(gen);
        const double decay = 1.5 + U(gen);
        const RadialField f = RadialField::sample(g, [&](double r) { return std::cos(r + ph); });
        const RadialField k = RadialField::sample(g, [&](double r) { return std::exp(-decay * r); });
        const RadialField lhs = cumulative_integral(a * f + b * k);
        const RadialField rhs = a * cumulative_integral(f) + b * cumulative_integral(k);
        EXPECT_LE(max_abs_diff(lhs, rhs), 1e-12);

        const RadialField pos = f.map([](double x) { return x * x; });
        const RadialField c = cumulative_integral(pos);
        for (std::size_t j = 1; j < g.size(); ++j)
            ASSERT_GE(c[j], c[j - 1]);
    }
}

TEST(RadialIntegral, Gaussian)
{
    const RadialGrid g = make_grid(1001, 10.0);
    const RadialField f = RadialField::sample(g, [](double r) { return std::exp(-r * r); });
    EXPECT_NEAR(radial_integral(f), std::pow(std::numbers::pi, 1.5), 1e-6);
    EXPECT_EQ(radial_integral(RadialField(g)), 0.0);
}

TEST(RadialIntegral, ThrowsWhenIntegrandReachesTheEdge)
{
    const RadialGrid g = make_grid(101, 1.0);
    const RadialField f = RadialField::sample(g, [](double r) { return r; });
    EXPECT_THROW(radial_integral(f), SupportOverflow);
    EXPECT_NO_THROW(radial_quadrature(f));
}

TEST(Norms, GaussianL2MatchesClosedForm)
{
    const RadialGrid g = make_grid(2001, 10.0);
    const RadialField f = RadialField::sample(g, [](double r) { return std::exp(-r * r); });
    EXPECT_NEAR(lp_norm(f, 2.0), std::sqrt(oracle::gaussian_l2_squared()), 1e-6);
    EXPECT_EQ(lp_norm(RadialField(g), 3.0), 0.0);
    EXPECT_THROW(lp_norm(f, 0.5), ConfigError);
}

TEST(Norms, Homogeneity)
{
    const RadialGrid g = make_grid(513, 8.0);
    const RadialField f = RadialField::sample(g, oracle::bump(1.0, 3.0));
    for (double c : {-2.0, 0.5, 3.0})
    {
        const RadialField cf = c * f;
        EXPECT_NEAR(lp_norm(cf, 8.0), std::abs(c) * lp_norm(f, 8.0), 1e-12 * std::abs(c) * lp_norm(f, 8.0));
        EXPECT_NEAR(h1_norm(cf), std::abs(c) * h1_norm(f), 1e-12 * std::abs(c) * h1_norm(f));
        EXPECT_DOUBLE_EQ(sup_norm(cf), std::abs(c) * sup_norm(f));
    }
}

TEST(Norms, H1ScalingInvarianceForFourthPower)
{
    // u -> lambda^{1/2} u(lambda r) leaves the homogeneous H^1 norm unchanged on R^3.
    const RadialGrid g = make_grid(8193, 8.0);
    const auto u = oracle::bump(1.0, 3.0);
    const RadialField a = RadialField::sample(g, u);
    const RadialField b = RadialField::sample(g, [&](double r) { return std::sqrt(2.0) * u(2.0 * r); });
    EXPECT_NEAR(h1_norm(b) / h1_norm(a), 1.0, 1e-4);
}
