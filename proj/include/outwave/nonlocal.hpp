#ifndef OUTWAVE_NONLOCAL_HPP
#define OUTWAVE_NONLOCAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "grid.hpp"
#include "norms.hpp"
#include "parallel.hpp"

namespace outwave
{
    /// K[f](r) = (1/r) int_0^r rho f(rho) drho.
    ///
    /// The inner integral is the cumulative trapezoid of rho*f, so K is exact on
    /// constants and K[f](r) = 0 wherever f vanishes on [0, r]. K[f](0) is the
    /// limit value 0.
    inline RadialField apply_K(const RadialField& f)
    {
        RadialField weighted(f.grid());
        for (std::size_t j = 0; j < f.size(); ++j)
            weighted[j] = f.r(j) * f[j];
        RadialField out = cumulative_integral(weighted);
        out[0] = 0.0;
        for (std::size_t j = 1; j < f.size(); ++j)
            out[j] /= f.r(j);
        return out;
    }

    namespace detail
    {
        /// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
        inline double unit_uniform(std::mt19937_64& gen)
        {
            return static_cast<double>(gen() >> 11) * 0x1.0p-53;
        }

        inline double uniform(std::mt19937_64& gen, double lo, double hi)
        {
            return lo + (hi - lo) * unit_uniform(gen);
        }

        inline std::mt19937_64 trial_generator(std::uint64_t seed, std::uint64_t trial)
        {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
            return std::mt19937_64(seq);
        }
    } // namespace detail

    /// Random smooth compactly supported field: a (1-s^2)^4 window times a random
    /// cosine series on a random interval in the inner 60% of the grid. Never all zero.
    inline RadialField random_fourier_bump(const RadialGrid& grid, std::mt19937_64& gen)
    {
        const double r_max = grid.r_max();
        const double min_width = 8.0 * grid.h();
        for (;;)
        {
            const double a = detail::uniform(gen, 0.0, 0.3 * r_max);
            const double width = std::max(min_width, detail::uniform(gen, 0.05, 0.3) * r_max);
            const double b = a + width;
            const int modes = 1 + static_cast<int>(detail::unit_uniform(gen) * 6.0);
            std::vector<double> coeff(static_cast<std::size_t>(modes));
            for (double& c : coeff)
                c = detail::uniform(gen, -1.0, 1.0);

            RadialField f = RadialField::sample(grid, [&](double r) {
                if (r <= a || r >= b)
                    return 0.0;
                const double s = (2.0 * r - a - b) / (b - a);
                const double window = std::pow(1.0 - s * s, 4);
                double series = 0.0;
                for (int k = 0; k < modes; ++k)
                    series += coeff[static_cast<std::size_t>(k)] * std::cos(k * std::numbers::pi * s);
                return window * series;
            });
            if (f.max_abs() > 1e-8)
                return f;
        }
    }

    /// Empirical bound of K from L^2 into the homogeneous H^1 (both with radial measure):
    /// the largest ratio ||K f||_{H^1} / ||f||_{L^2} over `trials` random bumps.
    /// Trial i draws from a generator seeded by (seed, i), so the result does not
    /// depend on the number of workers.
    inline double estimate_operator_norm_L2_to_H1(const RadialGrid& grid, std::size_t trials, std::uint64_t seed)
    {
        if (trials < 100)
            throw ConfigError("estimate_operator_norm_L2_to_H1: need at least 100 trials");
        std::vector<double> ratios(trials, 0.0);
        parallel_for(trials, [&](std::size_t i) {
            auto gen = detail::trial_generator(seed, i);
            const RadialField f = random_fourier_bump(grid, gen);
            ratios[i] = h1_norm(apply_K(f)) / lp_norm(f, 2.0);
        });
        return *std::max_element(ratios.begin(), ratios.end());
    }

    /// Headroom used when asserting the away-from-zero bound lhs <= C * rhs_scale.
    inline constexpr double away_from_zero_constant = 10.0;

    struct AwayFromZeroBound
    {
        double lhs;       ///< max_j |K[f]_j|
        double rhs_scale; ///< R^{1-3/p} ||f||_{L^p}
    };

    /// Both sides of ||K f||_inf <~ R^{1-3/p} ||f||_{L^p} for f vanishing on [0, R), 1 <= p <= 2.
    inline AwayFromZeroBound verify_away_from_zero_bound(const RadialField& f, double R, double p)
    {
        if (!(R > 0.0))
            throw ConfigError("verify_away_from_zero_bound: R must be positive");
        if (!(p >= 1.0 && p <= 2.0))
            throw ConfigError("verify_away_from_zero_bound: p must lie in [1, 2]");
        const double scale = f.max_abs();
        for (std::size_t j = 0; j < f.size() && f.r(j) < R; ++j)
            if (std::abs(f[j]) > 1e-14 * scale)
                throw SupportViolation("verify_away_from_zero_bound: f is nonzero below R");
        return {apply_K(f).max_abs(), std::pow(R, 1.0 - 3.0 / p) * lp_norm(f, p)};
    }
} // namespace outwave

#endif
