#ifndef OUTWAVE_MATH_HPP
#define OUTWAVE_MATH_HPP

#include <cmath>
#include <numbers>

namespace outwave
{
    inline constexpr double four_pi = 4.0 * std::numbers::pi;

    namespace detail
    {
        /// Exponents that are small nonnegative integers get repeated multiplication;
        /// the solvers evaluate |u|^N u at every node of every stage.
        inline bool small_integer(double p, int& k)
        {
            if (p >= 0.0 && p <= 32.0 && p == std::floor(p))
            {
                k = static_cast<int>(p);
                return true;
            }
            return false;
        }

        inline double int_pow(double x, int k)
        {
            double result = 1.0;
            while (k > 0)
            {
                if (k & 1)
                    result *= x;
                x *= x;
                k >>= 1;
            }
            return result;
        }
    } // namespace detail

    /// |x|^p
    inline double abs_pow(double x, double p)
    {
        int k = 0;
        if (detail::small_integer(p, k))
            return detail::int_pow(std::abs(x), k);
        return std::pow(std::abs(x), p);
    }

    /// |x|^p x, the sign-preserving power of the nonlinearity.
    inline double signed_pow(double x, double p)
    {
        return abs_pow(x, p) * x;
    }
} // namespace outwave

#endif
