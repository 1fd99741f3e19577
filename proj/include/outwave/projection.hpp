#ifndef OUTWAVE_PROJECTION_HPP
#define OUTWAVE_PROJECTION_HPP

#include <cmath>

#include "grid.hpp"
#include "nonlocal.hpp"

namespace outwave
{
    /// |u0(0)| above this makes u0/r singular at the origin.
    inline constexpr double origin_tolerance = 1e-10;

    inline bool origin_singular(const RadialField& u0)
    {
        return std::abs(u0[0]) > origin_tolerance;
    }

    /// (d/dr + 1/r) u0. At r = 0, u0/r is replaced by its limit du0/dr(0), which is
    /// only meaningful when u0(0) = 0; callers check origin_singular() first.
    inline RadialField dr_plus_inv_r(const RadialField& u0)
    {
        RadialField out = deriv_r(u0);
        const double slope0 = out[0];
        for (std::size_t j = 1; j < u0.size(); ++j)
            out[j] += u0[j] / u0.r(j);
        out[0] += slope0;
        return out;
    }

    namespace detail
    {
        /// sign = +1 builds P+, sign = -1 builds P-.
        inline DataPair project(const DataPair& data, double sign, bool& singular)
        {
            const RadialField& u0 = data.position;
            const RadialField& u1 = data.velocity;
            singular = origin_singular(u0);

            const RadialField k1 = apply_K(u1);
            const RadialField flux = dr_plus_inv_r(u0);
            RadialField p0(u0.grid());
            RadialField p1(u0.grid());
            for (std::size_t j = 0; j < u0.size(); ++j)
            {
                p0[j] = 0.5 * (u0[j] - sign * k1[j]);
                p1[j] = 0.5 * (u1[j] - sign * flux[j]);
            }
            if (singular)
                p1[0] = 0.0;
            return {std::move(p0), std::move(p1)};
        }
    } // namespace detail

    /// P+(u0, u1) = ( (u0 - K[u1])/2, (-(u0)_r - u0/r + u1)/2 ).
    /// When u0(0) != 0 the velocity is only meaningful for r > 0 and is reported as 0 at the origin.
    inline DataPair project_outgoing(const DataPair& data)
    {
        bool singular = false;
        return detail::project(data, +1.0, singular);
    }

    /// P-(u0, u1) = ( (u0 + K[u1])/2, ((u0)_r + u0/r + u1)/2 ).
    inline DataPair project_incoming(const DataPair& data)
    {
        bool singular = false;
        return detail::project(data, -1.0, singular);
    }

    struct ProjectionResult
    {
        DataPair outgoing;
        DataPair incoming;
        bool origin_singular = false; ///< u0(0) != 0: velocity components are valid on r > 0 only
    };

    inline ProjectionResult decompose(const DataPair& data)
    {
        bool singular = false;
        DataPair out = detail::project(data, +1.0, singular);
        DataPair in = detail::project(data, -1.0, singular);
        return {std::move(out), std::move(in), singular};
    }

    /// Outgoing data with position u0: (u0, -(u0)_r - u0/r).
    /// The second component of P- vanishes identically on the result.
    inline DataPair make_outgoing(const RadialField& u0)
    {
        if (origin_singular(u0))
            throw OriginSingularity("make_outgoing: u0(0) must vanish");
        RadialField u1 = dr_plus_inv_r(u0);
        u1 *= -1.0;
        return {u0, std::move(u1)};
    }
} // namespace outwave

#endif
