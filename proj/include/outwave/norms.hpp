#ifndef OUTWAVE_NORMS_HPP
#define OUTWAVE_NORMS_HPP

#include <cmath>

#include "grid.hpp"

namespace outwave
{
    /// (4*pi * int |u|^p r^2 dr)^{1/p}
    inline double lp_norm(const RadialField& u, double p)
    {
        if (!(p >= 1.0))
            throw ConfigError("lp_norm: exponent must be >= 1");
        const double s = radial_quadrature(u, [p](double x) { return abs_pow(x, p); });
        return std::pow(s, 1.0 / p);
    }

    /// (int_0^{r_max} |u|^p dr)^{1/p}, the norm on the half-line without the r^2 weight.
    inline double line_lp_norm(const RadialField& u, double p)
    {
        if (!(p >= 1.0))
            throw ConfigError("line_lp_norm: exponent must be >= 1");
        std::vector<double> g(u.size());
        for (std::size_t j = 0; j < u.size(); ++j)
            g[j] = abs_pow(u[j], p);
        return std::pow(trapezoid(g, u.h()), 1.0 / p);
    }

    inline double sup_norm(const RadialField& u) { return u.max_abs(); }

    /// Discrete homogeneous H^1 norm: (4*pi * int (du/dr)^2 r^2 dr)^{1/2}.
    inline double h1_norm(const RadialField& u)
    {
        const RadialField du = deriv_r(u);
        return std::sqrt(radial_quadrature(du, [](double x) { return x * x; }));
    }
} // namespace outwave

#endif
