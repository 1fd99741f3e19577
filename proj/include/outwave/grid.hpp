#ifndef OUTWAVE_GRID_HPP
#define OUTWAVE_GRID_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "math.hpp"

namespace outwave
{
    /// Uniform nodes r_j = j*h, j = 0..n_points-1, on [0, r_max].
    class RadialGrid
    {
    public:
        static constexpr std::size_t min_points = 16;

        RadialGrid(std::size_t n_points, double r_max)
            : n_(n_points), r_max_(r_max)
        {
            if (n_points < min_points)
                throw ConfigError("RadialGrid: need at least 16 nodes, got " + std::to_string(n_points));
            if (!(r_max > 0.0) || !std::isfinite(r_max))
                throw ConfigError("RadialGrid: r_max must be positive and finite");
            h_ = r_max / static_cast<double>(n_points - 1);
        }

        std::size_t size() const { return n_; }
        double h() const { return h_; }
        double r_max() const { return r_max_; }
        double r(std::size_t j) const { return static_cast<double>(j) * h_; }

        /// Index of the node nearest to radius x (clamped to the grid).
        std::size_t index_of(double x) const
        {
            if (x <= 0.0)
                return 0;
            const double k = std::round(x / h_);
            return k >= static_cast<double>(n_ - 1) ? n_ - 1 : static_cast<std::size_t>(k);
        }

        std::vector<double> nodes() const
        {
            std::vector<double> out(n_);
            for (std::size_t j = 0; j < n_; ++j)
                out[j] = r(j);
            return out;
        }

        friend bool operator==(const RadialGrid& a, const RadialGrid& b)
        {
            return a.n_ == b.n_ && a.h_ == b.h_;
        }

    private:
        std::size_t n_;
        double r_max_;
        double h_;
    };

    inline RadialGrid make_grid(std::size_t n_points, double r_max)
    {
        return RadialGrid(n_points, r_max);
    }

    /// Samples values[j] ~ f(r_j) of a radial function. Holds its grid by value.
    class RadialField
    {
    public:
        explicit RadialField(const RadialGrid& grid)
            : grid_(grid), values_(grid.size(), 0.0)
        {
        }

        RadialField(const RadialGrid& grid, std::vector<double> values)
            : grid_(grid), values_(std::move(values))
        {
            if (values_.size() != grid_.size())
                throw ConfigError("RadialField: sample count does not match grid");
        }

        template <class F>
        static RadialField sample(const RadialGrid& grid, F&& f)
        {
            RadialField out(grid);
            for (std::size_t j = 0; j < grid.size(); ++j)
                out.values_[j] = f(grid.r(j));
            return out;
        }

        const RadialGrid& grid() const { return grid_; }
        std::size_t size() const { return values_.size(); }
        double h() const { return grid_.h(); }
        double r(std::size_t j) const { return grid_.r(j); }

        double& operator[](std::size_t j) { return values_[j]; }
        double operator[](std::size_t j) const { return values_[j]; }

        std::span<double> values() { return values_; }
        std::span<const double> values() const { return values_; }
        const std::vector<double>& data() const { return values_; }

        bool all_finite() const
        {
            return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
        }

        double max_abs() const
        {
            double m = 0.0;
            for (double x : values_)
                m = std::max(m, std::abs(x));
            return m;
        }

        template <class F>
        RadialField map(F&& f) const
        {
            RadialField out(grid_);
            for (std::size_t j = 0; j < values_.size(); ++j)
                out.values_[j] = f(values_[j]);
            return out;
        }

        RadialField& operator+=(const RadialField& o)
        {
            require_same_grid(o);
            for (std::size_t j = 0; j < values_.size(); ++j)
                values_[j] += o.values_[j];
            return *this;
        }

        RadialField& operator-=(const RadialField& o)
        {
            require_same_grid(o);
            for (std::size_t j = 0; j < values_.size(); ++j)
                values_[j] -= o.values_[j];
            return *this;
        }

        RadialField& operator*=(double c)
        {
            for (double& x : values_)
                x *= c;
            return *this;
        }

        void require_same_grid(const RadialField& o) const
        {
            if (!(grid_ == o.grid_))
                throw ConfigError("RadialField: operands live on different grids");
        }

    private:
        RadialGrid grid_;
        std::vector<double> values_;
    };

    inline RadialField operator+(RadialField a, const RadialField& b) { return a += b; }
    inline RadialField operator-(RadialField a, const RadialField& b) { return a -= b; }
    inline RadialField operator*(double c, RadialField a) { return a *= c; }
    inline RadialField operator*(RadialField a, double c) { return a *= c; }

    /// max_j |a_j - b_j|
    inline double max_abs_diff(const RadialField& a, const RadialField& b)
    {
        a.require_same_grid(b);
        double m = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j)
            m = std::max(m, std::abs(a[j] - b[j]));
        return m;
    }

    /// Cauchy data (u0, u1) on one grid.
    struct DataPair
    {
        RadialField position;
        RadialField velocity;

        DataPair(RadialField u0, RadialField u1)
            : position(std::move(u0)), velocity(std::move(u1))
        {
            position.require_same_grid(velocity);
        }

        static DataPair zero(const RadialGrid& grid) { return {RadialField(grid), RadialField(grid)}; }

        const RadialGrid& grid() const { return position.grid(); }
    };

    inline double max_abs_diff(const DataPair& a, const DataPair& b)
    {
        return std::max(max_abs_diff(a.position, b.position), max_abs_diff(a.velocity, b.velocity));
    }

    inline double max_abs(const DataPair& d)
    {
        return std::max(d.position.max_abs(), d.velocity.max_abs());
    }

    /// d/dr: centered differences inside, second-order one-sided stencils at both ends.
    inline RadialField deriv_r(const RadialField& f)
    {
        const std::size_t n = f.size();
        const double inv2h = 1.0 / (2.0 * f.h());
        RadialField out(f.grid());
        out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv2h;
        for (std::size_t j = 1; j + 1 < n; ++j)
            out[j] = (f[j + 1] - f[j - 1]) * inv2h;
        out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv2h;
        return out;
    }

    /// F[j] = int_0^{r_j} f, cumulative trapezoid, F[0] = 0.
    inline RadialField cumulative_integral(const RadialField& f)
    {
        const double half_h = 0.5 * f.h();
        RadialField out(f.grid());
        double acc = 0.0;
        for (std::size_t j = 1; j < f.size(); ++j)
        {
            acc += half_h * (f[j - 1] + f[j]);
            out[j] = acc;
        }
        return out;
    }

    /// Trapezoid sum of samples with spacing h.
    inline double trapezoid(std::span<const double> f, double h)
    {
        if (f.size() < 2)
            return 0.0;
        double s = 0.5 * (f.front() + f.back());
        for (std::size_t j = 1; j + 1 < f.size(); ++j)
            s += f[j];
        return s * h;
    }

    /// 4*pi * int_0^{r_max} g(f(r)) r^2 dr without any support check.
    template <class G>
    double radial_quadrature(const RadialField& f, G&& g)
    {
        const std::size_t n = f.size();
        const double h = f.h();
        double s = 0.0;
        for (std::size_t j = 1; j < n; ++j)
        {
            const double r = f.r(j);
            const double w = (j + 1 == n) ? 0.5 : 1.0;
            s += w * g(f[j]) * r * r;
        }
        return four_pi * s * h;
    }

    inline double radial_quadrature(const RadialField& f)
    {
        return radial_quadrature(f, [](double x) { return x; });
    }

    /// Fraction of the outer nodes on which radial_integral requires |f| <= decay_tolerance.
    inline constexpr double outer_band_fraction = 0.05;
    inline constexpr double decay_tolerance = 1e-10;

    /// True when f is negligible on the outer 5% of nodes.
    inline bool decays_inside_grid(const RadialField& f, double tol = decay_tolerance)
    {
        const std::size_t n = f.size();
        const auto band = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(outer_band_fraction * static_cast<double>(n))));
        for (std::size_t j = n - band; j < n; ++j)
            if (std::abs(f[j]) > tol)
                return false;
        return true;
    }

    /// Integral over R^3 of a radial function: 4*pi * int f r^2 dr.
    /// Throws SupportOverflow when f has not decayed before the edge of the grid.
    inline double radial_integral(const RadialField& f)
    {
        if (!decays_inside_grid(f))
            throw SupportOverflow("radial_integral: integrand does not decay inside the grid");
        return radial_quadrature(f);
    }
} // namespace outwave

#endif
