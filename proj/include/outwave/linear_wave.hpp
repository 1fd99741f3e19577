#ifndef OUTWAVE_LINEAR_WAVE_HPP
#define OUTWAVE_LINEAR_WAVE_HPP

#include <cmath>
#include <string>
#include <vector>

#include "grid.hpp"
#include "norms.hpp"
#include "projection.hpp"

namespace outwave
{
    /// Number of grid steps k with t = k*h; throws unless t >= 0 is grid aligned.
    inline std::size_t aligned_steps(double t, double h)
    {
        if (!(t >= 0.0) || !std::isfinite(t))
            throw TimeAlignmentError("time must be finite and nonnegative");
        const double k = std::round(t / h);
        if (std::abs(t - k * h) > 1e-9 * std::max(1.0, t))
            throw TimeAlignmentError("time " + std::to_string(t) + " is not a multiple of h = " + std::to_string(h));
        return static_cast<std::size_t>(k);
    }

    /// Free radial wave flow Phi(t)(u0, u1) through the half-line reduction w = r*u.
    ///
    /// w solves w_tt = w_rr on r >= 0 with w(0, t) = 0, so w(r, t) = F(r - t) + G(r + t)
    /// with F(-x) = -G(x). The amplitudes come straight from the data:
    ///   G' = g = (w0' + w1)/2 = r * P-[1](u0, u1)    (incoming)
    ///   F' = (w0' - w1)/2     = -r * P+[1](u0, u1)   (outgoing)
    /// and G = cumulative trapezoid of g, F = w0 - G. Evaluating at t = k*h is a pure
    /// index shift. For outgoing data g is identically zero, so the solution is
    /// exactly the translate w0(r - t) and vanishes for r <= t.
    class LinearFlow
    {
    public:
        explicit LinearFlow(DataPair data)
            : data_(std::move(data)),
              w0_(data_.grid()), w1_(data_.grid()),
              incoming_(data_.grid()), outgoing_slope_(data_.grid()),
              outgoing_(data_.grid()), incoming_primitive_(data_.grid())
        {
            const RadialField& u0 = data_.position;
            const RadialField& u1 = data_.velocity;
            const RadialField flux = dr_plus_inv_r(u0);
            const std::size_t n = u0.size();

            // w0'(0) = u0(0); the product form r*(u0_r + u0/r) would lose it.
            incoming_[0] = 0.5 * u0[0];
            outgoing_slope_[0] = 0.5 * u0[0];
            for (std::size_t j = 1; j < n; ++j)
            {
                const double r = u0.r(j);
                w0_[j] = r * u0[j];
                w1_[j] = r * u1[j];
                incoming_[j] = 0.5 * r * (flux[j] + u1[j]);
                outgoing_slope_[j] = 0.5 * r * (flux[j] - u1[j]);
            }
            incoming_primitive_ = cumulative_integral(incoming_);
            for (std::size_t j = 0; j < n; ++j)
                outgoing_[j] = w0_[j] - incoming_primitive_[j];

            const double scale = outgoing_slope_.max_abs();
            outgoing_extent_ = 0;
            for (std::size_t j = n; j-- > 0;)
            {
                if (std::abs(outgoing_slope_[j]) > 1e-12 * scale && scale > 0.0)
                {
                    outgoing_extent_ = j;
                    break;
                }
            }
        }

        const DataPair& data() const { return data_; }
        const RadialGrid& grid() const { return data_.grid(); }
        const RadialField& w0() const { return w0_; }
        const RadialField& w1() const { return w1_; }

        /// g = r * P-[1]: identically zero for outgoing data.
        const RadialField& incoming_amplitude() const { return incoming_; }

        /// Largest grid time the outgoing profile can be shifted before its varying part leaves the grid.
        double max_time() const
        {
            return grid().h() * static_cast<double>(grid().size() - 1 - outgoing_extent_);
        }

        /// (u(t), u_t(t)) at the grid-aligned time t.
        DataPair propagate(double t) const
        {
            const std::size_t k = aligned_steps(t, grid().h());
            if (k == 0)
                return data_;
            if (outgoing_extent_ + k > grid().size() - 1)
                throw SupportOverflow("LinearFlow::propagate: wave leaves the grid before t = " + std::to_string(t));
            return evaluate(k);
        }

        /// propagate() without the overflow check. Values on the grid stay exact as long as
        /// the data continue outside r_max without an incoming part (e.g. a static c/r tail).
        DataPair propagate_unchecked(double t) const
        {
            const std::size_t k = aligned_steps(t, grid().h());
            return k == 0 ? data_ : evaluate(k);
        }

        /// r * [(d/dr + 1/r) Phi_0(t) + Phi_1(t)] = (d/dt + d/dr)(r Phi_0(t)) = 2 g(r + t).
        /// This is the forcing of the first-order form for data that are not outgoing.
        RadialField characteristic_forcing(double t) const
        {
            const std::size_t k = aligned_steps(t, grid().h());
            RadialField out(grid());
            for (std::size_t j = 1; j < out.size(); ++j)
                out[j] = 2.0 * incoming_at(j + k);
            return out;
        }

    private:
        DataPair evaluate(std::size_t k) const
        {
            const std::size_t n = grid().size();
            std::vector<double> w(n), wt(n);
            for (std::size_t j = 0; j < n; ++j)
            {
                w[j] = outgoing_at(static_cast<long>(j) - static_cast<long>(k)) + incoming_primitive_at(j + k);
                wt[j] = -outgoing_slope_at(static_cast<long>(j) - static_cast<long>(k)) + incoming_at(j + k);
            }
            return {to_u(w), to_u(wt)};
        }

        double outgoing_at(long m) const
        {
            return m >= 0 ? outgoing_[static_cast<std::size_t>(m)] : -incoming_primitive_at(static_cast<std::size_t>(-m));
        }

        double outgoing_slope_at(long m) const
        {
            return m >= 0 ? outgoing_slope_[static_cast<std::size_t>(m)] : incoming_at(static_cast<std::size_t>(-m));
        }

        double incoming_primitive_at(std::size_t m) const
        {
            const std::size_t n = incoming_primitive_.size();
            return m < n ? incoming_primitive_[m] : incoming_primitive_[n - 1];
        }

        double incoming_at(std::size_t m) const
        {
            return m < incoming_.size() ? incoming_[m] : 0.0;
        }

        /// u = w/r; at the origin the odd-extension limit w(h)/h.
        RadialField to_u(const std::vector<double>& w) const
        {
            RadialField u(grid());
            u[0] = w[1] / grid().h();
            for (std::size_t j = 1; j < u.size(); ++j)
                u[j] = w[j] / grid().r(j);
            return u;
        }

        DataPair data_;
        RadialField w0_, w1_;
        RadialField incoming_, outgoing_slope_;
        RadialField outgoing_, incoming_primitive_;
        std::size_t outgoing_extent_ = 0;
    };

    inline DataPair propagate(const LinearFlow& flow, double t)
    {
        return flow.propagate(t);
    }

    /// ||P- Phi(t) P+ data||_inf. Zero for the exact flow; O(h^2) discretely.
    /// The overflow check applies to the data: P+ data carries a static K[u1] tail up to r_max.
    inline double verify_causal_annihilation(const DataPair& data, double t)
    {
        LinearFlow(data).propagate(t);
        const LinearFlow flow(project_outgoing(data));
        return max_abs(project_incoming(flow.propagate_unchecked(t)));
    }

    struct LpMonotonicity
    {
        double lhs_drop;      ///< int |u(T)|^n - int |u0|^n
        double flux_integral; ///< int_0^T int |u|^n / |x| dx dt (trapezoid in t)
    };

    /// Both sides of the outgoing free-flow identity
    ///   int |u(T)|^n = int |u0|^n - (n - 2) int_0^T int |u|^n / |x|.
    /// The data are (u0, -(u0)_r - u0/r); checkpoints t_i = i*T/steps must be grid aligned.
    inline LpMonotonicity linear_lp_monotonicity(const RadialField& u0, double n, double T, std::size_t steps)
    {
        if (!(n >= 2.0))
            throw ConfigError("linear_lp_monotonicity: exponent must be >= 2");
        if (steps == 0)
            throw ConfigError("linear_lp_monotonicity: need at least one step");
        const double h = u0.h();
        const std::size_t total = aligned_steps(T, h);
        if (total % steps != 0)
            throw TimeAlignmentError("linear_lp_monotonicity: T/steps is not a multiple of h");
        const std::size_t stride = total / steps;
        for (std::size_t j = 0; j < u0.size() && u0.r(j) < 1.5 * h; ++j)
            if (std::abs(u0[j]) > origin_tolerance)
                throw SupportViolation("linear_lp_monotonicity: u0 must be supported away from the origin");

        const LinearFlow flow(make_outgoing(u0));
        auto mass = [n](const RadialField& u) { return radial_quadrature(u, [n](double x) { return abs_pow(x, n); }); };
        auto flux = [n](const RadialField& u) {
            double s = 0.0;
            for (std::size_t j = 1; j < u.size(); ++j)
                s += (j + 1 == u.size() ? 0.5 : 1.0) * abs_pow(u[j], n) * u.r(j);
            return four_pi * s * u.h();
        };

        std::vector<double> fluxes(steps + 1);
        double first = 0.0, last = 0.0;
        for (std::size_t i = 0; i <= steps; ++i)
        {
            const RadialField u = flow.propagate(static_cast<double>(i * stride) * h).position;
            fluxes[i] = flux(u);
            if (i == 0)
                first = mass(u);
            if (i == steps)
                last = mass(u);
        }
        return {last - first, trapezoid(fluxes, static_cast<double>(stride) * h)};
    }
} // namespace outwave

#endif
