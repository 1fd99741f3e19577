#ifndef OUTWAVE_DIAGNOSTICS_HPP
#define OUTWAVE_DIAGNOSTICS_HPP

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <vector>

#include "grid.hpp"
#include "norms.hpp"

namespace outwave
{
    /// Scalar observables of one checkpoint.
    struct DiagnosticsRecord
    {
        double t = 0.0;
        std::map<double, double> lp_norms; ///< p -> ||u(t)||_{L^p}, radial measure
        double sup_norm = 0.0;
        double h1_norm = 0.0;
        double energy_E0 = 0.0;      ///< int |grad u|^2 + v^2 over R^3
        double flux_Np2 = 0.0;       ///< int |u|^{N+2} / |x|
        double flux_sq = 0.0;        ///< (int |u|^N u / |x|)^2
        double line_norm_Np2 = 0.0;  ///< (int_0^inf |u|^{N+2} dr)^{1/(N+2)}
        double support_inner = 0.0;
        double support_outer = 0.0;
        double res_conserv = 0.0;    ///< running residual of the L^{N+2} balance
        double res_energy = 0.0;     ///< running residual of the energy balance
        double sup_sq_integral = 0.0; ///< running int_0^t ||u||_inf^2

        /// ||u||_{L^p}^p, read from lp_norms.
        double lp_power(double p) const
        {
            const auto it = lp_norms.find(p);
            if (it == lp_norms.end())
                throw ConfigError("DiagnosticsRecord: L^p norm not recorded for requested p");
            return std::pow(it->second, p);
        }
    };

    using History = std::vector<DiagnosticsRecord>;

    /// Threshold below which |u| counts as outside the support.
    inline constexpr double support_tolerance = 1e-12;

    struct SupportRadius
    {
        double inner; ///< radius of the first node with |u| > tol (r_max if none)
        double outer; ///< radius of the last node with |u| > tol (0 if none)
    };

    inline SupportRadius support_radius(const RadialField& u, double tol = support_tolerance)
    {
        if (!(tol > 0.0))
            throw ConfigError("support_radius: tolerance must be positive");
        SupportRadius s{u.grid().r_max(), 0.0};
        const std::size_t n = u.size();
        for (std::size_t j = 0; j < n; ++j)
        {
            if (std::abs(u[j]) > tol)
            {
                s.inner = u.r(j);
                break;
            }
        }
        for (std::size_t j = n; j-- > 0;)
        {
            if (std::abs(u[j]) > tol)
            {
                s.outer = u.r(j);
                break;
            }
        }
        return s;
    }

    /// E0 = 4*pi * int ((du/dr)^2 + v^2) r^2 dr over R^3, evaluated in w = r*u as
    /// 4*pi * int (w_r^2 + (r v)^2) dr: the two agree for u regular at 0, and behind the
    /// front w is constant, so the 1/r tail outside the grid adds no w_r energy.
    /// w_r uses forward differences, the energy the free system scheme conserves.
    inline double energy_E0(const RadialField& u, const RadialField& v)
    {
        u.require_same_grid(v);
        const double h = u.h();
        double grad = 0.0, kin = 0.0;
        for (std::size_t j = 0; j + 1 < u.size(); ++j)
        {
            const double dw = u.r(j + 1) * u[j + 1] - u.r(j) * u[j];
            grad += dw * dw;
        }
        for (std::size_t j = 1; j < u.size(); ++j)
        {
            const double rv = u.r(j) * v[j];
            kin += (j + 1 == u.size() ? 0.5 : 1.0) * rv * rv;
        }
        return four_pi * (grad / h + kin * h);
    }

    namespace detail
    {
        /// 4*pi * int g(u) r dr, i.e. the integral over R^3 of g(u)/|x|. Zero integrand at r = 0.
        template <class G>
        double inverse_radius_integral(const RadialField& u, G&& g)
        {
            double s = 0.0;
            for (std::size_t j = 1; j < u.size(); ++j)
                s += (j + 1 == u.size() ? 0.5 : 1.0) * g(u[j]) * u.r(j);
            return four_pi * s * u.h();
        }
    } // namespace detail

    /// int |u|^{N+2} / |x| dx
    inline double flux_Np2(const RadialField& u, double N)
    {
        return detail::inverse_radius_integral(u, [N](double x) { return abs_pow(x, N + 2.0); });
    }

    /// (int |u|^N u / |x| dx)^2
    inline double flux_sq(const RadialField& u, double N)
    {
        const double m = detail::inverse_radius_integral(u, [N](double x) { return signed_pow(x, N); });
        return m * m;
    }

    struct MonitorSet
    {
        std::vector<double> lp_exponents{2.0}; ///< N+2 is always added
        bool energy = true;
        bool support = true;
    };

    /// Record of (u, v) at time t. For the characteristics form v is the outgoing
    /// velocity -(u_r + u/r); for the system form it is the evolved v.
    inline DiagnosticsRecord make_record(double t, const RadialField& u, const RadialField& v, double N,
                                         const MonitorSet& monitors = {})
    {
        DiagnosticsRecord rec;
        rec.t = t;
        for (double p : monitors.lp_exponents)
            rec.lp_norms[p] = lp_norm(u, p);
        rec.lp_norms[N + 2.0] = lp_norm(u, N + 2.0);
        rec.sup_norm = sup_norm(u);
        rec.h1_norm = h1_norm(u);
        if (monitors.energy)
            rec.energy_E0 = energy_E0(u, v);
        rec.flux_Np2 = flux_Np2(u, N);
        rec.flux_sq = flux_sq(u, N);
        rec.line_norm_Np2 = line_lp_norm(u, N + 2.0);
        if (monitors.support)
        {
            const SupportRadius s = support_radius(u);
            rec.support_inner = s.inner;
            rec.support_outer = s.outer;
        }
        return rec;
    }

    namespace detail
    {
        inline void require_uniform(const History& history)
        {
            if (history.empty())
                throw RaggedHistory("empty diagnostics history");
            if (history.size() < 2)
                return;
            const double dt = history[1].t - history[0].t;
            if (!(dt > 0.0))
                throw RaggedHistory("diagnostics history is not increasing in time");
            for (std::size_t k = 1; k < history.size(); ++k)
            {
                const double step = history[k].t - history[k - 1].t;
                if (std::abs(step - dt) > 1e-9 * std::max(1.0, dt))
                    throw RaggedHistory("diagnostics history has non-uniform checkpoint spacing");
            }
        }

        /// Running trapezoid of a selected quantity over the history.
        template <class Sel>
        std::vector<double> running_time_integral(const History& history, Sel&& sel)
        {
            std::vector<double> out(history.size(), 0.0);
            for (std::size_t k = 1; k < history.size(); ++k)
                out[k] = out[k - 1] + 0.5 * (history[k].t - history[k - 1].t) * (sel(history[k - 1]) + sel(history[k]));
            return out;
        }
    } // namespace detail

    /// Running residual of
    ///   int |u(T)|^{N+2} - int |u0|^{N+2} + N int_0^T int |u|^{N+2}/|x| + (N+2)/(16 pi) int_0^T (int |u|^N u/|x|)^2
    /// at every checkpoint. Zero for exact outgoing solutions.
    inline std::vector<double> running_residual_Np2(const History& history, double N)
    {
        detail::require_uniform(history);
        const double p = N + 2.0;
        const auto flux = detail::running_time_integral(history, [](const DiagnosticsRecord& r) { return r.flux_Np2; });
        const auto sq = detail::running_time_integral(history, [](const DiagnosticsRecord& r) { return r.flux_sq; });
        const double mass0 = history.front().lp_power(p);
        std::vector<double> out(history.size());
        for (std::size_t k = 0; k < history.size(); ++k)
            out[k] = history[k].lp_power(p) - mass0 + N * flux[k] + (N + 2.0) / (16.0 * std::numbers::pi) * sq[k];
        return out;
    }

    /// Running residual of E0(T) - E0(0) + 2N/(N+2) int_0^T int |u|^{N+2}/|x|.
    inline std::vector<double> running_residual_energy(const History& history, double N)
    {
        detail::require_uniform(history);
        const auto flux = detail::running_time_integral(history, [](const DiagnosticsRecord& r) { return r.flux_Np2; });
        const double e0 = history.front().energy_E0;
        std::vector<double> out(history.size());
        for (std::size_t k = 0; k < history.size(); ++k)
            out[k] = history[k].energy_E0 - e0 + 2.0 * N / (N + 2.0) * flux[k];
        return out;
    }

    inline double balance_residual_Np2(const History& history, double N)
    {
        return running_residual_Np2(history, N).back();
    }

    inline double balance_residual_energy(const History& history, double N)
    {
        return running_residual_energy(history, N).back();
    }

    /// Fills res_conserv, res_energy and sup_sq_integral of every record.
    inline void fill_running_quantities(History& history, double N)
    {
        if (history.empty())
            return;
        const auto rc = running_residual_Np2(history, N);
        const auto re = running_residual_energy(history, N);
        const auto ss = detail::running_time_integral(history, [](const DiagnosticsRecord& r) { return r.sup_norm * r.sup_norm; });
        for (std::size_t k = 0; k < history.size(); ++k)
        {
            history[k].res_conserv = rc[k];
            history[k].res_energy = re[k];
            history[k].sup_sq_integral = ss[k];
        }
    }

    /// Quantity extracted from a record for decay fits.
    using NormSelector = std::function<double(const DiagnosticsRecord&)>;

    inline NormSelector select_sup() { return [](const DiagnosticsRecord& r) { return r.sup_norm; }; }
    inline NormSelector select_line_Np2() { return [](const DiagnosticsRecord& r) { return r.line_norm_Np2; }; }
    inline NormSelector select_lp(double p)
    {
        return [p](const DiagnosticsRecord& r) { return r.lp_norms.at(p); };
    }

    struct DecaySlope
    {
        double slope = 0.0;
        std::size_t samples = 0;
        bool low_confidence = false; ///< window shorter than one decade
    };

    /// Least-squares slope of log(norm) against log(t) over records with t in [t_lo, t_hi].
    inline DecaySlope decay_slope(const History& history, const NormSelector& norm, double t_lo, double t_hi)
    {
        if (!(t_lo >= 1.0) || !(t_hi > t_lo))
            throw ConfigError("decay_slope: window must satisfy 1 <= t_lo < t_hi");
        if (history.empty() || history.back().t < t_hi * (1.0 - 1e-12) || history.front().t > t_lo)
            throw ConfigError("decay_slope: window lies outside the simulated range");
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        std::size_t m = 0;
        for (const auto& rec : history)
        {
            if (rec.t < t_lo * (1.0 - 1e-12) || rec.t > t_hi * (1.0 + 1e-12))
                continue;
            const double value = norm(rec);
            if (!(value > 0.0))
                throw ConfigError("decay_slope: norm must be positive inside the window");
            const double x = std::log(rec.t);
            const double y = std::log(value);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++m;
        }
        if (m < 2)
            throw ConfigError("decay_slope: fewer than two samples in window");
        const double md = static_cast<double>(m);
        DecaySlope out;
        out.slope = (md * sxy - sx * sy) / (md * sxx - sx * sx);
        out.samples = m;
        out.low_confidence = t_hi / t_lo < 10.0;
        return out;
    }

    /// True when values[k+1] <= values[k] + slack * |values[0]| for every k.
    inline bool nonincreasing(const std::vector<double>& values, double slack)
    {
        if (values.empty())
            return true;
        const double allowance = slack * std::abs(values.front());
        for (std::size_t k = 1; k < values.size(); ++k)
            if (values[k] > values[k - 1] + allowance)
                return false;
        return true;
    }
} // namespace outwave

#endif
