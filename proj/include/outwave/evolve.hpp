#ifndef OUTWAVE_EVOLVE_HPP
#define OUTWAVE_EVOLVE_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diagnostics.hpp"
#include "grid.hpp"
#include "linear_wave.hpp"
#include "nonlocal.hpp"
#include "projection.hpp"

namespace outwave
{
    enum class Formulation
    {
        characteristics, ///< w = r*u with w_t + w_r = -1/2 int_0^r |w|^N w rho^{-N}
        system           ///< u_t = v - K[|u|^N u]/2, v_t = Laplacian u + |u|^N u/2
    };

    inline std::string_view to_string(Formulation f)
    {
        return f == Formulation::characteristics ? "characteristics" : "system";
    }

    inline Formulation parse_formulation(std::string_view s)
    {
        if (s == "characteristics")
            return Formulation::characteristics;
        if (s == "system")
            return Formulation::system;
        throw ConfigError("unknown formulation '" + std::string(s) + "'");
    }

    struct SolverConfig
    {
        double exponent = 6.0; ///< N in |u|^N u
        double t_final = 0.0;
        double cfl = 0.5;      ///< system solver only; the characteristics solver always steps dt = h
        Formulation formulation = Formulation::characteristics;
        std::size_t checkpoint_every = 1;
        double origin_guard = 0.0;    ///< rho^{-N} is clamped below this radius; 0 means h
        double nonlinearity = 1.0;    ///< coefficient of the nonlinear terms; 0 gives the free flow
        double blowup_threshold = 1e10;

        /// Critical Sobolev exponent 3/2 - 2/N of the scaling u -> lambda^{2/N} u(lambda x, lambda t).
        double s_c() const { return 1.5 - 2.0 / exponent; }

        double guard(double h) const { return origin_guard > 0.0 ? origin_guard : h; }

        void validate() const
        {
            if (!(exponent >= 2.0))
                throw ConfigError("SolverConfig: exponent N must be >= 2");
            if (!(t_final >= 0.0) || !std::isfinite(t_final))
                throw ConfigError("SolverConfig: t_final must be finite and >= 0");
            if (!(cfl > 0.0))
                throw ConfigError("SolverConfig: cfl must be positive");
            if (cfl > 1.0)
                throw ConfigError("SolverConfig: cfl > 1 violates the CFL limit");
            if (checkpoint_every == 0)
                throw ConfigError("SolverConfig: checkpoint_every must be >= 1");
            if (origin_guard < 0.0)
                throw ConfigError("SolverConfig: origin_guard must be >= 0");
        }
    };

    /// Evolving unknowns. aux holds w = r*u (characteristics) or v (system).
    struct State
    {
        double t = 0.0;
        RadialField u;
        RadialField aux;
        Formulation formulation = Formulation::characteristics;
        double front = 0.0; ///< outer edge of the transported (non-tail) part of the solution

        /// v of the outgoing pair (u, v): evolved for the system form, -(u_r + u/r) otherwise.
        RadialField velocity() const
        {
            if (formulation == Formulation::system)
                return aux;
            RadialField v = dr_plus_inv_r(u);
            v *= -1.0;
            return v;
        }
    };

    namespace detail
    {
        inline void check_finite(const RadialField& f, double threshold, double t)
        {
            for (std::size_t j = 0; j < f.size(); ++j)
            {
                if (!std::isfinite(f[j]) || std::abs(f[j]) > threshold)
                    throw BlowUp("solution exceeded " + std::to_string(threshold) + " at t = " + std::to_string(t) +
                                 ", r = " + std::to_string(f.r(j)));
            }
        }

        inline void check_front(const State& s)
        {
            const RadialGrid& g = s.u.grid();
            if (s.front > g.r_max() - 2.0 * g.h() + 1e-9 * g.h())
                throw SupportOverflow("transported support reached the outer edge at t = " + std::to_string(s.t));
        }

        inline void u_from_w(const RadialField& w, RadialField& u)
        {
            u[0] = w[1] / w.h();
            for (std::size_t j = 1; j < w.size(); ++j)
                u[j] = w[j] / w.r(j);
        }
    } // namespace detail

    /// Exact-shift characteristics scheme with Strang splitting:
    /// half source (Heun), unit-CFL shift w(r) <- w(r - h), half source (Heun).
    class CharacteristicsStepper
    {
    public:
        CharacteristicsStepper(const RadialGrid& grid, const SolverConfig& cfg)
            : cfg_(cfg), weight_(grid), k1_(grid), k2_(grid), stage_(grid)
        {
            const double guard = cfg.guard(grid.h());
            for (std::size_t j = 0; j < grid.size(); ++j)
                weight_[j] = std::pow(std::max(grid.r(j), guard), -cfg.exponent);
        }

        /// S[w](r) = -c/2 * int_0^r |w|^N w rho^{-N} drho  (+ forcing, when given).
        void source(const RadialField& w, RadialField& out, const RadialField* forcing = nullptr) const
        {
            const double half_h = 0.5 * w.h();
            const double coeff = -0.5 * cfg_.nonlinearity;
            double acc = 0.0;
            double prev = signed_pow(w[0], cfg_.exponent) * weight_[0];
            out[0] = 0.0;
            for (std::size_t j = 1; j < w.size(); ++j)
            {
                const double cur = signed_pow(w[j], cfg_.exponent) * weight_[j];
                acc += half_h * (prev + cur);
                prev = cur;
                out[j] = coeff * acc;
            }
            if (forcing)
                for (std::size_t j = 0; j < w.size(); ++j)
                    out[j] += (*forcing)[j];
        }

        /// Heun step of length dt for w_t = S[w] + f(t), with f given at the start and end of the step.
        void source_step(RadialField& w, double dt, const RadialField* f_begin = nullptr, const RadialField* f_end = nullptr)
        {
            if (cfg_.nonlinearity == 0.0 && !f_begin && !f_end)
                return;
            source(w, k1_, f_begin);
            for (std::size_t j = 0; j < w.size(); ++j)
                stage_[j] = w[j] + dt * k1_[j];
            source(stage_, k2_, f_end);
            for (std::size_t j = 0; j < w.size(); ++j)
                w[j] += 0.5 * dt * (k1_[j] + k2_[j]);
        }

        static void shift(RadialField& w)
        {
            for (std::size_t j = w.size() - 1; j > 0; --j)
                w[j] = w[j - 1];
            w[0] = 0.0;
        }

        void step(State& s)
        {
            const double h = s.u.h();
            source_step(s.aux, 0.5 * h);
            shift(s.aux);
            source_step(s.aux, 0.5 * h);
            finish(s, h);
        }

        /// Step of the general first-order form, forced by 2 g(r + t) from the free flow of the data.
        /// The forcing at t + h/2 is the mean of the grid-aligned values at t and t + h.
        void step_forced(State& s, const LinearFlow& flow)
        {
            const double h = s.u.h();
            const RadialField f0 = flow.characteristic_forcing(s.t);
            const RadialField f1 = flow.characteristic_forcing(s.t + h);
            const RadialField fm = 0.5 * (f0 + f1);
            source_step(s.aux, 0.5 * h, &f0, &fm);
            shift(s.aux);
            source_step(s.aux, 0.5 * h, &fm, &f1);
            finish(s, h);
        }

    private:
        void finish(State& s, double h)
        {
            s.aux[0] = 0.0;
            s.t += h;
            s.front += h;
            detail::check_finite(s.aux, cfg_.blowup_threshold, s.t);
            detail::check_front(s);
            detail::u_from_w(s.aux, s.u);
        }

        SolverConfig cfg_;
        RadialField weight_;
        RadialField k1_, k2_, stage_;
    };

    /// Classical RK4 on the (u, v) system with centered second-order differences.
    class SystemStepper
    {
    public:
        SystemStepper(const RadialGrid& grid, const SolverConfig& cfg)
            : cfg_(cfg), ku_{RadialField(grid), RadialField(grid), RadialField(grid), RadialField(grid)},
              kv_{RadialField(grid), RadialField(grid), RadialField(grid), RadialField(grid)},
              us_(grid), vs_(grid)
        {
        }

        /// Radial Laplacian u_rr + 2 u_r / r. The origin uses the even-extension stencil 6(u_1 - u_0)/h^2;
        /// the outer node takes a ghost value from linear extrapolation of r*u.
        static void laplacian(const RadialField& u, RadialField& out)
        {
            const std::size_t n = u.size();
            const double h = u.h();
            const double inv_h2 = 1.0 / (h * h);
            out[0] = 6.0 * (u[1] - u[0]) * inv_h2;
            for (std::size_t j = 1; j + 1 < n; ++j)
            {
                const double r = u.r(j);
                out[j] = (u[j + 1] - 2.0 * u[j] + u[j - 1]) * inv_h2 + (u[j + 1] - u[j - 1]) / (h * r);
            }
            const double r_last = u.r(n - 1);
            const double r_ghost = r_last + h;
            const double w_ghost = 2.0 * r_last * u[n - 1] - u.r(n - 2) * u[n - 2];
            const double u_ghost = w_ghost / r_ghost;
            out[n - 1] = (u_ghost - 2.0 * u[n - 1] + u[n - 2]) * inv_h2 + (u_ghost - u[n - 2]) / (h * r_last);
        }

        void rhs(const RadialField& u, const RadialField& v, RadialField& du, RadialField& dv)
        {
            laplacian(u, dv);
            const double c = cfg_.nonlinearity;
            if (c == 0.0)
            {
                for (std::size_t j = 0; j < u.size(); ++j)
                    du[j] = v[j];
                return;
            }
            // K[p](r) = (1/r) int_0^r rho p(rho) drho, accumulated in place (same quadrature as apply_K)
            const double half_h = 0.5 * u.h();
            double acc = 0.0;
            double prev = 0.0;
            du[0] = v[0];
            dv[0] += 0.5 * c * signed_pow(u[0], cfg_.exponent);
            for (std::size_t j = 1; j < u.size(); ++j)
            {
                const double r = u.r(j);
                const double p = c * signed_pow(u[j], cfg_.exponent);
                const double cur = r * p;
                acc += half_h * (prev + cur);
                prev = cur;
                du[j] = v[j] - 0.5 * acc / r;
                dv[j] += 0.5 * p;
            }
        }

        void step(State& s, double dt)
        {
            RadialField& u = s.u;
            RadialField& v = s.aux;
            const std::size_t n = u.size();
            static constexpr double stage_factor[3] = {0.5, 0.5, 1.0};

            rhs(u, v, ku_[0], kv_[0]);
            for (int stage = 1; stage < 4; ++stage)
            {
                const double a = stage_factor[stage - 1] * dt;
                for (std::size_t j = 0; j < n; ++j)
                {
                    us_[j] = u[j] + a * ku_[stage - 1][j];
                    vs_[j] = v[j] + a * kv_[stage - 1][j];
                }
                rhs(us_, vs_, ku_[stage], kv_[stage]);
            }
            for (std::size_t j = 0; j < n; ++j)
            {
                u[j] += dt / 6.0 * (ku_[0][j] + 2.0 * ku_[1][j] + 2.0 * ku_[2][j] + ku_[3][j]);
                v[j] += dt / 6.0 * (kv_[0][j] + 2.0 * kv_[1][j] + 2.0 * kv_[2][j] + kv_[3][j]);
            }
            s.t += dt;
            s.front += dt;
            detail::check_finite(u, cfg_.blowup_threshold, s.t);
            detail::check_finite(v, cfg_.blowup_threshold, s.t);
            detail::check_front(s);
        }

    private:
        SolverConfig cfg_;
        RadialField ku_[4], kv_[4];
        RadialField us_, vs_;
    };

    /// Initial state for outgoing data (u0, -(u0)_r - u0/r).
    /// u0 must vanish at r = 0 and r = h and stay 2h away from r_max.
    inline State init_outgoing(const RadialField& u0, const SolverConfig& cfg)
    {
        cfg.validate();
        const RadialGrid& grid = u0.grid();
        for (std::size_t j = 0; j < 2; ++j)
            if (std::abs(u0[j]) > support_tolerance)
                throw SupportViolation("init_outgoing: initial data must be supported away from the origin");
        const SupportRadius sup = support_radius(u0);
        State s{0.0, u0, RadialField(grid), cfg.formulation, std::max(sup.outer, 0.0)};
        detail::check_front(s);
        if (cfg.formulation == Formulation::characteristics)
        {
            for (std::size_t j = 0; j < grid.size(); ++j)
                s.aux[j] = grid.r(j) * u0[j];
            s.aux[0] = 0.0;
        }
        else
        {
            s.aux = make_outgoing(u0).velocity;
        }
        return s;
    }

    /// One characteristics step of length h. Builds a stepper per call; run() reuses one.
    inline State step_characteristics(State state, const SolverConfig& cfg)
    {
        if (state.formulation != Formulation::characteristics)
            throw ConfigError("step_characteristics: state is not in characteristics form");
        CharacteristicsStepper(state.u.grid(), cfg).step(state);
        return state;
    }

    /// One RK4 step of length cfl*h.
    inline State step_system(State state, const SolverConfig& cfg)
    {
        cfg.validate();
        if (state.formulation != Formulation::system)
            throw ConfigError("step_system: state is not in system form");
        SystemStepper(state.u.grid(), cfg).step(state, cfg.cfl * state.u.h());
        return state;
    }

    enum class RunStatus
    {
        completed,
        blow_up,
        overflow,
        origin_reached ///< general data only: the support reached the origin guard
    };

    inline std::string_view to_string(RunStatus s)
    {
        switch (s)
        {
        case RunStatus::completed: return "completed";
        case RunStatus::blow_up: return "blow_up";
        case RunStatus::overflow: return "overflow";
        case RunStatus::origin_reached: return "origin_reached";
        }
        return "unknown";
    }

    struct RunResult
    {
        History records;
        RunStatus status = RunStatus::completed;
        std::string message;
        State state; ///< last state reached
        std::size_t steps_taken = 0;

        bool ok() const { return status == RunStatus::completed; }
    };

    /// Read-only hook invoked at every checkpoint.
    using StateObserver = std::function<void(const State&)>;

    /// Number of steps and step length used to reach t_final.
    struct StepPlan
    {
        std::size_t steps;
        double dt;
    };

    inline StepPlan plan_steps(const SolverConfig& cfg, double h)
    {
        if (cfg.formulation == Formulation::characteristics)
            return {aligned_steps(cfg.t_final, h), h};
        if (cfg.t_final == 0.0)
            return {0, cfg.cfl * h};
        const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_final / (cfg.cfl * h) - 1e-9));
        return {steps, cfg.t_final / static_cast<double>(steps)};
    }

    namespace detail
    {
        template <class Advance>
        RunResult drive(State state, const SolverConfig& cfg, const MonitorSet& monitors, const StateObserver& observer,
                        Advance&& advance)
        {
            const StepPlan plan = plan_steps(cfg, state.u.h());
            RunResult result{{}, RunStatus::completed, {}, state, 0};
            auto checkpoint = [&](const State& s) {
                result.records.push_back(make_record(s.t, s.u, s.velocity(), cfg.exponent, monitors));
                if (observer)
                    observer(s);
            };
            checkpoint(state);
            try
            {
                for (std::size_t k = 1; k <= plan.steps; ++k)
                {
                    advance(state, plan.dt);
                    // land exactly on t_final despite accumulated rounding
                    if (k == plan.steps)
                        state.t = cfg.t_final;
                    result.steps_taken = k;
                    if (k % cfg.checkpoint_every == 0)
                        checkpoint(state);
                }
            }
            catch (const BlowUp& e)
            {
                result.status = RunStatus::blow_up;
                result.message = e.what();
            }
            catch (const SupportOverflow& e)
            {
                result.status = RunStatus::overflow;
                result.message = e.what();
            }
            catch (const SupportViolation& e)
            {
                result.status = RunStatus::origin_reached;
                result.message = e.what();
            }
            fill_running_quantities(result.records, cfg.exponent);
            result.state = std::move(state);
            return result;
        }
    } // namespace detail

    /// Evolves outgoing data to cfg.t_final with the configured formulation and records
    /// diagnostics every checkpoint_every steps. Blow-up or overflow stop the run; the
    /// records gathered so far are returned with the status set.
    inline RunResult run(const RadialField& u0, const SolverConfig& cfg, const MonitorSet& monitors = {},
                         const StateObserver& observer = {})
    {
        State state = init_outgoing(u0, cfg);
        const RadialGrid& grid = u0.grid();
        if (cfg.formulation == Formulation::characteristics)
        {
            CharacteristicsStepper stepper(grid, cfg);
            return detail::drive(std::move(state), cfg, monitors, observer,
                                 [&](State& s, double) { stepper.step(s); });
        }
        plan_steps(cfg, grid.h());
        SystemStepper stepper(grid, cfg);
        return detail::drive(std::move(state), cfg, monitors, observer,
                             [&](State& s, double dt) { stepper.step(s, dt); });
    }

    /// Evolves arbitrary radial data (u0, u1) in the first-order form, forced by the
    /// incoming part of the free flow. The run stops with origin_reached once the
    /// support comes within the origin guard, where the rho^{-N} clamp would act.
    inline RunResult run_general_data(const DataPair& data, SolverConfig cfg, const MonitorSet& monitors = {},
                                      const StateObserver& observer = {})
    {
        cfg.validate();
        cfg.formulation = Formulation::characteristics;
        const RadialGrid& grid = data.grid();
        for (std::size_t j = 0; j < 2; ++j)
            if (std::abs(data.position[j]) > support_tolerance || std::abs(data.velocity[j]) > support_tolerance)
                throw SupportViolation("run_general_data: data must be supported away from the origin");

        const LinearFlow flow(data);
        State state{0.0, data.position, RadialField(grid), Formulation::characteristics, grid.r_max() - flow.max_time()};
        for (std::size_t j = 1; j < grid.size(); ++j)
            state.aux[j] = grid.r(j) * data.position[j];
        detail::check_front(state);

        const double guard = cfg.guard(grid.h());
        CharacteristicsStepper stepper(grid, cfg);
        return detail::drive(std::move(state), cfg, monitors, observer, [&](State& s, double) {
            stepper.step_forced(s, flow);
            for (std::size_t j = 0; j < grid.size() && grid.r(j) <= guard * (1.0 + 1e-12); ++j)
                if (std::abs(s.u[j]) > support_tolerance)
                    throw SupportViolation("support reached the origin guard at t = " + std::to_string(s.t));
        });
    }
} // namespace outwave

#endif
