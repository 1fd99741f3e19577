#ifndef OUTWAVE_EXPERIMENT_HPP
#define OUTWAVE_EXPERIMENT_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "diagnostics.hpp"
#include "evolve.hpp"
#include "linear_wave.hpp"
#include "nonlocal.hpp"
#include "parallel.hpp"
#include "projection.hpp"

namespace outwave
{
    // Exit-code contract of the command line driver.
    inline constexpr int exit_ok = 0;
    inline constexpr int exit_gates_failed = 2;
    inline constexpr int exit_numerical_abort = 3;
    inline constexpr int exit_config_error = 4;

    struct PresetConfig
    {
        std::string shape = "poly-bump"; ///< poly-bump | truncated-gaussian | random-bump
        double inner = 1.0;              ///< R
        double outer = 2.0;              ///< R2
        double amplitude = 1.0;
        double kappa = 0.0;              ///< truncated-gaussian width; 0 picks exp(-kappa*(R2-R)^2/4) = 1e-14
    };

    struct GateConfig
    {
        bool lNp2_monotone = true;
        bool energy_monotone = true;
        bool huygens = true;   ///< characteristics form only
        bool residuals = true;
        double monotone_slack = 1e-6;
        double residual_tolerance = 1e-3;
    };

    struct ExperimentConfig
    {
        std::size_t grid_points = 4097;
        double r_max = 16.0;
        SolverConfig solver;
        PresetConfig preset;
        std::vector<double> lp_exponents{2.0};
        std::string out_dir = "out";
        std::uint64_t seed = 0;
        bool record_timing = false; ///< adds wall_clock_seconds to summary.json (breaks byte-identical reruns)
        GateConfig gates;

        double h() const { return r_max / static_cast<double>(grid_points - 1); }

        /// Grid resolution, support placement and solver parameters. Throws ConfigError.
        void validate() const
        {
            const RadialGrid grid(grid_points, r_max);
            solver.validate();
            const double h = grid.h();
            if (preset.shape != "poly-bump" && preset.shape != "truncated-gaussian" && preset.shape != "random-bump")
                throw ConfigError("unknown preset shape '" + preset.shape + "'");
            if (!std::isfinite(preset.amplitude))
                throw ConfigError("preset amplitude must be finite");
            if (!(preset.outer > preset.inner))
                throw ConfigError("preset support must satisfy R < R2");
            if (preset.inner < 4.0 * h - 1e-12 * h)
                throw ConfigError("preset support must start at R >= 4h");
            if (preset.outer > r_max - solver.t_final - 4.0 * h + 1e-12 * h)
                throw ConfigError("R2 + t_final exceeds r_max - 4h: the solution would leave the grid");
            if (preset.kappa < 0.0)
                throw ConfigError("preset kappa must be >= 0");
            if (solver.formulation == Formulation::characteristics)
                aligned_steps(solver.t_final, h);
            for (double p : lp_exponents)
                if (!(p >= 1.0))
                    throw ConfigError("monitor exponents must be >= 1");
        }

        MonitorSet monitors() const
        {
            MonitorSet m;
            m.lp_exponents = lp_exponents;
            if (std::find(m.lp_exponents.begin(), m.lp_exponents.end(), 2.0) == m.lp_exponents.end())
                m.lp_exponents.insert(m.lp_exponents.begin(), 2.0);
            return m;
        }
    };

    /// Initial position for the configured preset.
    ///   poly-bump:          A (1 - s^2)^4, s = (2r - R - R2)/(R2 - R) in [-1, 1]; C^3 at the edges
    ///   truncated-gaussian: A exp(-kappa (r - c)^2), c = (R + R2)/2, zero where |u| < 1e-14 or outside [R, R2]
    ///   random-bump:        the poly-bump window times a cosine series drawn from `seed`
    inline RadialField build_preset(const ExperimentConfig& cfg)
    {
        cfg.validate();
        const RadialGrid grid(cfg.grid_points, cfg.r_max);
        const PresetConfig& p = cfg.preset;
        const double R = p.inner;
        const double R2 = p.outer;
        const double A = p.amplitude;
        auto window = [R, R2](double r) {
            if (r <= R || r >= R2)
                return 0.0;
            const double s = (2.0 * r - R - R2) / (R2 - R);
            const double q = 1.0 - s * s;
            return q * q * q * q;
        };

        if (p.shape == "poly-bump")
            return RadialField::sample(grid, [&](double r) { return A * window(r); });

        if (p.shape == "truncated-gaussian")
        {
            const double c = 0.5 * (R + R2);
            const double half = 0.5 * (R2 - R);
            const double kappa = p.kappa > 0.0 ? p.kappa : std::log(1e14) / (half * half);
            return RadialField::sample(grid, [&](double r) {
                if (r <= R || r >= R2)
                    return 0.0;
                const double v = A * std::exp(-kappa * (r - c) * (r - c));
                return std::abs(v) < 1e-14 ? 0.0 : v;
            });
        }

        auto gen = detail::trial_generator(cfg.seed, 0);
        std::vector<double> coeff(4);
        for (double& c : coeff)
            c = detail::uniform(gen, -1.0, 1.0);
        coeff[0] = 1.0;
        return RadialField::sample(grid, [&](double r) {
            const double wnd = window(r);
            if (wnd == 0.0)
                return 0.0;
            const double s = (2.0 * r - R - R2) / (R2 - R);
            double series = 0.0;
            for (std::size_t k = 0; k < coeff.size(); ++k)
                series += coeff[k] * std::cos(static_cast<double>(k) * std::numbers::pi * s);
            return A * wnd * series;
        });
    }

    // ---------------------------------------------------------------------
    // JSON config

    inline void from_json(const nlohmann::json& j, ExperimentConfig& cfg)
    {
        auto get = [&j](const char* key, auto& dst) {
            if (j.contains(key))
                j.at(key).get_to(dst);
        };
        get("grid_points", cfg.grid_points);
        get("r_max", cfg.r_max);
        get("exponent", cfg.solver.exponent);
        get("t_final", cfg.solver.t_final);
        get("cfl", cfg.solver.cfl);
        get("checkpoint_every", cfg.solver.checkpoint_every);
        get("origin_guard", cfg.solver.origin_guard);
        get("nonlinearity", cfg.solver.nonlinearity);
        if (j.contains("formulation"))
            cfg.solver.formulation = parse_formulation(j.at("formulation").get<std::string>());
        if (j.contains("preset"))
        {
            const auto& p = j.at("preset");
            if (p.contains("shape"))
                p.at("shape").get_to(cfg.preset.shape);
            if (p.contains("amplitude"))
                p.at("amplitude").get_to(cfg.preset.amplitude);
            if (p.contains("kappa"))
                p.at("kappa").get_to(cfg.preset.kappa);
            if (p.contains("support"))
            {
                const auto s = p.at("support").get<std::vector<double>>();
                if (s.size() != 2)
                    throw ConfigError("preset.support must hold [R, R2]");
                cfg.preset.inner = s[0];
                cfg.preset.outer = s[1];
            }
        }
        if (j.contains("monitors") && j.at("monitors").contains("lp_exponents"))
            j.at("monitors").at("lp_exponents").get_to(cfg.lp_exponents);
        get("out_dir", cfg.out_dir);
        get("seed", cfg.seed);
        get("record_timing", cfg.record_timing);
        if (j.contains("gates"))
        {
            const auto& g = j.at("gates");
            auto gget = [&g](const char* key, auto& dst) {
                if (g.contains(key))
                    g.at(key).get_to(dst);
            };
            gget("lNp2_monotone", cfg.gates.lNp2_monotone);
            gget("energy_monotone", cfg.gates.energy_monotone);
            gget("huygens", cfg.gates.huygens);
            gget("residuals", cfg.gates.residuals);
            gget("monotone_slack", cfg.gates.monotone_slack);
            gget("residual_tolerance", cfg.gates.residual_tolerance);
        }
    }

    inline ExperimentConfig load_config(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open config file " + path.string());
        try
        {
            return nlohmann::json::parse(in).get<ExperimentConfig>();
        }
        catch (const nlohmann::json::exception& e)
        {
            throw ConfigError(std::string("malformed config: ") + e.what());
        }
    }

    // ---------------------------------------------------------------------
    // Output

    inline std::string format_number(double x)
    {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    }

    inline const char* csv_header =
        "t,l2,lNp2,sup,h1,E0,flux_Np2,flux_sq,support_inner,support_outer,res_conserv,res_energy";

    inline void write_records_csv(const std::filesystem::path& path, const History& records, double N)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw Error("cannot write " + path.string());
        out << csv_header << '\n';
        for (const auto& r : records)
        {
            const double fields[] = {r.t, r.lp_norms.at(2.0), r.lp_norms.at(N + 2.0), r.sup_norm, r.h1_norm,
                                     r.energy_E0, r.flux_Np2, r.flux_sq, r.support_inner, r.support_outer,
                                     r.res_conserv, r.res_energy};
            for (std::size_t i = 0; i < std::size(fields); ++i)
                out << (i ? "," : "") << format_number(fields[i]);
            out << '\n';
        }
    }

    inline void write_json(const std::filesystem::path& path, const nlohmann::json& j)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw Error("cannot write " + path.string());
        out << j.dump(2) << '\n';
    }

    // ---------------------------------------------------------------------
    // Single experiment

    struct ExperimentOutcome
    {
        int exit_code = exit_ok;
        RunResult run;
        nlohmann::json summary;
    };

    namespace detail
    {
        inline nlohmann::json norms_json(const DiagnosticsRecord& r, double N)
        {
            return {{"t", r.t},
                    {"l2", r.lp_norms.at(2.0)},
                    {"lNp2", r.lp_norms.at(N + 2.0)},
                    {"sup", r.sup_norm},
                    {"h1", r.h1_norm},
                    {"E0", r.energy_E0}};
        }

        template <class Sel>
        std::vector<double> column(const History& h, Sel&& sel)
        {
            std::vector<double> out;
            out.reserve(h.size());
            for (const auto& r : h)
                out.push_back(sel(r));
            return out;
        }
    } // namespace detail

    /// Runs one experiment, writes records.csv and summary.json into cfg.out_dir and
    /// returns the exit code: 0 when every enabled gate passes, 2 otherwise,
    /// 3 after blow-up/overflow (partial outputs are still written).
    inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg)
    {
        const auto started = std::chrono::steady_clock::now();
        cfg.validate();
        const RadialField u0 = build_preset(cfg);
        const double N = cfg.solver.exponent;

        ExperimentOutcome outcome{exit_ok, run(u0, cfg.solver, cfg.monitors()), {}};
        const History& rec = outcome.run.records;

        const double mass0 = rec.front().lp_power(N + 2.0);
        const double energy0 = rec.front().energy_E0;
        double max_conserv = 0.0, max_energy = 0.0;
        for (const auto& r : rec)
        {
            max_conserv = std::max(max_conserv, std::abs(r.res_conserv));
            max_energy = std::max(max_energy, std::abs(r.res_energy));
        }
        const double rel_conserv = mass0 > 0.0 ? max_conserv / mass0 : max_conserv;
        const double rel_energy = energy0 > 0.0 ? max_energy / energy0 : max_energy;

        const double slack = cfg.gates.monotone_slack;
        const bool lnp2_monotone =
            nonincreasing(detail::column(rec, [N](const DiagnosticsRecord& r) { return r.lp_norms.at(N + 2.0); }), slack);
        const bool energy_monotone =
            nonincreasing(detail::column(rec, [](const DiagnosticsRecord& r) { return r.energy_E0; }), slack);
        bool huygens = true;
        const double h = cfg.h();
        if (cfg.solver.formulation == Formulation::characteristics)
            for (const auto& r : rec)
                if (r.support_inner < cfg.preset.inner + r.t - h - 1e-9 * h)
                    huygens = false;
        const bool conserv_ok = rel_conserv <= cfg.gates.residual_tolerance;
        const bool energy_ok = rel_energy <= cfg.gates.residual_tolerance;

        bool pass = true;
        if (cfg.gates.lNp2_monotone)
            pass = pass && lnp2_monotone;
        if (cfg.gates.energy_monotone)
            pass = pass && energy_monotone;
        if (cfg.gates.huygens && cfg.solver.formulation == Formulation::characteristics)
            pass = pass && huygens;
        if (cfg.gates.residuals)
            pass = pass && conserv_ok && energy_ok;

        if (!outcome.run.ok())
            outcome.exit_code = exit_numerical_abort;
        else
            outcome.exit_code = pass ? exit_ok : exit_gates_failed;

        nlohmann::json decay = nullptr;
        const double t_end = rec.back().t;
        const double t_lo = std::max(1.0, cfg.solver.t_final / 10.0);
        if (outcome.run.ok() && t_end >= 2.0 * t_lo && rec.back().sup_norm > 0.0)
        {
            const DecaySlope sup = decay_slope(rec, select_sup(), t_lo, t_end);
            const DecaySlope line = decay_slope(rec, select_line_Np2(), t_lo, t_end);
            decay = {{"window", {t_lo, t_end}},
                     {"sup_slope", sup.slope},
                     {"line_Np2_slope", line.slope},
                     {"low_confidence", sup.low_confidence}};
        }

        nlohmann::json& s = outcome.summary;
        s["status"] = std::string(to_string(outcome.run.status));
        s["message"] = outcome.run.message;
        s["formulation"] = std::string(to_string(cfg.solver.formulation));
        s["exponent"] = N;
        s["s_c"] = cfg.solver.s_c();
        s["grid_points"] = cfg.grid_points;
        s["h"] = h;
        s["steps"] = outcome.run.steps_taken;
        s["records"] = rec.size();
        s["initial"] = detail::norms_json(rec.front(), N);
        s["final"] = detail::norms_json(rec.back(), N);
        s["decay"] = decay;
        s["residuals"] = {{"max_abs_conserv", max_conserv},
                          {"max_rel_conserv", rel_conserv},
                          {"max_abs_energy", max_energy},
                          {"max_rel_energy", rel_energy}};
        s["verdicts"] = {{"lNp2_monotone", lnp2_monotone},
                         {"energy_monotone", energy_monotone},
                         {"huygens", huygens},
                         {"conserv_residual", conserv_ok},
                         {"energy_residual", energy_ok}};
        s["gates_passed"] = pass && outcome.run.ok();
        s["exit_code"] = outcome.exit_code;
        if (cfg.record_timing)
            s["wall_clock_seconds"] =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

        std::filesystem::create_directories(cfg.out_dir);
        write_records_csv(std::filesystem::path(cfg.out_dir) / "records.csv", rec, N);
        write_json(std::filesystem::path(cfg.out_dir) / "summary.json", s);
        return outcome;
    }

    // ---------------------------------------------------------------------
    // Convergence study

    /// Order threshold per quantity.
    struct ConvergenceThresholds
    {
        double conserv = 1.5;
        double energy = 1.5;
        double gap = 1.8;
        double idempotence = 1.9;
        double linear = 1.9;
    };

    struct ConvergenceLevel
    {
        std::size_t grid_points = 0;
        double h = 0.0;
        double conserv_residual = 0.0; ///< |L^{N+2} balance residual| at t_final, characteristics
        double energy_residual = 0.0;  ///< |energy balance residual| at t_final, system
        double scheme_gap = 0.0;       ///< max |u_characteristics - u_system| at t_final
        double idempotence = 0.0;      ///< ||P+ P+ d - P+ d||_inf for the initial data d
        double linear_error = 0.0;     ///< characteristics vs exact free flow (nonlinearity 0 only)
        std::string status = "completed";
    };

    struct QuantityReport
    {
        std::string name;
        std::vector<double> errors;
        std::vector<double> orders;
        bool exact = false; ///< every error at rounding level
        double threshold = 0.0;
        bool pass = false;
    };

    struct ConvergenceReport
    {
        std::vector<ConvergenceLevel> levels;
        std::vector<QuantityReport> quantities;
        bool pass = false;
        bool aborted = false;
        nlohmann::json json;
    };

    /// Observed order log2(e_coarse / e_fine) for a halved spacing.
    inline double observed_order(double coarse, double fine)
    {
        return std::log2(coarse / fine);
    }

    inline QuantityReport assess_quantity(std::string name, std::vector<double> errors, double threshold, double exact_level)
    {
        QuantityReport q{std::move(name), std::move(errors), {}, false, threshold, false};
        q.exact = std::all_of(q.errors.begin(), q.errors.end(), [&](double e) { return e <= exact_level; });
        for (std::size_t k = 1; k < q.errors.size(); ++k)
            q.orders.push_back(observed_order(q.errors[k - 1], q.errors[k]));
        q.pass = q.exact || std::all_of(q.orders.begin(), q.orders.end(), [&](double o) { return o >= threshold; });
        return q;
    }

    /// Repeats the experiment with h halved per level (levels run on the worker pool) and
    /// reports per-quantity orders against the thresholds. Writes convergence.json.
    inline ConvergenceReport run_convergence(const ExperimentConfig& base, std::size_t levels,
                                             const ConvergenceThresholds& thresholds = {})
    {
        if (levels < 3)
            throw ConfigError("run_convergence: need at least 3 levels");
        base.validate();
        const bool linear = base.solver.nonlinearity == 0.0;
        const double N = base.solver.exponent;

        ConvergenceReport report;
        report.levels.resize(levels);
        parallel_for(levels, [&](std::size_t l) {
            ExperimentConfig cfg = base;
            cfg.grid_points = (base.grid_points - 1) * (std::size_t{1} << l) + 1;
            const RadialField u0 = build_preset(cfg);
            ConvergenceLevel& lev = report.levels[l];
            lev.grid_points = cfg.grid_points;
            lev.h = cfg.h();

            SolverConfig chars = cfg.solver;
            chars.formulation = Formulation::characteristics;
            // the system solver lands on the same checkpoint times: 1/cfl steps per h
            SolverConfig sys = cfg.solver;
            sys.formulation = Formulation::system;
            const double steps_per_h = 1.0 / sys.cfl;
            if (std::abs(steps_per_h - std::round(steps_per_h)) < 1e-12)
                sys.checkpoint_every = chars.checkpoint_every * static_cast<std::size_t>(std::round(steps_per_h));

            const RunResult rc = run(u0, chars, cfg.monitors());
            const RunResult rs = run(u0, sys, cfg.monitors());
            if (!rc.ok() || !rs.ok())
            {
                lev.status = !rc.ok() ? std::string(to_string(rc.status)) : std::string(to_string(rs.status));
                return;
            }
            lev.conserv_residual = std::abs(rc.records.back().res_conserv);
            lev.energy_residual = std::abs(rs.records.back().res_energy);
            lev.scheme_gap = max_abs_diff(rc.state.u, rs.state.u);
            const DataPair d = make_outgoing(u0);
            const DataPair p = project_outgoing(d);
            lev.idempotence = max_abs_diff(project_outgoing(p), p);
            if (linear)
            {
                const LinearFlow flow(d);
                lev.linear_error = max_abs_diff(rc.state.u, flow.propagate(rc.state.t).position);
            }
        });

        for (const auto& lev : report.levels)
            if (lev.status != "completed")
                report.aborted = true;

        auto col = [&](auto member) {
            std::vector<double> v;
            for (const auto& lev : report.levels)
                v.push_back(lev.*member);
            return v;
        };
        const double scale = std::max(1.0, std::abs(base.preset.amplitude));
        const double exact_level = 1e-12 * scale;
        if (!report.aborted)
        {
            if (linear)
                report.quantities.push_back(
                    assess_quantity("characteristics_vs_exact", col(&ConvergenceLevel::linear_error), thresholds.linear, exact_level));
            report.quantities.push_back(
                assess_quantity("conserv_residual", col(&ConvergenceLevel::conserv_residual), thresholds.conserv, exact_level));
            report.quantities.push_back(
                assess_quantity("energy_residual", col(&ConvergenceLevel::energy_residual), thresholds.energy, exact_level));
            report.quantities.push_back(
                assess_quantity("scheme_gap", col(&ConvergenceLevel::scheme_gap), thresholds.gap, exact_level));
            report.quantities.push_back(
                assess_quantity("idempotence", col(&ConvergenceLevel::idempotence), thresholds.idempotence, exact_level));
        }
        report.pass = !report.aborted &&
                      std::all_of(report.quantities.begin(), report.quantities.end(), [](const auto& q) { return q.pass; });

        nlohmann::json j;
        j["exponent"] = N;
        j["t_final"] = base.solver.t_final;
        j["linear"] = linear;
        for (const auto& lev : report.levels)
            j["levels"].push_back({{"grid_points", lev.grid_points},
                                   {"h", lev.h},
                                   {"status", lev.status},
                                   {"conserv_residual", lev.conserv_residual},
                                   {"energy_residual", lev.energy_residual},
                                   {"scheme_gap", lev.scheme_gap},
                                   {"idempotence", lev.idempotence},
                                   {"linear_error", lev.linear_error}});
        for (const auto& q : report.quantities)
        {
            nlohmann::json orders = q.exact ? nlohmann::json("exact") : nlohmann::json(q.orders);
            j["quantities"][q.name] = {{"errors", q.errors}, {"orders", orders}, {"threshold", q.threshold}, {"pass", q.pass}};
        }
        j["pass"] = report.pass;
        report.json = j;

        std::filesystem::create_directories(base.out_dir);
        write_json(std::filesystem::path(base.out_dir) / "convergence.json", j);
        return report;
    }

    // ---------------------------------------------------------------------
    // Parameter sweep

    struct SweepEntry
    {
        double exponent;
        double amplitude;
        std::string out_dir;
        int exit_code = exit_ok;
        nlohmann::json summary;
    };

    /// Runs the experiment for every (exponent, amplitude) pair, each in its own
    /// subdirectory of base.out_dir, and writes sweep.json. Returns the worst exit code.
    inline int run_sweep(const ExperimentConfig& base, const std::vector<double>& exponents,
                         const std::vector<double>& amplitudes, std::vector<SweepEntry>* entries_out = nullptr)
    {
        std::vector<SweepEntry> entries;
        for (double N : exponents)
            for (double A : amplitudes)
            {
                std::ostringstream name;
                name << "N" << format_number(N) << "_A" << format_number(A);
                entries.push_back({N, A, (std::filesystem::path(base.out_dir) / name.str()).string()});
            }
        parallel_for(entries.size(), [&](std::size_t i) {
            ExperimentConfig cfg = base;
            cfg.solver.exponent = entries[i].exponent;
            cfg.preset.amplitude = entries[i].amplitude;
            cfg.out_dir = entries[i].out_dir;
            try
            {
                const ExperimentOutcome o = run_experiment(cfg);
                entries[i].exit_code = o.exit_code;
                entries[i].summary = o.summary;
            }
            catch (const ConfigError& e)
            {
                entries[i].exit_code = exit_config_error;
                entries[i].summary = {{"error", e.what()}};
            }
        });

        int worst = exit_ok;
        nlohmann::json j = nlohmann::json::array();
        for (const auto& e : entries)
        {
            worst = std::max(worst, e.exit_code);
            j.push_back({{"exponent", e.exponent}, {"amplitude", e.amplitude}, {"out_dir", e.out_dir},
                         {"exit_code", e.exit_code}, {"summary", e.summary}});
        }
        std::filesystem::create_directories(base.out_dir);
        write_json(std::filesystem::path(base.out_dir) / "sweep.json", j);
        if (entries_out)
            *entries_out = std::move(entries);
        return worst;
    }
} // namespace outwave

#endif
