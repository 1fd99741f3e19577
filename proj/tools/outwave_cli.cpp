// outwave: evolve outgoing radial data, check convergence, sweep parameters.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "outwave.hpp"

namespace
{
    struct Overrides
    {
        std::string config;
        std::optional<double> exponent, r_max, t_final, amplitude, cfl;
        std::optional<std::size_t> grid_points, checkpoint_every;
        std::optional<std::string> preset, formulation, out_dir;
        std::vector<double> support;
        std::optional<std::uint64_t> seed;
        bool timing = false;
    };

    void add_common(CLI::App* cmd, Overrides& o)
    {
        cmd->add_option("--config", o.config, "JSON config; flags override its values");
        cmd->add_option("--exponent", o.exponent, "nonlinearity exponent N");
        cmd->add_option("--grid-points", o.grid_points, "number of radial nodes");
        cmd->add_option("--r-max", o.r_max, "outer radius of the grid");
        cmd->add_option("--t-final", o.t_final, "final time");
        cmd->add_option("--preset", o.preset, "poly-bump | truncated-gaussian | random-bump");
        cmd->add_option("--amplitude", o.amplitude, "preset amplitude");
        cmd->add_option("--support", o.support, "preset support R,R2")->expected(2)->delimiter(',');
        cmd->add_option("--formulation", o.formulation, "characteristics | system");
        cmd->add_option("--out-dir", o.out_dir, "output directory");
        cmd->add_option("--cfl", o.cfl, "time step over h (system form)");
        cmd->add_option("--checkpoint-every", o.checkpoint_every, "steps between records");
        cmd->add_option("--seed", o.seed, "seed of the random-bump preset");
        cmd->add_flag("--timing", o.timing, "record wall-clock time in summary.json");
    }

    outwave::ExperimentConfig resolve(const Overrides& o)
    {
        outwave::ExperimentConfig cfg = o.config.empty() ? outwave::ExperimentConfig{} : outwave::load_config(o.config);
        if (o.exponent) cfg.solver.exponent = *o.exponent;
        if (o.grid_points) cfg.grid_points = *o.grid_points;
        if (o.r_max) cfg.r_max = *o.r_max;
        if (o.t_final) cfg.solver.t_final = *o.t_final;
        if (o.preset) cfg.preset.shape = *o.preset;
        if (o.amplitude) cfg.preset.amplitude = *o.amplitude;
        if (o.support.size() == 2)
        {
            cfg.preset.inner = o.support[0];
            cfg.preset.outer = o.support[1];
        }
        if (o.formulation) cfg.solver.formulation = outwave::parse_formulation(*o.formulation);
        if (o.out_dir) cfg.out_dir = *o.out_dir;
        if (o.cfl) cfg.solver.cfl = *o.cfl;
        if (o.checkpoint_every) cfg.solver.checkpoint_every = *o.checkpoint_every;
        if (o.seed) cfg.seed = *o.seed;
        if (o.timing) cfg.record_timing = true;
        cfg.validate();
        return cfg;
    }
} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Outgoing radial semilinear wave solver"};
    app.require_subcommand(1);

    Overrides run_opts, conv_opts, sweep_opts;
    auto* run_cmd = app.add_subcommand("run", "evolve one configuration, write records.csv and summary.json");
    add_common(run_cmd, run_opts);

    auto* conv_cmd = app.add_subcommand("converge", "repeat with halved h and report observed orders");
    add_common(conv_cmd, conv_opts);
    std::size_t levels = 3;
    conv_cmd->add_option("--levels", levels, "number of resolutions (>= 3)");

    auto* sweep_cmd = app.add_subcommand("sweep", "run every (exponent, amplitude) pair");
    add_common(sweep_cmd, sweep_opts);
    std::vector<double> exponents{6.0}, amplitudes{1.0};
    sweep_cmd->add_option("--exponents", exponents, "comma separated exponents")->delimiter(',');
    sweep_cmd->add_option("--amplitudes", amplitudes, "comma separated amplitudes")->delimiter(',');

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : outwave::exit_config_error;
    }

    try
    {
        if (*run_cmd)
        {
            const auto outcome = outwave::run_experiment(resolve(run_opts));
            std::cout << outcome.summary.dump(2) << '\n';
            return outcome.exit_code;
        }
        if (*conv_cmd)
        {
            const auto report = outwave::run_convergence(resolve(conv_opts), levels);
            std::cout << report.json.dump(2) << '\n';
            if (report.aborted)
                return outwave::exit_numerical_abort;
            return report.pass ? outwave::exit_ok : outwave::exit_gates_failed;
        }
        const int code = outwave::run_sweep(resolve(sweep_opts), exponents, amplitudes);
        std::cout << "sweep finished with exit code " << code << '\n';
        return code;
    }
    catch (const outwave::ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return outwave::exit_config_error;
    }
    catch (const outwave::TimeAlignmentError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return outwave::exit_config_error;
    }
    catch (const outwave::Error& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return outwave::exit_numerical_abort;
    }
}
