#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "outwave/experiment.hpp"

using namespace outwave;
namespace fs = std::filesystem;

namespace
{
    fs::path scratch_dir(const std::string& name)
    {
        const fs::path p = fs::temp_directory_path() / ("outwave_test_" + name);
        fs::remove_all(p);
        return p;
    }

    std::string slurp(const fs::path& p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    ExperimentConfig small_config(const std::string& name)
    {
        ExperimentConfig cfg;
        cfg.grid_points = 1025;
        cfg.r_max = 8.0; // h = 1/128
        cfg.solver.t_final = 2.0;
        cfg.out_dir = scratch_dir(name).string();
        return cfg;
    }

    int run_cli(const std::string& args)
    {
        const std::string cmd = std::string(OUTWAVE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
} // namespace

TEST(Preset, PolyBump)
{
    ExperimentConfig cfg = small_config("preset");
    cfg.preset.amplitude = 2.5;
    const RadialField u = build_preset(cfg);
    EXPECT_DOUBLE_EQ(u[u.grid().index_of(1.5)], 2.5);
    for (std::size_t j = 0; j < u.size(); ++j)
    {
        const double r = u.r(j);
        if (r <= 1.0 || r >= 2.0)
            ASSERT_EQ(u[j], 0.0);
        else
            ASSERT_NEAR(u[j], oracle::bump(1.0, 2.0, 2.5)(r), 1e-15);
    }
    cfg.preset.amplitude = 0.0;
    EXPECT_EQ(build_preset(cfg).max_abs(), 0.0);
}

TEST(Preset, TruncatedGaussian)
{
    ExperimentConfig cfg = small_config("preset");
    cfg.preset.shape = "truncated-gaussian";
    const RadialField u = build_preset(cfg);
    EXPECT_DOUBLE_EQ(u[u.grid().index_of(1.5)], 1.0);
    for (std::size_t j = 0; j < u.size(); ++j)
    {
        if (u.r(j) <= 1.0 || u.r(j) >= 2.0)
            ASSERT_EQ(u[j], 0.0);
        ASSERT_TRUE(u[j] == 0.0 || std::abs(u[j]) >= 1e-14);
    }
    cfg.preset.kappa = 10.0;
    const RadialField wide = build_preset(cfg);
    EXPECT_NEAR(wide[wide.grid().index_of(1.75)], std::exp(-10.0 * 0.0625), 1e-15);
}

TEST(Preset, RandomBumpFollowsTheSeed)
{
    ExperimentConfig cfg = small_config("preset");
    cfg.preset.shape = "random-bump";
    cfg.seed = 1;
    const RadialField a = build_preset(cfg);
    const RadialField b = build_preset(cfg);
    cfg.seed = 2;
    const RadialField c = build_preset(cfg);
    EXPECT_EQ(max_abs_diff(a, b), 0.0);
    EXPECT_GT(max_abs_diff(a, c), 0.0);
    EXPECT_EQ(support_radius(a).inner > 1.0, true);
}

TEST(Config, Validation)
{
    ExperimentConfig cfg = small_config("validate");
    EXPECT_NO_THROW(cfg.validate());

    ExperimentConfig near = cfg;
    near.preset.inner = 3.0 * cfg.h();
    EXPECT_THROW(near.validate(), ConfigError);

    ExperimentConfig far = cfg;
    far.preset.outer = cfg.r_max - cfg.solver.t_final - 2.0 * cfg.h();
    EXPECT_THROW(far.validate(), ConfigError);

    ExperimentConfig shape = cfg;
    shape.preset.shape = "square";
    EXPECT_THROW(shape.validate(), ConfigError);

    ExperimentConfig unaligned = cfg;
    unaligned.solver.t_final = 1.0 + 0.3 * cfg.h();
    EXPECT_THROW(unaligned.validate(), TimeAlignmentError);
}

TEST(Config, LoadsJson)
{
    const fs::path dir = scratch_dir("json");
    fs::create_directories(dir);
    std::ofstream(dir / "cfg.json") << R"({"exponent": 4, "grid_points": 2049, "r_max": 16, "t_final": 3,
        "formulation": "system", "preset": {"shape": "truncated-gaussian", "support": [1.5, 2.5], "amplitude": 0.5},
        "monitors": {"lp_exponents": [2, 3]}, "seed": 9})";
    const ExperimentConfig cfg = load_config(dir / "cfg.json");
    EXPECT_EQ(cfg.solver.exponent, 4.0);
    EXPECT_EQ(cfg.grid_points, 2049u);
    EXPECT_EQ(cfg.solver.formulation, Formulation::system);
    EXPECT_EQ(cfg.preset.shape, "truncated-gaussian");
    EXPECT_EQ(cfg.preset.inner, 1.5);
    EXPECT_EQ(cfg.preset.outer, 2.5);
    EXPECT_EQ(cfg.lp_exponents.size(), 2u);
    EXPECT_EQ(cfg.seed, 9u);

    std::ofstream(dir / "bad.json") << R"({"preset": {"support": [1]}})";
    EXPECT_THROW(load_config(dir / "bad.json"), ConfigError);
    std::ofstream(dir / "broken.json") << "{";
    EXPECT_THROW(load_config(dir / "broken.json"), ConfigError);
    EXPECT_THROW(load_config(dir / "missing.json"), ConfigError);
}

TEST(Experiment, ZeroAmplitudeRun)
{
    ExperimentConfig cfg = small_config("zero");
    cfg.preset.amplitude = 0.0;
    cfg.solver.checkpoint_every = 16;
    const ExperimentOutcome o = run_experiment(cfg);
    EXPECT_EQ(o.exit_code, exit_ok);
    for (const auto& r : o.run.records)
        EXPECT_EQ(r.sup_norm, 0.0);

    std::ifstream csv(fs::path(cfg.out_dir) / "records.csv");
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, csv_header);
    std::size_t rows = 0;
    while (std::getline(csv, line))
        ++rows;
    EXPECT_EQ(rows, 256u / 16u + 1u);
}

TEST(Experiment, DefaultRunPassesItsGates)
{
    const ExperimentConfig cfg = small_config("default");
    const ExperimentOutcome o = run_experiment(cfg);
    EXPECT_EQ(o.exit_code, exit_ok) << o.summary.dump(2);
    EXPECT_TRUE(o.summary["verdicts"]["lNp2_monotone"].get<bool>());
    EXPECT_TRUE(o.summary["verdicts"]["huygens"].get<bool>());
    EXPECT_FALSE(o.summary.contains("wall_clock_seconds"));
    EXPECT_TRUE(fs::exists(fs::path(cfg.out_dir) / "summary.json"));
}

TEST(Experiment, OutputsAreByteIdentical)
{
    ExperimentConfig a = small_config("det_a");
    ExperimentConfig b = small_config("det_b");
    run_experiment(a);
    run_experiment(b);
    EXPECT_EQ(slurp(fs::path(a.out_dir) / "records.csv"), slurp(fs::path(b.out_dir) / "records.csv"));
    EXPECT_EQ(slurp(fs::path(a.out_dir) / "summary.json"), slurp(fs::path(b.out_dir) / "summary.json"));
}

TEST(Experiment, ExitCodes)
{
    ExperimentConfig strict = small_config("strict");
    strict.gates.residual_tolerance = 1e-14;
    EXPECT_EQ(run_experiment(strict).exit_code, exit_gates_failed);

    ExperimentConfig blow = small_config("blow");
    blow.solver.blowup_threshold = 0.5;
    const ExperimentOutcome o = run_experiment(blow);
    EXPECT_EQ(o.exit_code, exit_numerical_abort);
    EXPECT_EQ(o.summary["status"], "blow_up");
    EXPECT_TRUE(fs::exists(fs::path(blow.out_dir) / "records.csv"));
}

TEST(Convergence, LinearModeIsExact)
{
    ExperimentConfig cfg = small_config("conv_lin");
    cfg.grid_points = 257;
    cfg.solver.t_final = 1.0;
    cfg.solver.nonlinearity = 0.0;
    const ConvergenceReport r = run_convergence(cfg, 3);
    ASSERT_FALSE(r.aborted);
    ASSERT_FALSE(r.quantities.empty());
    EXPECT_EQ(r.quantities.front().name, "characteristics_vs_exact");
    EXPECT_TRUE(r.quantities.front().exact);
    EXPECT_EQ(r.json["quantities"]["characteristics_vs_exact"]["orders"], "exact");
    EXPECT_THROW(run_convergence(cfg, 2), ConfigError);
}

TEST(Convergence, NonlinearOrders)
{
    ExperimentConfig cfg = small_config("conv");
    cfg.grid_points = 513;
    cfg.solver.t_final = 1.0;
    const ConvergenceReport r = run_convergence(cfg, 3);
    ASSERT_FALSE(r.aborted);
    for (const auto& q : r.quantities)
    {
        EXPECT_TRUE(q.pass) << q.name;
        EXPECT_EQ(q.orders.size(), 2u);
    }
    EXPECT_TRUE(r.pass);
    EXPECT_TRUE(fs::exists(fs::path(cfg.out_dir) / "convergence.json"));
}

TEST(Sweep, RunsEveryPair)
{
    ExperimentConfig cfg = small_config("sweep");
    cfg.solver.t_final = 1.0;
    std::vector<SweepEntry> entries;
    const int code = run_sweep(cfg, {4.0, 6.0}, {0.5, 1.0}, &entries);
    EXPECT_EQ(code, exit_ok);
    EXPECT_EQ(entries.size(), 4u);
    for (const auto& e : entries)
        EXPECT_TRUE(fs::exists(fs::path(e.out_dir) / "summary.json"));
    EXPECT_TRUE(fs::exists(fs::path(cfg.out_dir) / "sweep.json"));
}

TEST(Cli, ExitCodesAndOverrides)
{
    const fs::path out = scratch_dir("cli");
    const std::string base = "run --grid-points 1025 --r-max 8 --t-final 1 --out-dir " + out.string();
    EXPECT_EQ(run_cli(base), exit_ok);
    EXPECT_TRUE(fs::exists(out / "records.csv"));
    EXPECT_EQ(run_cli(base + " --support 0.01,2"), exit_config_error);
    EXPECT_EQ(run_cli(base + " --formulation spectral"), exit_config_error);
    EXPECT_EQ(run_cli("run --bogus-flag"), exit_config_error);
    EXPECT_EQ(run_cli(base + " --config /nonexistent.json"), exit_config_error);
}
