// collapse-sim: rates | evolve | sweep | trajectories | validate | plot
//
// Exit codes: 0 success, 1 validation failure, 2 numerical failure, 3 I/O.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "collapse/checks.hpp"
#include "collapse/commands.hpp"
#include "collapse/errors.hpp"

namespace {

using namespace collapse;

std::optional<std::string> env_str(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << text;
    if (!os) throw IoError("write failed for " + path);
}

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;

    ScenarioConfig load() const {
        ScenarioConfig c = ScenarioConfig::from_file(config_path);
        if (seed) c.master_seed = *seed;
        return c;
    }
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config = true) {
    auto* copt = cmd->add_option("--config", args.config_path, "scenario config (JSON)");
    if (needs_config) copt->required();
    cmd->add_option("--out", args.out_path, "output path")->required();
    cmd->add_option("--seed", args.seed, "master seed override");
    cmd->add_option("--threads", args.threads, "worker count (0 = hardware)");
}

void apply_env(CommonArgs& args) {
    if (auto s = env_str("COLLAPSE_SEED"); s && !args.seed) args.seed = std::stoull(*s);
    if (auto s = env_str("COLLAPSE_THREADS"); s && !args.threads)
        args.threads = static_cast<unsigned>(std::stoul(*s));
    if (auto s = env_str("COLLAPSE_OUT"); s && args.out_path.empty()) args.out_path = *s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"collapse-model decoherence and entanglement simulator"};
    app.require_subcommand(1);

    CommonArgs rates_args, evolve_args, sweep_args, traj_args, plot_args;
    std::string sweep_param = "sigma";
    double sweep_from = 2.0, sweep_to = 32.0, sweep_dt = 1e-3;
    std::size_t sweep_points = 9;
    std::string plot_csv, plot_x;
    std::vector<std::string> plot_y;
    std::string plot_title;
    std::string validate_out;
    unsigned validate_threads = 0;
    bool validate_quick = false;

    CLI::App* c_rates = app.add_subcommand("rates", "emit Gamma, Theta, C tables as CSV");
    add_common(c_rates, rates_args);

    CLI::App* c_evolve = app.add_subcommand("evolve", "closed-form evolution and negativity");
    add_common(c_evolve, evolve_args);

    CLI::App* c_sweep = app.add_subcommand("sweep", "parameter sweep of p, q, negativity");
    add_common(c_sweep, sweep_args);
    c_sweep->add_option("--param", sweep_param, "one of a, d, sigma, m");
    c_sweep->add_option("--from", sweep_from, "first grid value")->check(CLI::PositiveNumber);
    c_sweep->add_option("--to", sweep_to, "last grid value")->check(CLI::PositiveNumber);
    c_sweep->add_option("--points", sweep_points, "grid size")->check(CLI::PositiveNumber);
    c_sweep->add_option("--dt", sweep_dt, "time step for the first-order columns");

    std::string traj_dump;
    CLI::App* c_traj = app.add_subcommand("trajectories", "ensemble vs master equation");
    add_common(c_traj, traj_args);
    c_traj->add_option("--dump", traj_dump,
                       "write the first trajectories (up to 16) as a raw binary dump");

    CLI::App* c_validate = app.add_subcommand("validate", "run the oracle cross-check suite");
    c_validate->add_option("--out", validate_out, "also write a JSON report here");
    c_validate->add_option("--threads", validate_threads, "worker count");
    c_validate->add_flag("--quick", validate_quick, "reduced sample counts");

    CLI::App* c_plot = app.add_subcommand("plot", "render a CSV produced by this tool as SVG");
    c_plot->add_option("--csv", plot_csv, "input CSV")->required();
    c_plot->add_option("--out", plot_args.out_path, "output SVG")->required();
    c_plot->add_option("--x", plot_x, "x column (default: first)");
    c_plot->add_option("--y", plot_y, "y columns (default: all others)")->delimiter(',');
    c_plot->add_option("--title", plot_title, "chart title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    }

    try {
        if (c_rates->parsed()) {
            apply_env(rates_args);
            write_csv(rates_args.out_path, cmd_rates(rates_args.load()));
        } else if (c_evolve->parsed()) {
            apply_env(evolve_args);
            write_csv(evolve_args.out_path, cmd_evolve(evolve_args.load()));
        } else if (c_sweep->parsed()) {
            apply_env(sweep_args);
            if (sweep_points < 1) throw ValidationError("sweep: need at least one point");
            std::vector<double> grid;
            for (std::size_t i = 0; i < sweep_points; ++i) {
                double f = sweep_points == 1
                               ? 0.0
                               : static_cast<double>(i) / static_cast<double>(sweep_points - 1);
                grid.push_back(sweep_from + f * (sweep_to - sweep_from));
            }
            write_csv(sweep_args.out_path,
                      cmd_sweep(sweep_args.load(), sweep_param, grid, sweep_dt));
        } else if (c_traj->parsed()) {
            apply_env(traj_args);
            ScenarioConfig cfg = traj_args.load();
            CommandOverrides ov;
            ov.threads = traj_args.threads;
            TrajectoryReport rep = cmd_trajectories(cfg, ov);
            std::string text = csv_to_string(rep.table) + rep.summary;
            write_text(traj_args.out_path, text);
            std::cout << rep.summary;
            if (!traj_dump.empty()) {
                BmvScenario sc = cfg.scenario();
                GeneratorTables avg =
                    averaged_tables(sc.system, cfg.kernel(), cfg.constants(),
                                    cfg.with_backaction);
                EnsembleOptions eo;
                eo.n_traj = cfg.n_traj;
                eo.dt = cfg.traj_dt;
                eo.master_seed = cfg.master_seed;
                eo.mode = cfg.with_backaction ? EnsembleMode::with_backaction
                                              : EnsembleMode::monitoring_only;
                eo.allow_small_ensemble = true;
                for (double t : cfg.time_grid(avg))
                    if (t > 0.0) eo.checkpoint_times.push_back(t);
                std::vector<TrajectoryRecord> recs;
                std::uint64_t n_dump = std::min<std::uint64_t>(cfg.n_traj, 16);
                for (std::uint64_t i = 0; i < n_dump; ++i)
                    recs.push_back(record_trajectory(sc.system, cfg.kernel(), cfg.constants(),
                                                     sc.rho0, eo, i));
                double dt_used = recs[0].steps.size() > 1
                                     ? recs[0].steps[1].time - recs[0].steps[0].time
                                     : eo.dt;
                write_trajectory_dump(traj_dump, sc.system, recs, dt_used, eo.master_seed);
            }
            if (!rep.passed) return 2;
        } else if (c_validate->parsed()) {
            CheckOptions opts;
            opts.threads = validate_threads;
            opts.quick = validate_quick;
            std::vector<CheckResult> results = run_validation_suite(opts);
            std::cout << format_check_report(results);
            if (!validate_out.empty()) write_text(validate_out, format_check_report_json(results));
            for (const CheckResult& r : results)
                if (!r.passed) return 2;
        } else if (c_plot->parsed()) {
            PlotSpec spec;
            spec.x_column = plot_x;
            spec.y_columns = plot_y;
            spec.title = plot_title;
            write_text(plot_args.out_path, cmd_plot(read_csv(plot_csv), spec));
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
