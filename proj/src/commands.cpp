#include "collapse/commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "collapse/evolution.hpp"

namespace collapse {

CsvTable cmd_rates(const ScenarioConfig& config) {
    BmvScenario sc = config.scenario();
    GeneratorTables t = config.tables(sc.system);
    const std::size_t d = sc.system.config_count();

    CsvTable out;
    out.header = {"x_index", "y_index", "gamma", "theta", "c"};
    for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = 0; y < d; ++y)
            out.rows.push_back({static_cast<double>(x), static_cast<double>(y), t.gamma(x, y),
                                t.theta(x, y), t.c(x, y)});
    return out;
}

CsvTable cmd_evolve(const ScenarioConfig& config) {
    BmvScenario sc = config.scenario();
    GeneratorTables t = config.tables(sc.system);
    Bipartition bip = config.bipartition_for(sc.system);
    std::vector<double> times = config.time_grid(t);
    EvolutionResult evo = evolve_exact(sc.rho0, t, times);
    double rate = first_order_negativity_rate(sc.rho0, sc.system, t, bip);

    CsvTable out;
    out.header = {"t", "coh_00_11", "coh_01_10", "negativity_exact", "negativity_first_order"};
    for (std::size_t i = 0; i < times.size(); ++i) {
        const DensityMatrix& rho = evo.states[i];
        validate_density_matrix(rho);
        NegativityReport rep = negativity(rho, sc.system, bip);
        out.rows.push_back({times[i], std::abs(rho(0, 3)), std::abs(rho(1, 2)), rep.negativity,
                            rate * times[i]});
    }
    return out;
}

CsvTable cmd_sweep(const ScenarioConfig& config, const std::string& param,
                   const std::vector<double>& grid, double dt_for_pq) {
    if (grid.empty()) throw ValidationError("sweep: empty grid");
    if (param != "a" && param != "d" && param != "sigma" && param != "m")
        throw ValidationError("sweep: parameter must be one of a, d, sigma, m");

    CsvTable out;
    out.header = {param, "p", "q", "n_approx", "n_exact"};
    for (double v : grid) {
        if (!(v > 0.0)) throw ValidationError("sweep: grid values must be positive");
        ScenarioConfig c = config;
        if (param == "a") c.a = v;
        else if (param == "d") c.d = v;
        else if (param == "sigma") c.sigma_len = v;
        else c.m = v;

        BmvScenario sc = c.scenario();
        GeneratorTables t = c.tables(sc.system);
        Bipartition bip = c.bipartition_for(sc.system);
        FirstOrderPq pq = first_order_pq(c.m, c.a, c.d, c.sigma_len, dt_for_pq, c.constants());
        EvolutionResult evo = evolve_exact(sc.rho0, t, {dt_for_pq});
        NegativityReport rep = negativity(evo.states.back(), sc.system, bip);
        out.rows.push_back({v, pq.p, pq.q, pq.n_first_order, rep.negativity});
    }
    return out;
}

TrajectoryReport cmd_trajectories(const ScenarioConfig& config, const CommandOverrides& ov) {
    BmvScenario sc = config.scenario();
    PhysicalConstants pc = config.constants();
    Kernel kn = config.kernel();
    GeneratorTables avg = averaged_tables(sc.system, kn, pc, config.with_backaction);

    EnsembleOptions opts;
    opts.n_traj = config.n_traj;
    opts.dt = config.traj_dt;
    opts.master_seed = ov.seed.value_or(config.master_seed);
    opts.threads = ov.threads.value_or(0);
    opts.mode = config.with_backaction ? EnsembleMode::with_backaction
                                       : EnsembleMode::monitoring_only;
    opts.allow_small_ensemble = true; // small runs just widen the bands
    std::vector<double> grid = config.time_grid(avg);
    for (double t : grid)
        if (t > 0.0) opts.checkpoint_times.push_back(t);

    EnsembleSummary ens =
        run_ensemble(sc.system, kn, pc, sc.rho0, opts);
    EvolutionResult exact = evolve_exact(sc.rho0, avg, ens.times);

    TrajectoryReport rep;
    rep.aborted = ens.aborted;
    rep.table.header = {"t", "max_abs_deviation", "max_std_error", "worst_z"};
    double worst = 0.0;
    const std::size_t d = sc.system.config_count();
    for (std::size_t ck = 0; ck < ens.times.size(); ++ck) {
        double maxdev = 0.0, maxse = 0.0, maxz = 0.0;
        for (std::size_t i = 0; i < d * d; ++i) {
            cplx dv = ens.mean[ck].m.a[i] - exact.states[ck].m.a[i];
            double se_r = ens.se_re[ck].a[i] + 1e-12;
            double se_i = ens.se_im[ck].a[i] + 1e-12;
            maxdev = std::max({maxdev, std::abs(dv.real()), std::abs(dv.imag())});
            maxse = std::max({maxse, se_r, se_i});
            maxz = std::max({maxz, std::abs(dv.real()) / se_r, std::abs(dv.imag()) / se_i});
        }
        worst = std::max(worst, maxz);
        rep.table.rows.push_back({ens.times[ck], maxdev, maxse, maxz});
    }
    rep.passed = worst <= 4.0;

    std::ostringstream os;
    os << "trajectories: n=" << ens.n_traj << " aborted=" << ens.aborted << " dt=" << ens.dt
       << " worst_z=" << format_double(worst) << " verdict="
       << (rep.passed ? "PASS" : "FAIL") << '\n';
    rep.summary = os.str();
    return rep;
}

std::string cmd_plot(const CsvTable& table, const PlotSpec& spec) {
    return render_line_chart(table, spec);
}

} // namespace collapse
