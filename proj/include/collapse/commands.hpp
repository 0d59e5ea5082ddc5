#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "collapse/csv.hpp"
#include "collapse/scenario.hpp"
#include "collapse/svg.hpp"

namespace collapse {

// In-process command surface backing the CLI; every function is a pure
// mapping from (config, options) to output text, so determinism and
// round-trip tests can run without spawning processes.

struct CommandOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
};

// columns: x_index, y_index, gamma, theta, c
CsvTable cmd_rates(const ScenarioConfig& config);

// columns: t, coherence magnitudes, negativity_exact, negativity_first_order
CsvTable cmd_evolve(const ScenarioConfig& config);

// one row per grid point: param, p, q, n_approx, n_exact
CsvTable cmd_sweep(const ScenarioConfig& config, const std::string& param,
                   const std::vector<double>& grid, double dt_for_pq);

struct TrajectoryReport {
    CsvTable table; // per checkpoint: t, max deviation, max se, worst z
    std::string summary;
    bool passed = false;
    std::size_t aborted = 0;
};

TrajectoryReport cmd_trajectories(const ScenarioConfig& config, const CommandOverrides& ov = {});

std::string cmd_plot(const CsvTable& table, const PlotSpec& spec);

} // namespace collapse
