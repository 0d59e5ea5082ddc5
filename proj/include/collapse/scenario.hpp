#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "collapse/bmv.hpp"
#include "collapse/constants.hpp"
#include "collapse/entanglement.hpp"
#include "collapse/kernel.hpp"
#include "collapse/trajectories.hpp"

namespace collapse {

enum class ModelChoice { dp_monitoring, dp_full, csl_monitoring };

// JSON scenario file. Defaults: dp-monitoring, natural units, kappa = 2,
// m = 1, a = 1, d = 3, sigma = 10 (length scale), n_traj = 10^4, seed = 42.
struct ScenarioConfig {
    ModelChoice model = ModelChoice::dp_monitoring;
    std::string constants_profile = "natural";
    double m = 1.0;
    double a = 1.0;
    double d = 3.0;
    double sigma_len = 10.0;
    double kappa = 2.0;          // dp models
    double gamma = 1.0;          // csl model
    double t_max = 0.0;          // <= 0 selects 1 / Gamma_max
    std::size_t n_points = 11;
    std::size_t n_traj = 10000;
    double traj_dt = 0.0;        // <= 0 selects 1e-3 / Gamma_max
    std::uint64_t master_seed = 42;
    bool with_backaction = false;
    std::vector<std::vector<std::size_t>> bipartition; // empty = {{0},{1}}

    static ScenarioConfig from_json_text(const std::string& text);
    static ScenarioConfig from_file(const std::string& path);

    PhysicalConstants constants() const;
    Kernel kernel() const;
    BmvScenario scenario() const;
    Bipartition bipartition_for(const ParticleSystem& system) const;
    GeneratorTables tables(const ParticleSystem& system) const;
    std::vector<double> time_grid(const GeneratorTables& tables) const;
};

} // namespace collapse
