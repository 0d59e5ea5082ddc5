#pragma once

#include <vector>

#include "collapse/density_matrix.hpp"
#include "collapse/generators.hpp"

namespace collapse {

enum class EvolutionMethod { exact, rk4, first_order };

struct EvolutionResult {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    EvolutionMethod method = EvolutionMethod::exact;
};

// Elementwise closed form rho_xy(t) = exp(-(Gamma_xy + i Theta_xy) t) rho_xy(0).
EvolutionResult evolve_exact(const DensityMatrix& rho0, const GeneratorTables& tables,
                             const std::vector<double>& times);

// Fixed-step classic RK4 on d rho / dt = -(Gamma + i Theta) o rho.
// Requires dt <= 0.01 / max(|Gamma|, |Theta|).
EvolutionResult evolve_rk4(const DensityMatrix& rho0, const GeneratorTables& tables,
                           const std::vector<double>& times, double dt);

// rho(0) + dt * generator(rho(0)); requires dt * Gamma_max <= 0.1.
DensityMatrix short_time_state(const DensityMatrix& rho0, const GeneratorTables& tables,
                               double dt);

} // namespace collapse
