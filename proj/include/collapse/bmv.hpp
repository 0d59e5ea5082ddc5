#pragma once

#include "collapse/density_matrix.hpp"
#include "collapse/particle_system.hpp"

namespace collapse {

// Two equal masses on a line, each in a two-site superposition: particle 1
// at -a/2 and +a/2, particle 2 at d - a/2 and d + a/2 (center-to-center d).
// The initial state is the uniform product superposition (all entries 1/4).
struct BmvScenario {
    ParticleSystem system;
    DensityMatrix rho0;
};

BmvScenario bmv_scenario(double m, double a, double d, double sigma_len);

} // namespace collapse
