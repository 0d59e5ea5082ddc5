#pragma once

#include <cstddef>
#include <vector>

#include "collapse/constants.hpp"
#include "collapse/kernel.hpp"
#include "collapse/matrix.hpp"
#include "collapse/particle_system.hpp"

namespace collapse {

enum class GeneratorTag { monitoring_only, dp_full, csl_monitoring };

// Exact generator data over the joint configuration basis:
//   Gamma: dephasing rates, symmetric, zero diagonal
//   Theta: phase rates (V_x - V_y)/hbar, antisymmetric
//   C:     noise covariance per unit time of the contracted measurement noise
struct GeneratorTables {
    RealMatrix gamma;
    RealMatrix theta;
    RealMatrix c;
    GeneratorTag tag = GeneratorTag::monitoring_only;
};

// Monitoring dissipator rates: Gamma_xy = (1/8 hbar) \int\int gamma_rs
// [rho_x(r)-rho_y(r)][rho_x(s)-rho_y(s)], reduced to pair-overlap sums.
RealMatrix dephasing_rates(const ParticleSystem& system, const Kernel& kernel,
                           const PhysicalConstants& constants);

struct EffectivePotential {
    std::vector<double> v; // diagonal values, self-terms retained
    RealMatrix theta;      // (v_x - v_y) / hbar
};

// V_x = -(G/2) sum_{n,m} m_n m_m ftilde(|x_n - x_m|), both densities smeared.
EffectivePotential effective_potential(const ParticleSystem& system,
                                       const PhysicalConstants& constants);

// Noise covariance C_xy = (1/4 hbar) \int\int gamma_rs rho_x(r) rho_y(s).
// Verifies positive semidefiniteness and the identity
// Gamma_xy = (C_xx + C_yy - 2 C_xy)/2 against dephasing_rates.
RealMatrix noise_covariance(const ParticleSystem& system, const Kernel& kernel,
                            const PhysicalConstants& constants);

// Monitoring-only tables: Gamma and C from the kernel, Theta = 0.
GeneratorTables monitoring_tables(const ParticleSystem& system, const Kernel& kernel,
                                  const PhysicalConstants& constants);

// Full DP generator: dissipator at the G/2 coefficient (twice the kappa = 2
// monitoring rate) plus the effective pair potential phases.
GeneratorTables dp_full_generator(const ParticleSystem& system,
                                  const PhysicalConstants& constants);

// Averaged generator matching a trajectory ensemble: monitoring tables when
// back-action is off; monitoring + back-action dephasing + potential phases
// when on (DP kernels only).
GeneratorTables averaged_tables(const ParticleSystem& system, const Kernel& kernel,
                                const PhysicalConstants& constants, bool with_backaction);

// Brute-force Riemann-sum evaluation of the double-commutator rates on a
// cubic grid discretization of r and s; refines the grid (doubling the cell
// count per axis) until the largest rate changes by < refine_rel_tol.
struct GridOracleSpec {
    std::size_t min_cells_per_axis = 24;
    std::size_t max_cells_per_axis = 192;
    double refine_rel_tol = 0.005;
};

RealMatrix grid_dephasing_rates(const ParticleSystem& system, const Kernel& kernel,
                                const PhysicalConstants& constants,
                                const GridOracleSpec& spec = {});

std::vector<double> symmetric_eigenvalues(const RealMatrix& m);

} // namespace collapse
