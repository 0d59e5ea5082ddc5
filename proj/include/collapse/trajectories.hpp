#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "collapse/constants.hpp"
#include "collapse/density_matrix.hpp"
#include "collapse/generators.hpp"
#include "collapse/kernel.hpp"
#include "collapse/particle_system.hpp"
#include "collapse/rng.hpp"

namespace collapse {

// Finite-mode reduction of the monitoring noise field. The fundamental modes
// live on (particle, site) slots: site_factor L_s satisfies L_s L_s^T =
// C_site, and the configuration-level factor is its incidence contraction,
// L = M L_s with L L^T = C. Keeping the slot structure makes the feedback
// unitary factorize over particles exactly.
struct NoiseModel {
    RealMatrix site_factor;    // P x k
    RealMatrix config_factor;  // d x k
    std::size_t mode_count = 0;
};

NoiseModel build_noise_model(const ParticleSystem& system, const Kernel& kernel,
                             const PhysicalConstants& constants,
                             const GeneratorTables& tables);

// Pivoted Cholesky factor of a PSD matrix; columns are dropped once the
// residual diagonal falls below rel_tol * max initial diagonal.
RealMatrix factor_psd(const RealMatrix& c, double rel_tol = 1e-12);

// One Euler-Maruyama step of the monitoring SME in the configuration-diagonal
// reduction. dW holds mode_count unit Wiener increments (variance dt).
// Returns the per-mode signal increments dY_k = 2 (L^T p)_k dt + dW_k with p
// the pre-step populations. The state is renormalized to unit trace.
std::vector<double> step_sme_with_noise(DensityMatrix& rho, const NoiseModel& noise,
                                        const GeneratorTables& tables, double dt,
                                        const std::vector<double>& dw,
                                        double* trace_correction = nullptr);

std::vector<double> step_sme(DensityMatrix& rho, const NoiseModel& noise,
                             const GeneratorTables& tables, double dt, CounterRng& rng,
                             double* trace_correction = nullptr);

// Per-slot feedback phases from the recorded signal: theta_slot =
// -(2/kappa) (L_s dY); configuration phases are their per-particle sums.
std::vector<double> backaction_slot_phases(const NoiseModel& noise, const Kernel& kernel,
                                           const std::vector<double>& signal);

std::vector<double> backaction_config_phases(const ParticleSystem& system,
                                             const std::vector<double>& slot_phases);

// Applies the diagonal feedback unitary exp(-i theta_x) built from the same
// step's signal (monitoring first, then back-action).
void apply_backaction(DensityMatrix& rho, const std::vector<double>& signal,
                      const ParticleSystem& system, const NoiseModel& noise,
                      const Kernel& kernel);

enum class EnsembleMode {
    monitoring_only,  // SME steps, no feedback
    with_backaction,  // SME step then feedback unitary (DP kernels only)
    backaction_only   // feedback unitary from noise-only signals, no SME terms
};

struct EnsembleOptions {
    std::size_t n_traj = 10000;
    double dt = 0.0; // <= 0 selects 1e-3 / Gamma_max
    std::uint64_t master_seed = 42;
    unsigned threads = 0; // 0 = hardware
    EnsembleMode mode = EnsembleMode::monitoring_only;
    std::vector<double> checkpoint_times;
    double abort_trace_floor = 1e-6;
    double max_abort_fraction = 0.01;
    bool allow_small_ensemble = false; // CLI path: wide bands instead of an error
};

struct EnsembleSummary {
    std::vector<double> times;
    std::vector<DensityMatrix> mean;
    std::vector<RealMatrix> se_re; // standard error per element
    std::vector<RealMatrix> se_im;
    std::size_t n_traj = 0;
    std::size_t aborted = 0;
    double dt = 0.0;
};

EnsembleSummary run_ensemble(const ParticleSystem& system, const Kernel& kernel,
                             const PhysicalConstants& constants, const DensityMatrix& rho0,
                             const EnsembleOptions& options);

// Single stored trajectory, for inspection and the raw dump.
struct TrajectoryStep {
    double time = 0.0;
    DensityMatrix state;
    std::vector<double> signal;
};

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<TrajectoryStep> steps;
    std::vector<double> renormalization_log;
    bool aborted = false;
};

TrajectoryRecord record_trajectory(const ParticleSystem& system, const Kernel& kernel,
                                   const PhysicalConstants& constants,
                                   const DensityMatrix& rho0, const EnsembleOptions& options,
                                   std::uint64_t stream);

// Raw dump: little-endian binary, header then one frame per stored step.
void write_trajectory_dump(const std::string& path, const ParticleSystem& system,
                           const std::vector<TrajectoryRecord>& records, double dt,
                           std::uint64_t master_seed);

struct TrajectoryDump {
    std::uint64_t master_seed = 0;
    std::uint64_t dim = 0;
    std::uint64_t mode_count = 0;
    double dt = 0.0;
    struct Frame {
        std::uint64_t trajectory = 0;
        double time = 0.0;
        std::vector<cplx> state;
        std::vector<double> signal;
    };
    std::vector<Frame> frames;
};

TrajectoryDump read_trajectory_dump(const std::string& path);

} // namespace collapse
