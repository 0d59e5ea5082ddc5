#pragma once

#include <cstddef>
#include <vector>

#include "collapse/constants.hpp"
#include "collapse/density_matrix.hpp"
#include "collapse/generators.hpp"
#include "collapse/matrix.hpp"
#include "collapse/particle_system.hpp"

namespace collapse {

struct Bipartition {
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;

    static Bipartition first_particle(const ParticleSystem& system);
    void validate(const ParticleSystem& system) const;
};

ComplexMatrix partial_transpose(const DensityMatrix& rho, const ParticleSystem& system,
                                const Bipartition& bipartition);

// Cyclic Jacobi with complex rotations; iterates until the off-diagonal
// Frobenius norm drops below 1e-13 * ||A||_F. Eigenvalues ascending.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a);

struct EigDecomposition {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // columns
};

EigDecomposition hermitian_eigendecomposition(const ComplexMatrix& a);

enum class NegativityMethod { eig, first_order };

struct NegativityReport {
    double negativity = 0.0;
    std::vector<double> negative_eigenvalues;
    NegativityMethod method = NegativityMethod::eig;
};

NegativityReport negativity(const DensityMatrix& rho, const ParticleSystem& system,
                            const Bipartition& bipartition);

// First-order coherence-decay eigenvalue combinations for the two-particle
// two-site geometry with sites at +-a/2 and d +- a/2 (center-to-center d),
// monitoring-only DP kernel at kappa = 2:
//   p = -(dt/4) Gamma(00, 11),  q = -(dt/4) Gamma(01, 10)
// expressed through ftilde sums. n_first_order = max(0,p) + max(0,q);
// n_large_sigma is the smeared-regime form, algebraically equal to p.
// Signs are reported as computed, never assumed.
struct FirstOrderPq {
    double p = 0.0;
    double q = 0.0;
    double n_first_order = 0.0;
    double n_large_sigma = 0.0;
};

FirstOrderPq first_order_pq(double m, double a, double d, double sigma_len, double dt,
                            const PhysicalConstants& constants);

// d/dt of negativity at t = 0+ for an arbitrary generator: first-order
// perturbation of the zero eigenvalues of the partially transposed state.
double first_order_negativity_rate(const DensityMatrix& rho0, const ParticleSystem& system,
                                   const GeneratorTables& tables,
                                   const Bipartition& bipartition);

} // namespace collapse
