#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "collapse/matrix.hpp"
#include "collapse/particle_system.hpp"
#include "collapse/vec3.hpp"

namespace collapse {

// Coulomb overlap of two unit-mass Gaussian densities of common length scale
// sigma_len (= sqrt of the stored variance), as a function of the separation z:
//   ftilde(z) = erf(z / (2 sigma_len)) / z,   ftilde(0) = 1 / (sigma_len sqrt(pi)).
// Separations below 1e-12 * sigma_len take the z = 0 branch.
double ftilde(double z, double sigma_len);

// closed form of \int g(r - xi) g(r - xj) dr: a Gaussian of doubled variance
// evaluated at the separation
double gaussian_overlap(const Vec3& xi, const Vec3& xj, double sigma_variance);

struct OverlapTable {
    RealMatrix ftilde_vals;  // over (particle, site) slot pairs
    RealMatrix gauss_vals;
};

OverlapTable build_overlap_table(const ParticleSystem& system);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

// Importance-sampled Monte Carlo for the defining 6D integral
//   I = \int\int g(r - xi) g(s - xj) / |r - s| dr ds = E[ 1 / |r - s| ]
// with r, s drawn from the two Gaussians. Deterministic for fixed seed and
// independent of the worker count.
McEstimate coulomb_overlap_oracle(const Vec3& xi, const Vec3& xj, double sigma_variance,
                                  std::size_t samples = 1000000, std::uint64_t seed = 0,
                                  unsigned threads = 1);

// tensor-product Simpson quadrature for \int g(r - xi) g(r - xj) dr
double gaussian_overlap_quadrature(const Vec3& xi, const Vec3& xj, double sigma_variance,
                                   std::size_t intervals = 400);

struct TaylorCheckReport {
    double fitted_quadratic_coeff = 0.0; // least-squares fit of ftilde(z) - ftilde(0) vs z^2
    double reference_magnitude = 0.0;    // 1 / (12 sqrt(pi) sigma_len^3)
    bool positive_on_grid = false;
    double min_second_difference = 0.0;  // over the interior grid
    bool convex_on_grid = false;         // second differences >= -1e-12
};

// Fits the small-z quadratic coefficient of ftilde and reports sign and
// magnitude together with positivity and discrete convexity on the grid.
// Grid points must satisfy z <= sigma_len / 10.
TaylorCheckReport ftilde_taylor_check(double sigma_len, const std::vector<double>& z_grid);

} // namespace collapse
