#pragma once

#include <cstddef>

#include "collapse/matrix.hpp"

namespace collapse {

struct DensityMatrix {
    ComplexMatrix m;

    DensityMatrix() = default;
    explicit DensityMatrix(std::size_t dim) : m(dim) {}

    std::size_t dim() const { return m.n; }
    cplx& operator()(std::size_t i, std::size_t j) { return m(i, j); }
    cplx operator()(std::size_t i, std::size_t j) const { return m(i, j); }

    static DensityMatrix uniform_superposition(std::size_t dim);
};

struct StateCheckOptions {
    double hermiticity_tol = 1e-12;  // max element deviation
    double trace_tol = 1e-12;
    double positivity_tol = -1e-10;  // smallest admissible eigenvalue
    // eigenvalue check is O(dim^3); above this dimension fall back to the
    // necessary 2x2-minor conditions
    std::size_t eig_check_max_dim = 128;

    static StateCheckOptions strict() { return {}; }
    // stochastic trajectory states are O(sqrt(dt)) accurate
    static StateCheckOptions relaxed() {
        StateCheckOptions o;
        o.hermiticity_tol = 1e-9;
        o.trace_tol = 1e-9;
        o.positivity_tol = -1e-6;
        return o;
    }
};

// Single reusable validator: Hermiticity, unit trace, and positivity.
// Throws ValidationError with a description of the violated invariant.
void validate_density_matrix(const DensityMatrix& rho,
                             const StateCheckOptions& opts = StateCheckOptions::strict());

} // namespace collapse
