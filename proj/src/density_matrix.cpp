#include "collapse/density_matrix.hpp"

#include <sstream>

#include "collapse/entanglement.hpp"
#include "collapse/errors.hpp"

namespace collapse {

DensityMatrix DensityMatrix::uniform_superposition(std::size_t dim) {
    DensityMatrix rho(dim);
    const cplx v{1.0 / static_cast<double>(dim), 0.0};
    for (auto& e : rho.m.a) e = v;
    return rho;
}

void validate_density_matrix(const DensityMatrix& rho, const StateCheckOptions& opts) {
    const std::size_t n = rho.dim();
    if (n == 0) throw ValidationError("density matrix: empty");

    double herm_dev = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            herm_dev = std::max(herm_dev, std::abs(rho(i, j) - std::conj(rho(j, i))));
    if (herm_dev > opts.hermiticity_tol) {
        std::ostringstream os;
        os << "density matrix: Hermiticity violated by " << herm_dev;
        throw ValidationError(os.str());
    }

    double trace_dev = std::abs(rho.m.trace() - cplx{1.0, 0.0});
    if (trace_dev > opts.trace_tol) {
        std::ostringstream os;
        os << "density matrix: trace deviates from 1 by " << trace_dev;
        throw ValidationError(os.str());
    }

    if (n <= opts.eig_check_max_dim) {
        std::vector<double> ev = hermitian_eigenvalues(rho.m);
        if (ev.front() < opts.positivity_tol) {
            std::ostringstream os;
            os << "density matrix: minimum eigenvalue " << ev.front();
            throw ValidationError(os.str());
        }
    } else {
        // necessary conditions only: nonnegative populations, 2x2 minors
        for (std::size_t i = 0; i < n; ++i) {
            if (rho(i, i).real() < opts.positivity_tol)
                throw ValidationError("density matrix: negative population");
            for (std::size_t j = i + 1; j < n; ++j) {
                double bound = rho(i, i).real() * rho(j, j).real();
                double coh = std::norm(rho(i, j));
                if (coh > bound + std::abs(opts.positivity_tol))
                    throw ValidationError("density matrix: coherence exceeds population bound");
            }
        }
    }
}

} // namespace collapse
