#include "collapse/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "collapse/errors.hpp"
#include "collapse/overlaps.hpp"

namespace collapse {

Bipartition Bipartition::first_particle(const ParticleSystem& system) {
    Bipartition b;
    b.left.push_back(0);
    for (std::size_t n = 1; n < system.particle_count(); ++n) b.right.push_back(n);
    return b;
}

void Bipartition::validate(const ParticleSystem& system) const {
    if (left.empty() || right.empty())
        throw ValidationError("Bipartition: both sides must be non-empty");
    std::vector<bool> seen(system.particle_count(), false);
    auto mark = [&](const std::vector<std::size_t>& side) {
        for (std::size_t n : side) {
            if (n >= system.particle_count() || seen[n])
                throw ValidationError("Bipartition: invalid or repeated particle index");
            seen[n] = true;
        }
    };
    mark(left);
    mark(right);
    for (bool s : seen)
        if (!s) throw ValidationError("Bipartition: does not cover all particles");
}

ComplexMatrix partial_transpose(const DensityMatrix& rho, const ParticleSystem& system,
                                const Bipartition& bipartition) {
    bipartition.validate(system);
    if (rho.dim() != system.config_count())
        throw ValidationError("partial_transpose: state/system dimension mismatch");

    std::vector<bool> is_left(system.particle_count(), false);
    for (std::size_t n : bipartition.left) is_left[n] = true;

    const std::size_t d = rho.dim();
    ComplexMatrix out(d);
    std::vector<std::size_t> xs, ys;
    for (std::size_t x = 0; x < d; ++x) {
        xs = system.site_indices(x);
        for (std::size_t y = 0; y < d; ++y) {
            ys = system.site_indices(y);
            // swap the left-side components between bra and ket
            std::vector<std::size_t> xt = xs, yt = ys;
            for (std::size_t n = 0; n < xt.size(); ++n) {
                if (is_left[n]) std::swap(xt[n], yt[n]);
            }
            out(x, y) = rho(system.config_index(xt), system.config_index(yt));
        }
    }
    return out;
}

namespace {

void check_hermitian(const ComplexMatrix& a, double tol) {
    double scale = std::max(a.max_abs(), 1e-300);
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = i; j < a.n; ++j)
            if (std::abs(a(i, j) - std::conj(a(j, i))) > tol * std::max(1.0, scale))
                throw ValidationError("hermitian_eigenvalues: input is not Hermitian");
}

double off_diagonal_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = 0; j < a.n; ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

double frobenius(const ComplexMatrix& a) {
    double s = 0.0;
    for (const cplx& v : a.a) s += std::norm(v);
    return std::sqrt(s);
}

// cyclic Jacobi with complex rotations; vectors accumulated when requested
void jacobi(ComplexMatrix a, std::vector<double>& values, ComplexMatrix* vectors) {
    const std::size_t n = a.n;
    if (vectors) {
        *vectors = ComplexMatrix(n);
        for (std::size_t i = 0; i < n; ++i) (*vectors)(i, i) = 1.0;
    }
    const double target = 1e-13 * std::max(frobenius(a), 1e-300);
    for (int sweep = 0; sweep < 60; ++sweep) {
        if (off_diagonal_norm(a) < target) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = std::abs(a(p, q));
                if (apq == 0.0) continue;
                cplx u = a(p, q) / apq;
                double app = a(p, p).real();
                double aqq = a(q, q).real();
                double tau = (aqq - app) / (2.0 * apq);
                double t = (tau >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                cplx su = s * u;

                // columns p and q of A and of the accumulated basis
                for (std::size_t i = 0; i < n; ++i) {
                    cplx aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - std::conj(su) * aiq;
                    a(i, q) = su * aip + c * aiq;
                }
                // rows p and q (A is kept Hermitian explicitly)
                for (std::size_t j = 0; j < n; ++j) {
                    cplx apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj - su * aqj;
                    a(q, j) = std::conj(su) * apj + c * aqj;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = cplx{app - t * apq, 0.0};
                a(q, q) = cplx{aqq + t * apq, 0.0};
                if (vectors) {
                    for (std::size_t i = 0; i < n; ++i) {
                        cplx vip = (*vectors)(i, p), viq = (*vectors)(i, q);
                        (*vectors)(i, p) = c * vip - std::conj(su) * viq;
                        (*vectors)(i, q) = su * vip + c * viq;
                    }
                }
            }
        }
    }

    values.resize(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i).real();
    // sort ascending, permuting vectors alongside
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = values[order[i]];
    values = std::move(sorted);
    if (vectors) {
        ComplexMatrix v(n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) v(i, j) = (*vectors)(i, order[j]);
        *vectors = std::move(v);
    }
}

} // namespace

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a) {
    if (a.n == 0) throw ValidationError("hermitian_eigenvalues: empty matrix");
    check_hermitian(a, 1e-10);
    std::vector<double> values;
    jacobi(a, values, nullptr);
    return values;
}

EigDecomposition hermitian_eigendecomposition(const ComplexMatrix& a) {
    if (a.n == 0) throw ValidationError("hermitian_eigendecomposition: empty matrix");
    check_hermitian(a, 1e-10);
    EigDecomposition out;
    jacobi(a, out.values, &out.vectors);
    return out;
}

NegativityReport negativity(const DensityMatrix& rho, const ParticleSystem& system,
                            const Bipartition& bipartition) {
    ComplexMatrix pt = partial_transpose(rho, system, bipartition);
    std::vector<double> ev = hermitian_eigenvalues(pt);
    NegativityReport rep;
    rep.method = NegativityMethod::eig;
    for (double v : ev) {
        if (v < 0.0) {
            rep.negative_eigenvalues.push_back(v);
            rep.negativity -= v;
        }
    }
    return rep;
}

FirstOrderPq first_order_pq(double m, double a, double d, double sigma_len, double dt,
                            const PhysicalConstants& constants) {
    if (!(m > 0.0) || !(a > 0.0) || !(d > 0.0) || !(sigma_len > 0.0) || !(dt >= 0.0))
        throw ValidationError("first_order_pq: parameters must be positive");
    constants.validate();

    // cross distances for center-to-center d are {|d-a|, d, d+a}; the
    // coherence-decay combinations below are the p/q eigenvalue pairs for
    // that geometry
    auto f = [&](double z) { return ftilde(std::abs(z), sigma_len); };
    const double scale = constants.G * m * m * dt / (8.0 * constants.hbar);

    FirstOrderPq out;
    out.p = scale * (2.0 * f(a) + f(d - a) + f(d + a) - 2.0 * f(0.0) - 2.0 * f(d));
    out.q = scale * (2.0 * f(a) + 2.0 * f(d) - 2.0 * f(0.0) - f(d - a) - f(d + a));
    out.n_first_order = std::max(0.0, out.p) + std::max(0.0, out.q);
    // smeared-regime form; algebraically identical to p
    out.n_large_sigma = 2.0 * scale *
                        ((f(a) - f(0.0)) + 0.5 * (f(d - a) + f(d + a) - 2.0 * f(d)));
    return out;
}

double first_order_negativity_rate(const DensityMatrix& rho0, const ParticleSystem& system,
                                   const GeneratorTables& tables,
                                   const Bipartition& bipartition) {
    const std::size_t d = rho0.dim();
    // generator applied once, elementwise
    DensityMatrix drho(d);
    for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = 0; y < d; ++y)
            drho(x, y) = cplx{-tables.gamma(x, y), -tables.theta(x, y)} * rho0(x, y);

    ComplexMatrix pt0 = partial_transpose(rho0, system, bipartition);
    ComplexMatrix ptd = partial_transpose(drho, system, bipartition);

    EigDecomposition eig = hermitian_eigendecomposition(pt0);
    double scale = std::max(pt0.max_abs(), 1e-300);
    std::vector<std::size_t> kernel;
    for (std::size_t i = 0; i < d; ++i)
        if (std::abs(eig.values[i]) <= 1e-10 * scale) kernel.push_back(i);
    if (kernel.empty()) return 0.0;

    // project the derivative onto the zero eigenspace
    const std::size_t k = kernel.size();
    ComplexMatrix block(k);
    for (std::size_t ai = 0; ai < k; ++ai) {
        for (std::size_t bi = 0; bi < k; ++bi) {
            cplx acc{0.0, 0.0};
            for (std::size_t r = 0; r < d; ++r)
                for (std::size_t c = 0; c < d; ++c)
                    acc += std::conj(eig.vectors(r, kernel[ai])) * ptd(r, c) *
                           eig.vectors(c, kernel[bi]);
            block(ai, bi) = acc;
        }
    }
    // symmetrize away roundoff
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) {
            cplx h = 0.5 * (block(i, j) + std::conj(block(j, i)));
            block(i, j) = h;
            block(j, i) = std::conj(h);
        }

    double rate = 0.0;
    for (double lam : hermitian_eigenvalues(block))
        if (lam < 0.0) rate -= lam;
    return rate;
}

} // namespace collapse
