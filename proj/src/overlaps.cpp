#include "collapse/overlaps.hpp"

#include <cmath>

#include "collapse/errors.hpp"
#include "collapse/rng.hpp"
#include "collapse/threading.hpp"

namespace collapse {

namespace {
constexpr double kSqrtPi = 1.7724538509055160272981674833411;
}

double ftilde(double z, double sigma_len) {
    if (!(sigma_len > 0.0)) throw ValidationError("ftilde: sigma_len must be positive");
    if (z < 0.0) throw ValidationError("ftilde: separation must be nonnegative");
    if (z < 1e-12 * sigma_len) return 1.0 / (sigma_len * kSqrtPi);
    return std::erf(z / (2.0 * sigma_len)) / z;
}

double gaussian_overlap(const Vec3& xi, const Vec3& xj, double sigma_variance) {
    if (!(sigma_variance > 0.0))
        throw ValidationError("gaussian_overlap: sigma must be positive");
    double d2 = distance(xi, xj);
    d2 *= d2;
    double s2 = 2.0 * sigma_variance; // variance of the convolved Gaussian
    double norm = std::pow(2.0 * M_PI * s2, -1.5);
    return norm * std::exp(-d2 / (2.0 * s2));
}

OverlapTable build_overlap_table(const ParticleSystem& system) {
    const std::size_t p = system.site_slot_count();
    OverlapTable t;
    t.ftilde_vals = RealMatrix(p, p);
    t.gauss_vals = RealMatrix(p, p);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i; j < p; ++j) {
            double z = distance(system.slot_position(i), system.slot_position(j));
            double f = ftilde(z, system.sigma_len());
            double g = gaussian_overlap(system.slot_position(i), system.slot_position(j),
                                        system.sigma_variance());
            t.ftilde_vals(i, j) = t.ftilde_vals(j, i) = f;
            t.gauss_vals(i, j) = t.gauss_vals(j, i) = g;
        }
    }
    return t;
}

McEstimate coulomb_overlap_oracle(const Vec3& xi, const Vec3& xj, double sigma_variance,
                                  std::size_t samples, std::uint64_t seed, unsigned threads) {
    if (!(sigma_variance > 0.0))
        throw ValidationError("coulomb_overlap_oracle: sigma must be positive");
    if (samples < 1000)
        throw ValidationError("coulomb_overlap_oracle: at least 10^3 samples required");

    const double s = std::sqrt(sigma_variance);
    const Vec3 sep = xj - xi;

    // fixed-size blocks with per-block streams; partials combined in block
    // order so the estimate does not depend on the worker count
    constexpr std::size_t kBlock = 16384;
    const std::size_t n_blocks = (samples + kBlock - 1) / kBlock;
    std::vector<double> sum1(n_blocks, 0.0), sum2(n_blocks, 0.0);

    parallel_blocks(n_blocks, threads, [&](std::size_t b) {
        CounterRng rng(seed, b);
        const std::size_t lo = b * kBlock;
        const std::size_t hi = std::min(samples, lo + kBlock);
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            // r - s for two Gaussian draws around xi and xj
            double dx = sep.x + s * (rng.gaussian() - rng.gaussian());
            double dy = sep.y + s * (rng.gaussian() - rng.gaussian());
            double dz = sep.z + s * (rng.gaussian() - rng.gaussian());
            double inv = 1.0 / std::sqrt(dx * dx + dy * dy + dz * dz);
            s1 += inv;
            s2 += inv * inv;
        }
        sum1[b] = s1;
        sum2[b] = s2;
    });

    double s1 = 0.0, s2 = 0.0;
    for (std::size_t b = 0; b < n_blocks; ++b) {
        s1 += sum1[b];
        s2 += sum2[b];
    }
    const double n = static_cast<double>(samples);
    const double mean = s1 / n;
    const double var = std::max(0.0, s2 / n - mean * mean);
    return {mean, std::sqrt(var / n), samples};
}

double gaussian_overlap_quadrature(const Vec3& xi, const Vec3& xj, double sigma_variance,
                                   std::size_t intervals) {
    if (!(sigma_variance > 0.0))
        throw ValidationError("gaussian_overlap_quadrature: sigma must be positive");
    if (intervals < 8) throw ValidationError("gaussian_overlap_quadrature: grid too coarse");
    if (intervals % 2 == 1) ++intervals;

    const double s = std::sqrt(sigma_variance);
    const double norm1d = 1.0 / std::sqrt(2.0 * M_PI * sigma_variance);
    const double sep[3] = {xj.x - xi.x, xj.y - xi.y, xj.z - xi.z};

    // integrand factorizes per axis; Simpson over both centers +- 10s
    double out = 1.0;
    for (int ax = 0; ax < 3; ++ax) {
        double lo = std::min(0.0, sep[ax]) - 10.0 * s;
        double hi = std::max(0.0, sep[ax]) + 10.0 * s;
        double h = (hi - lo) / static_cast<double>(intervals);
        auto f = [&](double x) {
            double u = x, v = x - sep[ax];
            return norm1d * norm1d * std::exp(-(u * u + v * v) / (2.0 * sigma_variance));
        };
        double acc = f(lo) + f(hi);
        for (std::size_t k = 1; k < intervals; ++k)
            acc += f(lo + h * static_cast<double>(k)) * (k % 2 ? 4.0 : 2.0);
        out *= acc * h / 3.0;
    }
    return out;
}

TaylorCheckReport ftilde_taylor_check(double sigma_len, const std::vector<double>& z_grid) {
    if (z_grid.size() < 3) throw ValidationError("ftilde_taylor_check: grid too small");
    for (double z : z_grid)
        if (z < 0.0 || z > sigma_len / 10.0)
            throw ValidationError("ftilde_taylor_check: grid must satisfy z <= sigma_len/10");

    TaylorCheckReport rep;
    rep.reference_magnitude = 1.0 / (12.0 * kSqrtPi * sigma_len * sigma_len * sigma_len);

    // least squares of ftilde(z) - ftilde(0) against z^2
    const double f0 = ftilde(0.0, sigma_len);
    double num = 0.0, den = 0.0;
    rep.positive_on_grid = true;
    for (double z : z_grid) {
        double f = ftilde(z, sigma_len);
        if (!(f > 0.0)) rep.positive_on_grid = false;
        double z2 = z * z;
        num += (f - f0) * z2;
        den += z2 * z2;
    }
    rep.fitted_quadratic_coeff = den > 0.0 ? num / den : 0.0;

    rep.min_second_difference = 0.0;
    bool first = true;
    for (std::size_t i = 1; i + 1 < z_grid.size(); ++i) {
        double d2 = ftilde(z_grid[i + 1], sigma_len) + ftilde(z_grid[i - 1], sigma_len) -
                    2.0 * ftilde(z_grid[i], sigma_len);
        if (first || d2 < rep.min_second_difference) rep.min_second_difference = d2;
        first = false;
    }
    rep.convex_on_grid = rep.min_second_difference >= -1e-12;
    return rep;
}

} // namespace collapse
