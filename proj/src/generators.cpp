#include "collapse/generators.hpp"

#include <cmath>
#include <sstream>

#include "collapse/entanglement.hpp"
#include "collapse/errors.hpp"
#include "collapse/overlaps.hpp"

namespace collapse {

namespace {

// pair-overlap sum S_xy = sum_{n,m} m_n m_m k(|x_n - y_m|) for the kernel's
// overlap function, evaluated through the slot table
double pair_sum(const ParticleSystem& system, const RealMatrix& slot_overlaps,
                std::size_t x, std::size_t y) {
    const std::size_t np = system.particle_count();
    double s = 0.0;
    for (std::size_t n = 0; n < np; ++n) {
        std::size_t sn = system.slot_id(n, system.site_of(x, n));
        double mn = system.particle(n).mass;
        for (std::size_t m = 0; m < np; ++m) {
            std::size_t sm = system.slot_id(m, system.site_of(y, m));
            s += mn * system.particle(m).mass * slot_overlaps(sn, sm);
        }
    }
    return s;
}

RealMatrix kernel_slot_overlaps(const ParticleSystem& system, const Kernel& kernel) {
    OverlapTable t = build_overlap_table(system);
    return kernel.type == Kernel::Type::dp ? t.ftilde_vals : t.gauss_vals;
}

// dissipator rates with an explicit prefactor: pref * (S_xx + S_yy - 2 S_xy)
RealMatrix difference_rates(const ParticleSystem& system, const RealMatrix& slot_overlaps,
                            double pref) {
    const std::size_t d = system.config_count();
    std::vector<double> self(d);
    for (std::size_t x = 0; x < d; ++x) self[x] = pair_sum(system, slot_overlaps, x, x);
    RealMatrix g(d, d);
    for (std::size_t x = 0; x < d; ++x) {
        g(x, x) = 0.0;
        for (std::size_t y = x + 1; y < d; ++y) {
            double cross = pair_sum(system, slot_overlaps, x, y);
            double v = pref * (self[x] + self[y] - 2.0 * cross);
            g(x, y) = g(y, x) = v;
        }
    }
    return g;
}

} // namespace

RealMatrix dephasing_rates(const ParticleSystem& system, const Kernel& kernel,
                           const PhysicalConstants& constants) {
    constants.validate();
    RealMatrix overlaps = kernel_slot_overlaps(system, kernel);
    double pref = kernel.strength / (8.0 * constants.hbar);
    if (kernel.type == Kernel::Type::dp) pref *= constants.G;
    return difference_rates(system, overlaps, pref);
}

EffectivePotential effective_potential(const ParticleSystem& system,
                                       const PhysicalConstants& constants) {
    constants.validate();
    OverlapTable t = build_overlap_table(system);
    const std::size_t d = system.config_count();

    EffectivePotential out;
    out.v.resize(d);
    for (std::size_t x = 0; x < d; ++x)
        out.v[x] = -0.5 * constants.G * pair_sum(system, t.ftilde_vals, x, x);

    // the n = m self-terms are configuration independent; check they cancel
    // in the differences by recomputing V without them
    std::vector<double> v_noself(d);
    for (std::size_t x = 0; x < d; ++x) {
        double s = 0.0;
        const std::size_t np = system.particle_count();
        for (std::size_t n = 0; n < np; ++n) {
            std::size_t sn = system.slot_id(n, system.site_of(x, n));
            for (std::size_t m = 0; m < np; ++m) {
                if (m == n) continue;
                std::size_t sm = system.slot_id(m, system.site_of(x, m));
                s += system.particle(n).mass * system.particle(m).mass * t.ftilde_vals(sn, sm);
            }
        }
        v_noself[x] = -0.5 * constants.G * s;
    }

    out.theta = RealMatrix(d, d);
    for (std::size_t x = 0; x < d; ++x) {
        for (std::size_t y = 0; y < d; ++y) {
            double full = (out.v[x] - out.v[y]) / constants.hbar;
            double bare = (v_noself[x] - v_noself[y]) / constants.hbar;
            double scale = std::max({std::abs(full), std::abs(bare), 1e-300});
            if (std::abs(full - bare) > 1e-9 * scale + 1e-14)
                throw NumericalError("effective_potential: self-terms failed to cancel");
            out.theta(x, y) = full;
        }
    }
    return out;
}

RealMatrix noise_covariance(const ParticleSystem& system, const Kernel& kernel,
                            const PhysicalConstants& constants) {
    constants.validate();
    RealMatrix overlaps = kernel_slot_overlaps(system, kernel);
    double pref = kernel.strength / (4.0 * constants.hbar);
    if (kernel.type == Kernel::Type::dp) pref *= constants.G;

    const std::size_t d = system.config_count();
    RealMatrix c(d, d);
    for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = x; y < d; ++y)
            c(x, y) = c(y, x) = pref * pair_sum(system, overlaps, x, y);

    std::vector<double> ev = symmetric_eigenvalues(c);
    double scale = c.max_abs();
    if (ev.front() < -1e-10 * scale)
        throw ModelError("noise_covariance: covariance is not positive semidefinite");

    // independent route: Gamma from the variance-difference identity
    RealMatrix gamma = dephasing_rates(system, kernel, constants);
    for (std::size_t x = 0; x < d; ++x) {
        for (std::size_t y = 0; y < d; ++y) {
            double from_c = 0.5 * (c(x, x) + c(y, y) - 2.0 * c(x, y));
            double denom = std::max(std::abs(gamma(x, y)), 1e-300);
            if (x != y && std::abs(from_c - gamma(x, y)) > 1e-12 * std::max(denom, scale)) {
                std::ostringstream os;
                os << "noise_covariance: Gamma identity violated at (" << x << "," << y << ")";
                throw NumericalError(os.str());
            }
        }
    }
    return c;
}

GeneratorTables monitoring_tables(const ParticleSystem& system, const Kernel& kernel,
                                  const PhysicalConstants& constants) {
    GeneratorTables t;
    t.gamma = dephasing_rates(system, kernel, constants);
    t.c = noise_covariance(system, kernel, constants);
    const std::size_t d = system.config_count();
    t.theta = RealMatrix(d, d);
    t.tag = kernel.type == Kernel::Type::dp ? GeneratorTag::monitoring_only
                                            : GeneratorTag::csl_monitoring;
    return t;
}

GeneratorTables dp_full_generator(const ParticleSystem& system,
                                  const PhysicalConstants& constants) {
    GeneratorTables t;
    OverlapTable ot = build_overlap_table(system);
    // Coulomb double commutator at the G/2 coefficient
    t.gamma = difference_rates(system, ot.ftilde_vals, 0.5 * constants.G / constants.hbar);
    t.c = noise_covariance(system, Kernel::dp(2.0), constants);
    t.theta = effective_potential(system, constants).theta;
    t.tag = GeneratorTag::dp_full;
    return t;
}

GeneratorTables averaged_tables(const ParticleSystem& system, const Kernel& kernel,
                                const PhysicalConstants& constants, bool with_backaction) {
    if (!with_backaction) return monitoring_tables(system, kernel, constants);
    if (kernel.type != Kernel::Type::dp)
        throw ModelError("averaged_tables: back-action requires the DP kernel");

    GeneratorTables t = monitoring_tables(system, kernel, constants);
    // feedback phase noise adds (4/kappa^2) times the monitoring rates
    double extra = 4.0 / (kernel.strength * kernel.strength);
    const std::size_t d = system.config_count();
    for (std::size_t i = 0; i < d * d; ++i) t.gamma.a[i] *= 1.0 + extra;
    t.theta = effective_potential(system, constants).theta;
    t.tag = GeneratorTag::dp_full;
    return t;
}

namespace {

// Riemann-sum evaluation of the double integral over r and s. The smeared
// densities are sampled per axis; the (r, s) double sum is regrouped by the
// offset u = r - s, which keeps the full 6D sum exact while the per-axis
// correlations of the sampled Gaussian factors are reused.
struct AxisSamples {
    // [slot][cell], midpoint samples of the 1D Gaussian factor
    std::vector<std::vector<double>> g;
};

// cell average of 1/|u| over the cube of side h centered at the origin,
// via midpoint refinement with an even subgrid (no node hits zero)
double coulomb_self_cell(double h) {
    const int n = 32;
    double sum = 0.0;
    const double sub = h / n;
    for (int i = 0; i < n; ++i) {
        double x = (i + 0.5) * sub - 0.5 * h;
        for (int j = 0; j < n; ++j) {
            double y = (j + 0.5) * sub - 0.5 * h;
            for (int k = 0; k < n; ++k) {
                double z = (k + 0.5) * sub - 0.5 * h;
                sum += 1.0 / std::sqrt(x * x + y * y + z * z);
            }
        }
    }
    return sum / (static_cast<double>(n) * n * n);
}

RealMatrix grid_rates_at(const ParticleSystem& system, const Kernel& kernel,
                         const PhysicalConstants& constants, std::size_t cells) {
    const double sl = system.sigma_len();
    const double var = system.sigma_variance();
    const Vec3 c0 = system.centroid();
    const double half = 0.5 * std::max(12.0 * sl, 2.0 * system.max_site_spread() + 8.0 * sl);
    const double h = 2.0 * half / static_cast<double>(cells);
    const double norm1d = 1.0 / std::sqrt(2.0 * M_PI * var);

    const std::size_t p = system.site_slot_count();
    const double c0v[3] = {c0.x, c0.y, c0.z};

    // per-axis midpoint samples of each slot's normalized 1D factor
    std::vector<AxisSamples> axes(3);
    for (int ax = 0; ax < 3; ++ax) {
        axes[ax].g.assign(p, std::vector<double>(cells));
        for (std::size_t s = 0; s < p; ++s) {
            const Vec3& xs = system.slot_position(s);
            const double ctr = ax == 0 ? xs.x : (ax == 1 ? xs.y : xs.z);
            for (std::size_t i = 0; i < cells; ++i) {
                double x = c0v[ax] - half + (static_cast<double>(i) + 0.5) * h;
                double u = x - ctr;
                axes[ax].g[s][i] = norm1d * std::exp(-u * u / (2.0 * var));
            }
        }
    }

    // 1D correlations corr[ax][a][b][offset + cells - 1] = sum_i g_a[i] g_b[i + offset]
    const std::size_t noff = 2 * cells - 1;
    std::vector<std::vector<std::vector<std::vector<double>>>> corr(3);
    for (int ax = 0; ax < 3; ++ax) {
        corr[ax].assign(p, std::vector<std::vector<double>>(p, std::vector<double>(noff, 0.0)));
        for (std::size_t a = 0; a < p; ++a) {
            for (std::size_t b = 0; b < p; ++b) {
                for (std::ptrdiff_t off = -(std::ptrdiff_t)cells + 1;
                     off < (std::ptrdiff_t)cells; ++off) {
                    double s = 0.0;
                    std::size_t lo = off < 0 ? static_cast<std::size_t>(-off) : 0;
                    std::size_t hi = off < 0 ? cells : cells - static_cast<std::size_t>(off);
                    const double* ga = axes[ax].g[a].data();
                    const double* gb = axes[ax].g[b].data();
                    for (std::size_t i = lo; i < hi; ++i)
                        s += ga[i] * gb[i + static_cast<std::size_t>(off)];
                    corr[ax][a][b][static_cast<std::size_t>(off + (std::ptrdiff_t)cells - 1)] = s;
                }
            }
        }
    }

    const std::size_t d = system.config_count();
    const double cell_vol = h * h * h;
    RealMatrix rates(d, d);

    if (kernel.type == Kernel::Type::csl) {
        // gamma delta(r - s): single 3D sum of the squared difference field;
        // offset zero correlations carry the whole sum
        const std::size_t z = cells - 1;
        double pref = kernel.strength / (8.0 * constants.hbar);
        for (std::size_t x = 0; x < d; ++x) {
            for (std::size_t y = x + 1; y < d; ++y) {
                double acc = 0.0;
                const std::size_t np = system.particle_count();
                for (std::size_t n = 0; n < np; ++n) {
                    std::size_t sx_n = system.slot_id(n, system.site_of(x, n));
                    std::size_t sy_n = system.slot_id(n, system.site_of(y, n));
                    double mn = system.particle(n).mass;
                    for (std::size_t m = 0; m < np; ++m) {
                        std::size_t sx_m = system.slot_id(m, system.site_of(x, m));
                        std::size_t sy_m = system.slot_id(m, system.site_of(y, m));
                        double mm = system.particle(m).mass;
                        // (rho_x - rho_y)(r)^2 expands over slot pairs
                        const std::size_t sa[2] = {sx_n, sy_n};
                        const std::size_t sb[2] = {sx_m, sy_m};
                        const double sgn[2] = {1.0, -1.0};
                        for (int ia = 0; ia < 2; ++ia)
                            for (int ib = 0; ib < 2; ++ib)
                                acc += sgn[ia] * sgn[ib] * mn * mm *
                                       corr[0][sa[ia]][sb[ib]][z] * corr[1][sa[ia]][sb[ib]][z] *
                                       corr[2][sa[ia]][sb[ib]][z];
                    }
                }
                rates(x, y) = rates(y, x) = pref * acc * cell_vol;
            }
        }
        return rates;
    }

    // DP Coulomb kernel: sum over offsets u of (1/|u|) times the 3D
    // correlation of the difference fields
    const double self_cell = coulomb_self_cell(h);
    double pref = kernel.strength * constants.G / (8.0 * constants.hbar);

    // collect the distinct slot pairs needed, then accumulate per offset
    for (std::size_t x = 0; x < d; ++x) {
        for (std::size_t y = x + 1; y < d; ++y) {
            // difference field as signed slot list
            std::vector<std::pair<double, std::size_t>> terms;
            const std::size_t np = system.particle_count();
            for (std::size_t n = 0; n < np; ++n) {
                double mn = system.particle(n).mass;
                terms.emplace_back(+mn, system.slot_id(n, system.site_of(x, n)));
                terms.emplace_back(-mn, system.slot_id(n, system.site_of(y, n)));
            }
            double acc = 0.0;
            const std::ptrdiff_t nc = static_cast<std::ptrdiff_t>(cells);
            for (std::ptrdiff_t ui = -nc + 1; ui < nc; ++ui) {
                const std::size_t oi = static_cast<std::size_t>(ui + nc - 1);
                for (std::ptrdiff_t uj = -nc + 1; uj < nc; ++uj) {
                    const std::size_t oj = static_cast<std::size_t>(uj + nc - 1);
                    for (std::ptrdiff_t uk = -nc + 1; uk < nc; ++uk) {
                        const std::size_t ok = static_cast<std::size_t>(uk + nc - 1);
                        double cd = 0.0;
                        for (const auto& [wa, sa] : terms)
                            for (const auto& [wb, sb] : terms)
                                cd += wa * wb * corr[0][sa][sb][oi] * corr[1][sa][sb][oj] *
                                      corr[2][sa][sb][ok];
                        double r = std::sqrt(static_cast<double>(ui * ui + uj * uj + uk * uk)) * h;
                        double kern = (ui == 0 && uj == 0 && uk == 0) ? self_cell : 1.0 / r;
                        acc += kern * cd;
                    }
                }
            }
            rates(x, y) = rates(y, x) = pref * acc * cell_vol * cell_vol;
        }
    }
    return rates;
}

} // namespace

RealMatrix grid_dephasing_rates(const ParticleSystem& system, const Kernel& kernel,
                                const PhysicalConstants& constants, const GridOracleSpec& spec) {
    RealMatrix prev = grid_rates_at(system, kernel, constants, spec.min_cells_per_axis);
    for (std::size_t cells = spec.min_cells_per_axis * 2; cells <= spec.max_cells_per_axis;
         cells *= 2) {
        RealMatrix next = grid_rates_at(system, kernel, constants, cells);
        double scale = next.max_abs();
        double change = 0.0;
        for (std::size_t i = 0; i < next.a.size(); ++i)
            change = std::max(change, std::abs(next.a[i] - prev.a[i]));
        prev = std::move(next);
        if (change <= spec.refine_rel_tol * scale) break;
    }
    return prev;
}

std::vector<double> symmetric_eigenvalues(const RealMatrix& m) {
    if (m.rows != m.cols) throw ValidationError("symmetric_eigenvalues: matrix not square");
    ComplexMatrix a(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) a(i, j) = cplx{m(i, j), 0.0};
    return hermitian_eigenvalues(a);
}

} // namespace collapse
