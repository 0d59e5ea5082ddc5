#include "collapse/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "collapse/errors.hpp"
#include "collapse/overlaps.hpp"
#include "collapse/threading.hpp"

namespace collapse {

RealMatrix factor_psd(const RealMatrix& c, double rel_tol) {
    if (c.rows != c.cols) throw ValidationError("factor_psd: matrix not square");
    const std::size_t n = c.rows;
    std::vector<double> diag(n);
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = c(i, i);
        dmax = std::max(dmax, std::abs(diag[i]));
    }
    const double floor = rel_tol * std::max(dmax, 1e-300);

    // pivoted Cholesky: greedy on the residual diagonal
    std::vector<std::vector<double>> cols;
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t piv = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (diag[i] > best) {
                best = diag[i];
                piv = i;
            }
        }
        if (best <= floor) break;

        std::vector<double> col(n);
        double root = std::sqrt(best);
        for (std::size_t i = 0; i < n; ++i) {
            double v = c(i, piv);
            for (std::size_t k = 0; k < cols.size(); ++k) v -= cols[k][i] * cols[k][piv];
            col[i] = v / root;
        }
        col[piv] = root;
        for (std::size_t i = 0; i < n; ++i) diag[i] -= col[i] * col[i];
        cols.push_back(std::move(col));
    }
    // negative residuals never become the pivot; check them on exit
    for (double v : diag)
        if (v < -1e-9 * std::max(dmax, 1e-300))
            throw ModelError("factor_psd: matrix is indefinite");

    RealMatrix l(n, cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k)
        for (std::size_t i = 0; i < n; ++i) l(i, k) = cols[k][i];
    return l;
}

NoiseModel build_noise_model(const ParticleSystem& system, const Kernel& kernel,
                             const PhysicalConstants& constants,
                             const GeneratorTables& tables) {
    // slot-level covariance: C_slot[(n,s),(m,t)] = pref m_n m_t k(|x - y|)
    const std::size_t p = system.site_slot_count();
    OverlapTable ot = build_overlap_table(system);
    const RealMatrix& base =
        kernel.type == Kernel::Type::dp ? ot.ftilde_vals : ot.gauss_vals;
    double pref = kernel.strength / (4.0 * constants.hbar);
    if (kernel.type == Kernel::Type::dp) pref *= constants.G;

    RealMatrix c_slot(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            c_slot(i, j) = pref * system.slot_mass(i) * system.slot_mass(j) * base(i, j);

    NoiseModel nm;
    nm.site_factor = factor_psd(c_slot);
    nm.mode_count = nm.site_factor.cols;

    // incidence contraction to configuration space
    const std::size_t d = system.config_count();
    nm.config_factor = RealMatrix(d, nm.mode_count);
    for (std::size_t x = 0; x < d; ++x) {
        for (std::size_t n = 0; n < system.particle_count(); ++n) {
            std::size_t slot = system.slot_id(n, system.site_of(x, n));
            for (std::size_t k = 0; k < nm.mode_count; ++k)
                nm.config_factor(x, k) += nm.site_factor(slot, k);
        }
    }

    // reconstruction check against the configuration covariance
    double cmax = std::max(tables.c.max_abs(), 1e-300);
    for (std::size_t x = 0; x < d; ++x) {
        for (std::size_t y = 0; y < d; ++y) {
            double v = 0.0;
            for (std::size_t k = 0; k < nm.mode_count; ++k)
                v += nm.config_factor(x, k) * nm.config_factor(y, k);
            if (std::abs(v - tables.c(x, y)) > 1e-10 * cmax)
                throw ModelError("build_noise_model: L L^T does not reproduce C");
        }
    }
    return nm;
}

std::vector<double> step_sme_with_noise(DensityMatrix& rho, const NoiseModel& noise,
                                        const GeneratorTables& tables, double dt,
                                        const std::vector<double>& dw,
                                        double* trace_correction) {
    const std::size_t d = rho.dim();
    const std::size_t k = noise.mode_count;
    if (dw.size() != k) throw ValidationError("step_sme: wrong noise vector length");
    if (dt * tables.gamma.max_abs() > 1e-2)
        throw ValidationError("step_sme: dt * Gamma_max exceeds 1e-2");

    // pre-step populations
    std::vector<double> pops(d);
    for (std::size_t x = 0; x < d; ++x) pops[x] = rho(x, x).real();

    // contracted noise mu = L dW and its population average
    std::vector<double> mu(d, 0.0);
    for (std::size_t x = 0; x < d; ++x) {
        double m = 0.0;
        for (std::size_t j = 0; j < k; ++j) m += noise.config_factor(x, j) * dw[j];
        mu[x] = m;
    }
    double mu_bar = 0.0;
    for (std::size_t x = 0; x < d; ++x) mu_bar += pops[x] * mu[x];

    // drift (dephasing + phases) plus the expectation-subtracted innovation
    for (std::size_t x = 0; x < d; ++x) {
        for (std::size_t y = 0; y < d; ++y) {
            cplx lam{-tables.gamma(x, y), -tables.theta(x, y)};
            rho(x, y) += rho(x, y) * (lam * dt + (mu[x] + mu[y] - 2.0 * mu_bar));
        }
    }

    double tr = rho.m.trace().real();
    if (!(tr > 1e-6)) throw NumericalError("step_sme: trace collapsed");
    double corr = 1.0 / tr;
    for (auto& e : rho.m.a) e *= corr;
    if (trace_correction) *trace_correction = tr - 1.0;

    // signal: expectation drift in mode space plus the raw noise
    std::vector<double> signal(k);
    for (std::size_t j = 0; j < k; ++j) {
        double drift = 0.0;
        for (std::size_t x = 0; x < d; ++x) drift += noise.config_factor(x, j) * pops[x];
        signal[j] = 2.0 * drift * dt + dw[j];
    }
    return signal;
}

std::vector<double> step_sme(DensityMatrix& rho, const NoiseModel& noise,
                             const GeneratorTables& tables, double dt, CounterRng& rng,
                             double* trace_correction) {
    std::vector<double> dw(noise.mode_count);
    const double root_dt = std::sqrt(dt);
    for (double& v : dw) v = root_dt * rng.gaussian();
    return step_sme_with_noise(rho, noise, tables, dt, dw, trace_correction);
}

std::vector<double> backaction_slot_phases(const NoiseModel& noise, const Kernel& kernel,
                                           const std::vector<double>& signal) {
    if (kernel.type != Kernel::Type::dp)
        throw ModelError("backaction: only defined for the DP kernel");
    if (signal.size() != noise.mode_count)
        throw ValidationError("backaction: wrong signal length");
    const std::size_t p = noise.site_factor.rows;
    std::vector<double> phases(p, 0.0);
    const double scale = -2.0 / kernel.strength;
    for (std::size_t s = 0; s < p; ++s) {
        double acc = 0.0;
        for (std::size_t k = 0; k < noise.mode_count; ++k)
            acc += noise.site_factor(s, k) * signal[k];
        phases[s] = scale * acc;
    }
    return phases;
}

std::vector<double> backaction_config_phases(const ParticleSystem& system,
                                             const std::vector<double>& slot_phases) {
    const std::size_t d = system.config_count();
    std::vector<double> out(d, 0.0);
    for (std::size_t x = 0; x < d; ++x) {
        double acc = 0.0;
        for (std::size_t n = 0; n < system.particle_count(); ++n)
            acc += slot_phases[system.slot_id(n, system.site_of(x, n))];
        out[x] = acc;
    }
    return out;
}

void apply_backaction(DensityMatrix& rho, const std::vector<double>& signal,
                      const ParticleSystem& system, const NoiseModel& noise,
                      const Kernel& kernel) {
    std::vector<double> slot = backaction_slot_phases(noise, kernel, signal);
    std::vector<double> theta = backaction_config_phases(system, slot);
    const std::size_t d = rho.dim();
    std::vector<cplx> u(d);
    for (std::size_t x = 0; x < d; ++x) u[x] = std::polar(1.0, -theta[x]);
    for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = 0; y < d; ++y) rho(x, y) *= u[x] * std::conj(u[y]);
}

namespace {

struct EngineSetup {
    GeneratorTables tables;      // SME drift tables (Theta = 0)
    NoiseModel noise;
    double dt = 0.0;
    std::vector<double> times;
    std::vector<std::size_t> steps_per_checkpoint;
};

EngineSetup prepare_engine(const ParticleSystem& system, const Kernel& kernel,
                           const PhysicalConstants& constants,
                           const EnsembleOptions& options) {
    if (options.checkpoint_times.empty())
        throw ValidationError("run_ensemble: no checkpoint times");
    for (std::size_t i = 0; i < options.checkpoint_times.size(); ++i) {
        double prev = i == 0 ? 0.0 : options.checkpoint_times[i - 1];
        if (options.checkpoint_times[i] <= prev)
            throw ValidationError("run_ensemble: checkpoints must be positive increasing");
    }
    if (options.mode != EnsembleMode::monitoring_only && kernel.type != Kernel::Type::dp)
        throw ModelError("run_ensemble: back-action requires the DP kernel");

    EngineSetup s;
    s.tables = monitoring_tables(system, kernel, constants);
    s.noise = build_noise_model(system, kernel, constants, s.tables);

    double gmax = s.tables.gamma.max_abs();
    s.dt = options.dt > 0.0 ? options.dt : (gmax > 0.0 ? 1e-3 / gmax : 1e-3);

    // snap checkpoints onto the step grid
    double t = 0.0;
    for (double target : options.checkpoint_times) {
        std::size_t steps = static_cast<std::size_t>(std::llround((target - t) / s.dt));
        if (steps == 0) steps = 1;
        s.steps_per_checkpoint.push_back(steps);
        t += static_cast<double>(steps) * s.dt;
        s.times.push_back(t);
    }
    return s;
}

} // namespace

TrajectoryRecord record_trajectory(const ParticleSystem& system, const Kernel& kernel,
                                   const PhysicalConstants& constants,
                                   const DensityMatrix& rho0, const EnsembleOptions& options,
                                   std::uint64_t stream) {
    EngineSetup s = prepare_engine(system, kernel, constants, options);
    TrajectoryRecord rec;
    rec.seed = options.master_seed;
    rec.stream = stream;
    CounterRng rng(options.master_seed, stream);
    DensityMatrix rho = rho0;
    double t = 0.0;
    const double root_dt = std::sqrt(s.dt);

    rec.steps.push_back({0.0, rho, {}});
    try {
        for (std::size_t ck = 0; ck < s.steps_per_checkpoint.size(); ++ck) {
            for (std::size_t i = 0; i < s.steps_per_checkpoint[ck]; ++i) {
                std::vector<double> dw(s.noise.mode_count);
                for (double& v : dw) v = root_dt * rng.gaussian();
                std::vector<double> signal;
                double corr = 0.0;
                if (options.mode == EnsembleMode::backaction_only) {
                    signal = dw; // noise-only signal, no deterministic part
                    apply_backaction(rho, signal, system, s.noise, kernel);
                } else {
                    signal = step_sme_with_noise(rho, s.noise, s.tables, s.dt, dw, &corr);
                    if (options.mode == EnsembleMode::with_backaction)
                        apply_backaction(rho, signal, system, s.noise, kernel);
                }
                t += s.dt;
                rec.steps.push_back({t, rho, signal});
                rec.renormalization_log.push_back(corr);
            }
        }
    } catch (const NumericalError&) {
        rec.aborted = true;
    }
    return rec;
}

EnsembleSummary run_ensemble(const ParticleSystem& system, const Kernel& kernel,
                             const PhysicalConstants& constants, const DensityMatrix& rho0,
                             const EnsembleOptions& options) {
    if (options.n_traj < 100 && !options.allow_small_ensemble)
        throw ValidationError("run_ensemble: at least 100 trajectories required");
    if (options.n_traj < 2) throw ValidationError("run_ensemble: need at least 2 trajectories");
    EngineSetup s = prepare_engine(system, kernel, constants, options);

    const std::size_t d = system.config_count();
    const std::size_t n_ck = s.times.size();
    const std::size_t n_el = d * d;

    // fixed-size trajectory blocks; per-block partial sums are reduced in
    // block order, so results are independent of the worker count
    constexpr std::size_t kBlock = 64;
    const std::size_t n_blocks = (options.n_traj + kBlock - 1) / kBlock;

    struct BlockAccum {
        std::vector<cplx> sum;       // [ck * n_el + e]
        std::vector<double> sum_re2; // sums of squares per component
        std::vector<double> sum_im2;
        std::size_t aborted = 0;
    };
    std::vector<BlockAccum> acc(n_blocks);

    parallel_blocks(n_blocks, options.threads, [&](std::size_t b) {
        BlockAccum& out = acc[b];
        out.sum.assign(n_ck * n_el, cplx{0.0, 0.0});
        out.sum_re2.assign(n_ck * n_el, 0.0);
        out.sum_im2.assign(n_ck * n_el, 0.0);
        const std::size_t lo = b * kBlock;
        const std::size_t hi = std::min(options.n_traj, lo + kBlock);
        const double root_dt = std::sqrt(s.dt);

        std::vector<cplx> traj_vals(n_ck * n_el);
        for (std::size_t traj = lo; traj < hi; ++traj) {
            CounterRng rng(options.master_seed, traj);
            DensityMatrix rho = rho0;
            std::vector<double> dw(s.noise.mode_count);
            bool aborted = false;
            for (std::size_t ck = 0; ck < n_ck && !aborted; ++ck) {
                for (std::size_t i = 0; i < s.steps_per_checkpoint[ck]; ++i) {
                    for (double& v : dw) v = root_dt * rng.gaussian();
                    try {
                        if (options.mode == EnsembleMode::backaction_only) {
                            apply_backaction(rho, dw, system, s.noise, kernel);
                        } else {
                            std::vector<double> signal =
                                step_sme_with_noise(rho, s.noise, s.tables, s.dt, dw);
                            if (options.mode == EnsembleMode::with_backaction)
                                apply_backaction(rho, signal, system, s.noise, kernel);
                        }
                    } catch (const NumericalError&) {
                        aborted = true;
                        break;
                    }
                }
                if (aborted) break;
                for (std::size_t e = 0; e < n_el; ++e) traj_vals[ck * n_el + e] = rho.m.a[e];
            }
            if (aborted) {
                ++out.aborted; // aborted trajectories contribute nothing
                continue;
            }
            for (std::size_t i = 0; i < n_ck * n_el; ++i) {
                cplx v = traj_vals[i];
                out.sum[i] += v;
                out.sum_re2[i] += v.real() * v.real();
                out.sum_im2[i] += v.imag() * v.imag();
            }
        }
    });

    EnsembleSummary summary;
    summary.times = s.times;
    summary.dt = s.dt;
    summary.n_traj = options.n_traj;
    for (const BlockAccum& b : acc) summary.aborted += b.aborted;
    if (static_cast<double>(summary.aborted) >
        options.max_abort_fraction * static_cast<double>(options.n_traj)) {
        std::ostringstream os;
        os << "run_ensemble: " << summary.aborted << " of " << options.n_traj
           << " trajectories aborted";
        throw NumericalError(os.str());
    }
    const double n = static_cast<double>(options.n_traj - summary.aborted);

    for (std::size_t ck = 0; ck < n_ck; ++ck) {
        DensityMatrix mean(d);
        RealMatrix se_re(d, d), se_im(d, d);
        for (std::size_t e = 0; e < n_el; ++e) {
            cplx sum{0.0, 0.0};
            double re2 = 0.0, im2 = 0.0;
            for (const BlockAccum& b : acc) {
                sum += b.sum[ck * n_el + e];
                re2 += b.sum_re2[ck * n_el + e];
                im2 += b.sum_im2[ck * n_el + e];
            }
            cplx m = sum / n;
            mean.m.a[e] = m;
            double var_re = std::max(0.0, re2 / n - m.real() * m.real());
            double var_im = std::max(0.0, im2 / n - m.imag() * m.imag());
            se_re.a[e] = std::sqrt(var_re / n);
            se_im.a[e] = std::sqrt(var_im / n);
        }
        summary.mean.push_back(std::move(mean));
        summary.se_re.push_back(std::move(se_re));
        summary.se_im.push_back(std::move(se_im));
    }
    return summary;
}

namespace {

template <typename T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("trajectory dump: truncated file");
    return v;
}

constexpr char kDumpMagic[8] = {'C', 'L', 'T', 'R', 'A', 'J', '0', '1'};

} // namespace

void write_trajectory_dump(const std::string& path, const ParticleSystem& system,
                           const std::vector<TrajectoryRecord>& records, double dt,
                           std::uint64_t master_seed) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("trajectory dump: cannot open " + path);
    os.write(kDumpMagic, 8);
    put<std::uint64_t>(os, master_seed);
    put<std::uint64_t>(os, system.config_count());
    std::uint64_t mode_count = 0;
    for (const auto& rec : records)
        for (const auto& st : rec.steps)
            mode_count = std::max<std::uint64_t>(mode_count, st.signal.size());
    put<std::uint64_t>(os, mode_count);
    put<double>(os, dt);
    std::uint64_t frames = 0;
    for (const auto& rec : records) frames += rec.steps.size();
    put<std::uint64_t>(os, frames);

    for (std::size_t r = 0; r < records.size(); ++r) {
        for (const TrajectoryStep& st : records[r].steps) {
            put<std::uint64_t>(os, static_cast<std::uint64_t>(r));
            put<double>(os, st.time);
            for (const cplx& v : st.state.m.a) {
                put<double>(os, v.real());
                put<double>(os, v.imag());
            }
            for (std::size_t k = 0; k < mode_count; ++k)
                put<double>(os, k < st.signal.size() ? st.signal[k] : 0.0);
        }
    }
    if (!os) throw IoError("trajectory dump: write failed");
}

TrajectoryDump read_trajectory_dump(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("trajectory dump: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kDumpMagic, 8) != 0)
        throw IoError("trajectory dump: bad magic");

    TrajectoryDump dump;
    dump.master_seed = get<std::uint64_t>(is);
    dump.dim = get<std::uint64_t>(is);
    dump.mode_count = get<std::uint64_t>(is);
    dump.dt = get<double>(is);
    std::uint64_t frames = get<std::uint64_t>(is);
    for (std::uint64_t f = 0; f < frames; ++f) {
        TrajectoryDump::Frame fr;
        fr.trajectory = get<std::uint64_t>(is);
        fr.time = get<double>(is);
        fr.state.resize(dump.dim * dump.dim);
        for (auto& v : fr.state) {
            double re = get<double>(is);
            double im = get<double>(is);
            v = cplx{re, im};
        }
        fr.signal.resize(dump.mode_count);
        for (auto& v : fr.signal) v = get<double>(is);
        dump.frames.push_back(std::move(fr));
    }
    return dump;
}

} // namespace collapse
