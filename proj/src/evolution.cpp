#include "collapse/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "collapse/errors.hpp"

namespace collapse {

namespace {

void check_times(const std::vector<double>& times) {
    if (times.empty()) throw ValidationError("evolution: empty time grid");
    if (times.front() < 0.0) throw ValidationError("evolution: times must start at >= 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw ValidationError("evolution: times must be strictly increasing");
}

void check_dims(const DensityMatrix& rho0, const GeneratorTables& tables) {
    if (tables.gamma.rows != rho0.dim() || tables.theta.rows != rho0.dim())
        throw ValidationError("evolution: generator/state dimension mismatch");
}

} // namespace

EvolutionResult evolve_exact(const DensityMatrix& rho0, const GeneratorTables& tables,
                             const std::vector<double>& times) {
    check_times(times);
    check_dims(rho0, tables);
    const std::size_t d = rho0.dim();

    EvolutionResult out;
    out.method = EvolutionMethod::exact;
    out.times = times;
    out.states.reserve(times.size());
    for (double t : times) {
        DensityMatrix rho(d);
        for (std::size_t x = 0; x < d; ++x) {
            for (std::size_t y = 0; y < d; ++y) {
                cplx lam{-tables.gamma(x, y), -tables.theta(x, y)};
                rho(x, y) = std::exp(lam * t) * rho0(x, y);
            }
        }
        out.states.push_back(std::move(rho));
    }
    return out;
}

EvolutionResult evolve_rk4(const DensityMatrix& rho0, const GeneratorTables& tables,
                           const std::vector<double>& times, double dt) {
    check_times(times);
    check_dims(rho0, tables);
    double rate_max = std::max(tables.gamma.max_abs(), tables.theta.max_abs());
    if (!(dt > 0.0)) throw ValidationError("evolve_rk4: dt must be positive");
    if (rate_max > 0.0 && dt > 0.01 / rate_max)
        throw ValidationError("evolve_rk4: dt exceeds 0.01 / max rate");

    const std::size_t d = rho0.dim();
    std::vector<cplx> lam(d * d);
    for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = 0; y < d; ++y)
            lam[x * d + y] = cplx{-tables.gamma(x, y), -tables.theta(x, y)};

    EvolutionResult out;
    out.method = EvolutionMethod::rk4;
    out.times = times;
    out.states.reserve(times.size());

    DensityMatrix rho = rho0;
    double t = 0.0;
    for (double target : times) {
        while (t < target - 1e-15 * std::max(1.0, target)) {
            double h = std::min(dt, target - t);
            // elementwise linear ODE: classic RK4 per entry
            for (std::size_t i = 0; i < d * d; ++i) {
                cplx l = lam[i];
                cplx y0 = rho.m.a[i];
                cplx k1 = l * y0;
                cplx k2 = l * (y0 + 0.5 * h * k1);
                cplx k3 = l * (y0 + 0.5 * h * k2);
                cplx k4 = l * (y0 + h * k3);
                rho.m.a[i] = y0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            t += h;
        }
        out.states.push_back(rho);
    }
    return out;
}

DensityMatrix short_time_state(const DensityMatrix& rho0, const GeneratorTables& tables,
                               double dt) {
    check_dims(rho0, tables);
    if (dt < 0.0) throw ValidationError("short_time_state: dt must be nonnegative");
    if (dt * tables.gamma.max_abs() > 0.1)
        throw ValidationError("short_time_state: dt * Gamma_max exceeds 0.1");

    const std::size_t d = rho0.dim();
    DensityMatrix rho(d);
    for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = 0; y < d; ++y) {
            cplx lam{-tables.gamma(x, y), -tables.theta(x, y)};
            rho(x, y) = (1.0 + lam * dt) * rho0(x, y);
        }
    return rho;
}

} // namespace collapse
