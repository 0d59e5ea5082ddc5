#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "collapse/bmv.hpp"
#include "collapse/entanglement.hpp"
#include "collapse/errors.hpp"
#include "collapse/evolution.hpp"
#include "collapse/rng.hpp"

using namespace collapse;

namespace {

ParticleSystem two_qubit_system() {
    Particle p1{1.0, {{0, 0, 0}, {1, 0, 0}}};
    Particle p2{1.0, {{5, 0, 0}, {6, 0, 0}}};
    return ParticleSystem({p1, p2}, 1.0);
}

DensityMatrix bell_state() {
    // (|00> + |11>)/sqrt(2)
    DensityMatrix rho(4);
    rho(0, 0) = rho(0, 3) = rho(3, 0) = rho(3, 3) = cplx{0.5, 0.0};
    return rho;
}

DensityMatrix random_product_state(CounterRng& rng) {
    // pure qubit states |psi1> x |psi2|
    auto qubit = [&](cplx& c0, cplx& c1) {
        double th = M_PI * rng.uniform();
        double ph = 2.0 * M_PI * rng.uniform();
        c0 = std::cos(th / 2.0);
        c1 = std::polar(std::sin(th / 2.0), ph);
    };
    cplx a0, a1, b0, b1;
    qubit(a0, a1);
    qubit(b0, b1);
    cplx amp[4] = {a0 * b0, a0 * b1, a1 * b0, a1 * b1};
    DensityMatrix rho(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) rho(i, j) = amp[i] * std::conj(amp[j]);
    return rho;
}

} // namespace

TEST_CASE("partial transpose of a product state keeps the spectrum") {
    ParticleSystem system = two_qubit_system();
    Bipartition bip = Bipartition::first_particle(system);
    CounterRng rng(3, 0);
    for (int trial = 0; trial < 10; ++trial) {
        DensityMatrix rho = random_product_state(rng);
        ComplexMatrix pt = partial_transpose(rho, system, bip);
        std::vector<double> ev = hermitian_eigenvalues(pt);
        CHECK(ev.front() >= -1e-12);
    }
}

TEST_CASE("bell state partial transpose spectrum") {
    ParticleSystem system = two_qubit_system();
    Bipartition bip = Bipartition::first_particle(system);
    ComplexMatrix pt = partial_transpose(bell_state(), system, bip);
    std::vector<double> ev = hermitian_eigenvalues(pt);
    REQUIRE(ev.size() == 4);
    CHECK(ev[0] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ev[2] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ev[3] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("partial transpose is an involution and preserves trace") {
    ParticleSystem system = two_qubit_system();
    Bipartition bip = Bipartition::first_particle(system);
    DensityMatrix rho = bell_state();
    ComplexMatrix once = partial_transpose(rho, system, bip);
    DensityMatrix wrap(4);
    wrap.m = once;
    ComplexMatrix twice = partial_transpose(wrap, system, bip);
    for (std::size_t i = 0; i < 16; ++i) CHECK(twice.a[i] == rho.m.a[i]);
    CHECK(std::abs(once.trace() - rho.m.trace()) < 1e-15);
}

TEST_CASE("bipartition validation") {
    ParticleSystem system = two_qubit_system();
    Bipartition empty;
    CHECK_THROWS_AS(empty.validate(system), ValidationError);
    Bipartition repeated{{0, 1}, {1}};
    CHECK_THROWS_AS(repeated.validate(system), ValidationError);
    Bipartition partial{{0}, {}};
    CHECK_THROWS_AS(partial.validate(system), ValidationError);
}

TEST_CASE("jacobi eigenvalues on known matrices") {
    ComplexMatrix id(3);
    for (int i = 0; i < 3; ++i) id(i, i) = 1.0;
    std::vector<double> ev = hermitian_eigenvalues(id);
    for (double v : ev) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

    ComplexMatrix diag(3);
    diag(0, 0) = 3.0;
    diag(1, 1) = 1.0;
    diag(2, 2) = 2.0;
    ev = hermitian_eigenvalues(diag);
    CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ev[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(ev[2] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("jacobi reconstruction residuals on random hermitian matrices") {
    CounterRng rng(17, 0);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 8;
        ComplexMatrix a(n);
        for (std::size_t i = 0; i < n; ++i) {
            a(i, i) = cplx{2.0 * rng.gaussian(), 0.0};
            for (std::size_t j = i + 1; j < n; ++j) {
                cplx v{rng.gaussian(), rng.gaussian()};
                a(i, j) = v;
                a(j, i) = std::conj(v);
            }
        }
        EigDecomposition eig = hermitian_eigendecomposition(a);

        double trace = 0.0;
        for (std::size_t i = 0; i < n; ++i) trace += a(i, i).real();
        double sum = 0.0;
        for (double v : eig.values) sum += v;
        CHECK(std::abs(sum - trace) < 1e-11);

        // A v = lambda v residuals
        for (std::size_t k = 0; k < n; ++k) {
            double worst = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                cplx av{0.0, 0.0};
                for (std::size_t j = 0; j < n; ++j) av += a(i, j) * eig.vectors(j, k);
                worst = std::max(worst, std::abs(av - eig.values[k] * eig.vectors(i, k)));
            }
            CHECK(worst < 1e-10);
        }
    }
}

TEST_CASE("jacobi rejects non-hermitian input") {
    ComplexMatrix a(2);
    a(0, 1) = cplx{1.0, 0.0};
    a(1, 0) = cplx{2.0, 0.0};
    CHECK_THROWS_AS(hermitian_eigenvalues(a), ValidationError);
}

TEST_CASE("negativity of canonical states") {
    ParticleSystem system = two_qubit_system();
    Bipartition bip = Bipartition::first_particle(system);
    CHECK(negativity(DensityMatrix::uniform_superposition(4), system, bip).negativity <
          1e-12);
    NegativityReport bell = negativity(bell_state(), system, bip);
    CHECK(bell.negativity == doctest::Approx(0.5).epsilon(1e-12));
    REQUIRE(bell.negative_eigenvalues.size() == 1);
    CHECK(bell.negative_eigenvalues[0] == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("negativity vanishes for random product states") {
    ParticleSystem system = two_qubit_system();
    Bipartition bip = Bipartition::first_particle(system);
    CounterRng rng(23, 0);
    for (int trial = 0; trial < 20; ++trial) {
        DensityMatrix rho = random_product_state(rng);
        CHECK(negativity(rho, system, bip).negativity < 1e-12);
    }
}

TEST_CASE("negativity is invariant under local diagonal phase unitaries") {
    ParticleSystem system = two_qubit_system();
    Bipartition bip = Bipartition::first_particle(system);
    CounterRng rng(29, 0);
    DensityMatrix rho = bell_state();
    double base = negativity(rho, system, bip).negativity;
    for (int trial = 0; trial < 10; ++trial) {
        double ph[2][2] = {{rng.uniform() * 6.28, rng.uniform() * 6.28},
                           {rng.uniform() * 6.28, rng.uniform() * 6.28}};
        DensityMatrix rotated = rho;
        for (std::size_t x = 0; x < 4; ++x)
            for (std::size_t y = 0; y < 4; ++y) {
                double tx = ph[0][system.site_of(x, 0)] + ph[1][system.site_of(x, 1)];
                double ty = ph[0][system.site_of(y, 0)] + ph[1][system.site_of(y, 1)];
                rotated(x, y) *= std::polar(1.0, tx - ty);
            }
        CHECK(std::abs(negativity(rotated, system, bip).negativity - base) < 1e-12);
    }
}

TEST_CASE("partial transpose handles mixed-radix systems and general bipartitions") {
    // 2 x 3 sites: d = 6
    Particle p1{1.0, {{0, 0, 0}, {1, 0, 0}}};
    Particle p2{1.0, {{5, 0, 0}, {6, 0, 0}, {7, 0, 0}}};
    ParticleSystem system({p1, p2}, 1.0);
    Bipartition bip = Bipartition::first_particle(system);
    CounterRng rng(41, 0);

    // random mixed state; PT spectrum must be real with trace preserved and
    // double application must return the input exactly
    ComplexMatrix g(6);
    for (auto& v : g.a) v = cplx{rng.gaussian(), rng.gaussian()};
    DensityMatrix rho(6);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) {
            cplx acc{0, 0};
            for (std::size_t k = 0; k < 6; ++k) acc += g(i, k) * std::conj(g(j, k));
            rho(i, j) = acc;
        }
    cplx tr = rho.m.trace();
    for (auto& v : rho.m.a) v /= tr;

    ComplexMatrix pt = partial_transpose(rho, system, bip);
    CHECK(std::abs(pt.trace() - rho.m.trace()) < 1e-14);
    DensityMatrix wrap(6);
    wrap.m = pt;
    ComplexMatrix back = partial_transpose(wrap, system, bip);
    for (std::size_t i = 0; i < 36; ++i) CHECK(back.a[i] == rho.m.a[i]);

    // a maximally-entangled qubit embedded in the 2 x 3 system: |00> + |11>
    DensityMatrix bell(6);
    std::size_t c00 = system.config_index({0, 0});
    std::size_t c11 = system.config_index({1, 1});
    bell(c00, c00) = bell(c11, c11) = cplx{0.5, 0.0};
    bell(c00, c11) = bell(c11, c00) = cplx{0.5, 0.0};
    CHECK(negativity(bell, system, bip).negativity == doctest::Approx(0.5).epsilon(1e-12));

    // three particles, left side {0, 2}
    Particle q{1.0, {{0, 0, 0}, {2, 0, 0}}};
    ParticleSystem three({q, q, q}, 1.0);
    Bipartition split{{0, 2}, {1}};
    split.validate(three);
    DensityMatrix prod = DensityMatrix::uniform_superposition(8);
    CHECK(negativity(prod, three, split).negativity < 1e-12);
}

TEST_CASE("first-order p and q equal the double-flip decay eigenvalues") {
    PhysicalConstants pc = PhysicalConstants::natural();
    for (double a : {0.5, 1.0}) {
        for (double d : {2.0, 3.0}) {
            for (double sl : {1.0, 4.0}) {
                BmvScenario sc = bmv_scenario(1.0, a, d, sl);
                GeneratorTables t = monitoring_tables(sc.system, Kernel::dp(2.0), pc);
                double dt = 0.01 / t.gamma.max_abs();
                FirstOrderPq pq = first_order_pq(1.0, a, d, sl, dt, pc);
                // p = -(dt/4) Gamma(00,11), q = -(dt/4) Gamma(01,10)
                CHECK(pq.p ==
                      doctest::Approx(-0.25 * dt * t.gamma(0, 3)).epsilon(1e-12));
                CHECK(pq.q ==
                      doctest::Approx(-0.25 * dt * t.gamma(1, 2)).epsilon(1e-12));
                CHECK(pq.n_large_sigma == doctest::Approx(pq.p).epsilon(1e-12));
                CHECK(pq.n_first_order ==
                      std::max(0.0, pq.p) + std::max(0.0, pq.q));
            }
        }
    }
}

TEST_CASE("coincident sites give vanishing p and q") {
    FirstOrderPq pq = first_order_pq(1.0, 1e-8, 3.0, 1.0, 1e-3, PhysicalConstants::natural());
    CHECK(std::abs(pq.p) < 1e-16);
    CHECK(std::abs(pq.q) < 1e-16);
}

TEST_CASE("q decays faster than p under a sigma sweep") {
    PhysicalConstants pc = PhysicalConstants::natural();
    double prev_ratio = 1e300;
    for (double sl : {2.0, 4.0, 8.0, 16.0, 32.0}) {
        FirstOrderPq pq = first_order_pq(1.0, 1.0, 3.0, sl, 1e-3, pc);
        double ratio = std::abs(pq.q) / std::abs(pq.p);
        CHECK(ratio < prev_ratio);
        prev_ratio = ratio;
    }
    CHECK(prev_ratio < 1e-2);
}

TEST_CASE("negativity of the short-time state matches the first-order formula") {
    PhysicalConstants pc = PhysicalConstants::natural();
    for (double sl : {1.0, 3.0}) {
        BmvScenario sc = bmv_scenario(1.0, 1.0, 3.0, sl);
        GeneratorTables t = monitoring_tables(sc.system, Kernel::dp(2.0), pc);
        Bipartition bip = Bipartition::first_particle(sc.system);
        double dt = 0.05 / t.gamma.max_abs();

        auto err = [&](double step) {
            FirstOrderPq pq = first_order_pq(1.0, 1.0, 3.0, sl, step, pc);
            DensityMatrix st = short_time_state(sc.rho0, t, step);
            return std::abs(negativity(st, sc.system, bip).negativity - pq.n_first_order);
        };
        double e1 = err(dt), e2 = err(dt / 2.0);
        if (e1 > 1e-13) CHECK(e2 / e1 < 0.45); // quadratic shrinkage
    }
}

TEST_CASE("first-order negativity rate agrees with the exact slope where positive") {
    // full DP generator in the phase-dominated window
    PhysicalConstants pc = PhysicalConstants::natural();
    BmvScenario sc = bmv_scenario(1.0, 0.5, 0.6, 5.0);
    GeneratorTables t = dp_full_generator(sc.system, pc);
    Bipartition bip = Bipartition::first_particle(sc.system);

    double rate = first_order_negativity_rate(sc.rho0, sc.system, t, bip);
    REQUIRE(rate > 0.0);
    double t0 = 1e-3 / t.gamma.max_abs();
    EvolutionResult evo = evolve_exact(sc.rho0, t, {t0});
    double slope = negativity(evo.states[0], sc.system, bip).negativity / t0;
    CHECK(slope == doctest::Approx(rate).epsilon(0.01));

    // monitoring-only: rate is zero and exact negativity stays zero
    GeneratorTables mon = monitoring_tables(sc.system, Kernel::dp(2.0), pc);
    CHECK(first_order_negativity_rate(sc.rho0, sc.system, mon, bip) == 0.0);
    EvolutionResult evo2 = evolve_exact(sc.rho0, mon, {10.0 / mon.gamma.max_abs()});
    CHECK(negativity(evo2.states[0], sc.system, bip).negativity < 1e-12);
}
