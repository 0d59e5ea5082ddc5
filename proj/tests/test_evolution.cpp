#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "collapse/bmv.hpp"
#include "collapse/errors.hpp"
#include "collapse/evolution.hpp"

using namespace collapse;

namespace {

GeneratorTables bmv_tables(bool full = false) {
    BmvScenario sc = bmv_scenario(1.0, 1.0, 3.0, 1.0);
    PhysicalConstants pc = PhysicalConstants::natural();
    return full ? dp_full_generator(sc.system, pc)
                : monitoring_tables(sc.system, Kernel::dp(2.0), pc);
}

} // namespace

TEST_CASE("exact evolution at t = 0 returns the initial state unchanged") {
    BmvScenario sc = bmv_scenario(1.0, 1.0, 3.0, 1.0);
    GeneratorTables t = bmv_tables();
    EvolutionResult evo = evolve_exact(sc.rho0, t, {0.0, 1.0});
    for (std::size_t i = 0; i < 16; ++i) CHECK(evo.states[0].m.a[i] == sc.rho0.m.a[i]);
}

TEST_CASE("dephasing preserves populations") {
    BmvScenario sc = bmv_scenario(1.0, 1.0, 3.0, 1.0);
    GeneratorTables t = bmv_tables(true);
    EvolutionResult evo = evolve_exact(sc.rho0, t, {0.5, 2.0, 10.0, 50.0});
    for (const DensityMatrix& rho : evo.states) {
        validate_density_matrix(rho);
        for (std::size_t x = 0; x < 4; ++x)
            CHECK(rho(x, x) == sc.rho0(x, x));
    }
}

TEST_CASE("short-time bracket reproduces the first-order matrix-element decay") {
    // halving dt must quarter the residual against [1 - Gamma dt] rho(0)
    BmvScenario sc = bmv_scenario(1.0, 1.0, 3.0, 1.0);
    GeneratorTables t = bmv_tables();
    double gmax = t.gamma.max_abs();

    auto residual = [&](double dt) {
        EvolutionResult evo = evolve_exact(sc.rho0, t, {dt});
        double worst = 0.0;
        for (std::size_t x = 0; x < 4; ++x)
            for (std::size_t y = 0; y < 4; ++y) {
                cplx bracket = (1.0 - t.gamma(x, y) * dt) * sc.rho0(x, y);
                worst = std::max(worst, std::abs(evo.states[0](x, y) - bracket));
            }
        return worst;
    };
    double dt = 0.05 / gmax;
    double r1 = residual(dt);
    double r2 = residual(dt / 2.0);
    CHECK(r1 > 0.0);
    CHECK(r2 / r1 == doctest::Approx(0.25).epsilon(0.08));
}

TEST_CASE("rk4 matches the exact solution") {
    BmvScenario sc = bmv_scenario(1.0, 1.0, 3.0, 1.0);
    GeneratorTables t = bmv_tables(true);
    double gmax = t.gamma.max_abs();
    double rate = std::max(gmax, t.theta.max_abs());

    std::vector<double> times;
    for (int i = 1; i <= 5; ++i) times.push_back(static_cast<double>(i) / gmax);
    EvolutionResult exact = evolve_exact(sc.rho0, t, times);
    EvolutionResult rk4 = evolve_rk4(sc.rho0, t, times, 0.005 / rate);

    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(exact.states[i].m.max_abs_diff(rk4.states[i].m) < 1e-8);
        CHECK(std::abs(rk4.states[i].m.trace() - cplx{1.0, 0.0}) < 1e-12);
    }
}

TEST_CASE("rk4 shows fourth-order convergence") {
    BmvScenario sc = bmv_scenario(1.0, 1.0, 3.0, 1.0);
    GeneratorTables t = bmv_tables(true);
    double rate = std::max(t.gamma.max_abs(), t.theta.max_abs());
    std::vector<double> times{1.0 / rate};

    EvolutionResult exact = evolve_exact(sc.rho0, t, times);
    double e1 = exact.states[0].m.max_abs_diff(
        evolve_rk4(sc.rho0, t, times, 0.01 / rate).states[0].m);
    double e2 = exact.states[0].m.max_abs_diff(
        evolve_rk4(sc.rho0, t, times, 0.005 / rate).states[0].m);
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
}

TEST_CASE("rk4 rejects oversized steps") {
    BmvScenario sc = bmv_scenario(1.0, 1.0, 3.0, 1.0);
    GeneratorTables t = bmv_tables();
    double gmax = t.gamma.max_abs();
    CHECK_THROWS_AS(evolve_rk4(sc.rho0, t, {1.0}, 0.05 / gmax), ValidationError);
    CHECK_THROWS_AS(evolve_rk4(sc.rho0, t, {1.0}, 0.0), ValidationError);
}

TEST_CASE("short-time state properties") {
    BmvScenario sc = bmv_scenario(1.0, 1.0, 3.0, 1.0);
    GeneratorTables t = bmv_tables(true);
    double gmax = t.gamma.max_abs();

    SUBCASE("dt = 0 is the identity") {
        DensityMatrix s = short_time_state(sc.rho0, t, 0.0);
        for (std::size_t i = 0; i < 16; ++i) CHECK(s.m.a[i] == sc.rho0.m.a[i]);
    }

    SUBCASE("Richardson: residual against exact is quadratic in dt") {
        auto err = [&](double dt) {
            DensityMatrix s = short_time_state(sc.rho0, t, dt);
            EvolutionResult exact = evolve_exact(sc.rho0, t, {dt});
            return s.m.max_abs_diff(exact.states[0].m);
        };
        double dt = 0.05 / gmax;
        CHECK(err(dt / 2.0) / err(dt) == doctest::Approx(0.25).epsilon(0.08));
    }

    SUBCASE("Hermiticity is exact") {
        DensityMatrix s = short_time_state(sc.rho0, t, 0.05 / gmax);
        for (std::size_t x = 0; x < 4; ++x)
            for (std::size_t y = 0; y < 4; ++y)
                CHECK(s(x, y) == std::conj(s(y, x)));
    }

    SUBCASE("precondition enforced") {
        CHECK_THROWS_AS(short_time_state(sc.rho0, t, 0.2 / gmax), ValidationError);
    }
}

TEST_CASE("positivity holds along the evolution") {
    BmvScenario sc = bmv_scenario(1.0, 1.0, 3.0, 1.0);
    for (bool full : {false, true}) {
        GeneratorTables t = bmv_tables(full);
        double gmax = t.gamma.max_abs();
        std::vector<double> times;
        for (int i = 1; i <= 20; ++i) times.push_back(0.5 * i / gmax);
        EvolutionResult evo = evolve_exact(sc.rho0, t, times);
        for (const DensityMatrix& rho : evo.states) validate_density_matrix(rho);
    }
}

TEST_CASE("time grid validation") {
    BmvScenario sc = bmv_scenario(1.0, 1.0, 3.0, 1.0);
    GeneratorTables t = bmv_tables();
    CHECK_THROWS_AS(evolve_exact(sc.rho0, t, {}), ValidationError);
    CHECK_THROWS_AS(evolve_exact(sc.rho0, t, {1.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(evolve_exact(sc.rho0, t, {2.0, 1.0}), ValidationError);
    DensityMatrix wrong = DensityMatrix::uniform_superposition(2);
    CHECK_THROWS_AS(evolve_exact(wrong, t, {1.0}), ValidationError);
}
