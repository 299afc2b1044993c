#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fluct/equilibrium.hpp"
#include "fluct/kernels.hpp"

using namespace fluct;

namespace {

const TorusKernel kRef = one_plus_cos_kernel();

PotentialFn zero_v() {
    return [](double) { return 0.0; };
}
PotentialFn quadratic_v() {
    return [](double x) { return 0.5 * x * x; };
}
KernelFn ref_w() {
    return [](double d) { return eval_kernel(kRef, d); };
}
KernelFn zero_w() {
    return [](double) { return 0.0; };
}
KernelFn gaussian_w() {
    return [](double d) { return std::exp(-0.5 * d * d); };
}

DensityGrid uniform_torus(std::size_t n) {
    DensityGrid rho;
    rho.grid = make_torus_grid(n);
    rho.values.assign(n, 1.0 / kTwoPi);
    return rho;
}

DensityGrid gaussian_line(std::size_t n, double halfWidth) {
    DensityGrid rho;
    rho.grid = make_line_grid(n, halfWidth);
    rho.values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        rho.values[i] = std::exp(-0.5 * rho.grid.x[i] * rho.grid.x[i]) /
                        std::sqrt(kTwoPi);
    rho.normalize();
    return rho;
}

} // namespace

TEST_CASE("free energy of reference measures") {
    const DensityGrid uniform = uniform_torus(256);
    const FreeEnergyReport torus = free_energy(uniform, zero_v(), ref_w(), 2.0);
    CHECK(torus.energy == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(2.0 * torus.entropyTerm ==
          doctest::Approx(-std::log(kTwoPi)).epsilon(1e-12));

    // W = 0, V = 0, beta = 1: F is the bare entropy.
    const FreeEnergyReport entropyOnly = free_energy(uniform, zero_v(), zero_w(), 1.0);
    CHECK(entropyOnly.energy == 0.0);
    CHECK(entropyOnly.total == entropyOnly.entropyTerm);

    const DensityGrid gauss = gaussian_line(1024, 8.0);
    const FreeEnergyReport line = free_energy(gauss, quadratic_v(), zero_w(), 1.0);
    CHECK(line.energy == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(line.entropyTerm ==
          doctest::Approx(-0.5 * std::log(kTwoPi * std::exp(1.0))).epsilon(1e-6));
}

TEST_CASE("uniform measure is the torus fixed point") {
    const Grid grid = make_torus_grid(256);
    const DensityGrid rho = solve_gibbs_fixed_point(zero_v(), ref_w(), 2.0, grid);
    for (double v : rho.values)
        CHECK(std::abs(v - 1.0 / kTwoPi) < 1e-12);
    CHECK(std::abs(rho.mass() - 1.0) < 1e-12);
}

TEST_CASE("pure external field recovers the Gibbs measure") {
    const Grid grid = make_line_grid(1024, 8.0);
    const DensityGrid rho =
        solve_gibbs_fixed_point(quadratic_v(), zero_w(), 1.0, grid, 0.5, 1e-12);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double expected =
            std::exp(-0.5 * grid.x[i] * grid.x[i]) / std::sqrt(kTwoPi);
        CHECK(std::abs(rho.values[i] - expected) < 1e-8);
    }
}

TEST_CASE("interacting Gibbs fixed point") {
    const Grid grid = make_line_grid(512, 8.0);
    const DensityGrid rho = solve_gibbs_fixed_point(quadratic_v(), gaussian_w(), 1.0,
                                                    grid, 0.5, 1e-10, 2000);

    // Residual check, recomputed independently of the solver internals.
    const std::vector<double> u = effective_potential(quadratic_v(), gaussian_w(), rho);
    double z = 0.0;
    std::vector<double> target(grid.size());
    const double uMin = *std::min_element(u.begin(), u.end());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        target[i] = std::exp(-(u[i] - uMin));
        z += target[i] * grid.weight(i);
    }
    double residual = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        residual = std::max(residual, std::abs(rho.values[i] - target[i] / z));
    CHECK(residual < 1e-8);

    // Positivity and the Gibbs identity rho ~ exp(-beta U) where rho is
    // appreciably supported.
    double minRho = rho.values[0], maxRatio = 0.0, minRatio = 1e300;
    const double peak = *std::max_element(rho.values.begin(), rho.values.end());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        minRho = std::min(minRho, rho.values[i]);
        if (rho.values[i] > 1e-8 * peak) {
            const double c = rho.values[i] * std::exp(u[i] - uMin);
            maxRatio = std::max(maxRatio, c);
            minRatio = std::min(minRatio, c);
        }
    }
    CHECK(minRho > 0.0);
    CHECK((maxRatio - minRatio) / maxRatio < 1e-6);
}

TEST_CASE("free energy descends along damped iterates") {
    const Grid grid = make_line_grid(512, 8.0);
    const double beta = 1.0;

    DensityGrid rho;
    rho.grid = grid;
    rho.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        rho.values[i] = std::exp(-0.5 * beta * grid.x[i] * grid.x[i]);
    rho.normalize();

    const std::vector<double> table = kernel_difference_table(gaussian_w(), grid);
    double prevF = free_energy(rho, quadratic_v(), gaussian_w(), beta).total;
    for (int iter = 0; iter < 40; ++iter) {
        const std::vector<double> u =
            effective_potential(quadratic_v(), gaussian_w(), rho);
        const double uMin = *std::min_element(u.begin(), u.end());
        std::vector<double> target(grid.size());
        double z = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            target[i] = std::exp(-beta * (u[i] - uMin));
            z += target[i] * grid.weight(i);
        }
        for (std::size_t i = 0; i < grid.size(); ++i)
            rho.values[i] = 0.5 * rho.values[i] + 0.5 * target[i] / z;
        rho.normalize();
        const double f = free_energy(rho, quadratic_v(), gaussian_w(), beta).total;
        CHECK(f <= prevF + 1e-10);
        prevF = f;
    }
    (void)table;
}

TEST_CASE("effective potential") {
    const DensityGrid uniform = uniform_torus(128);
    const std::vector<double> u = effective_potential(zero_v(), ref_w(), uniform);
    for (double v : u) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    const DensityGrid gauss = gaussian_line(256, 8.0);
    const std::vector<double> uq =
        effective_potential(quadratic_v(), zero_w(), gauss);
    for (std::size_t i = 0; i < gauss.grid.size(); ++i)
        CHECK(uq[i] == 0.5 * gauss.grid.x[i] * gauss.grid.x[i]);

    const TorusKernel constant = torus_kernel_from_modes(1, {{{0, 0}, kTwoPi}});
    const std::vector<double> uc = effective_potential(
        zero_v(), [&](double d) { return eval_kernel(constant, d); }, uniform);
    for (double v : uc) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nonconvergence is reported with the last residual") {
    const Grid grid = make_line_grid(128, 6.0);
    try {
        solve_gibbs_fixed_point(quadratic_v(), gaussian_w(), 1.0, grid, 0.5, 1e-12, 1);
        FAIL("expected NoConvergenceError");
    } catch (const NoConvergenceError& e) {
        CHECK(e.iterations == 1);
        CHECK(e.residual > 1e-12);
    }
}
