#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fluct/kernels.hpp"

using namespace fluct;

namespace {

TorusKernel ref_kernel() { return one_plus_cos_kernel(); }

// Random bandlimited kernel with nonnegative weights up to |k| <= kmax.
TorusKernel random_kernel(std::mt19937& gen, int kmax) {
    std::uniform_real_distribution<double> weight(0.0, 3.0);
    std::vector<std::pair<Wavevector, double>> modes;
    modes.push_back({{0, 0}, weight(gen)});
    for (int k = 1; k <= kmax; ++k) modes.push_back({{k, 0}, weight(gen)});
    return torus_kernel_from_modes(1, modes); // mirrors auto-filled
}

} // namespace

TEST_CASE("REF kernel construction and evaluation") {
    const TorusKernel ref = ref_kernel();
    CHECK(ref.dim() == 1);
    CHECK(ref.zero_weight() == doctest::Approx(kTwoPi).epsilon(1e-15));
    CHECK(ref.representatives().size() == 1);
    // Phi(x) = 1 + cos x
    CHECK(eval_kernel(ref, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(eval_kernel(ref, M_PI) == doctest::Approx(0.0).scale(1).epsilon(1e-14));
    CHECK(eval_kernel(ref, M_PI / 2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("constructor enforces Bochner positivity and symmetry") {
    CHECK_THROWS_AS(torus_kernel_from_modes(1, {{{1, 0}, -0.5}}), NegativeWeightError);
    CHECK_THROWS_AS(torus_kernel_from_modes(1, {{{1, 0}, 1.0}}, false),
                    AsymmetricModesError);
    CHECK_THROWS_AS(
        torus_kernel_from_modes(1, {{{1, 0}, 1.0}, {{-1, 0}, 2.0}}, false),
        AsymmetricModesError);
    CHECK_THROWS(torus_kernel_from_modes(1, {}));

    // Auto-symmetrization fills the mirror with the same weight.
    const TorusKernel k = torus_kernel_from_modes(1, {{{0, 0}, 1.0}, {{2, 0}, 0.5}});
    CHECK(k.weight({-2, 0}) == 0.5);

    // Constant kernel: Phi == 1.
    const TorusKernel c = torus_kernel_from_modes(1, {{{0, 0}, kTwoPi}});
    CHECK(c.representatives().empty());
    CHECK(eval_kernel(c, 1.234) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("phi_norm_sq examples") {
    const TorusKernel ref = ref_kernel();
    CHECK(phi_norm_sq(ref, ModeVector{}) == 0.0);

    ModeVector m;
    const double r = 1.0 / std::sqrt(2.0);
    m.set({1, 0}, {r, -r});
    m.set({-1, 0}, {r, r});
    m.set({0, 0}, 0.0);
    CHECK(m.is_conjugate_symmetric());
    CHECK(phi_norm_sq(ref, m) == doctest::Approx(1.0).epsilon(1e-14));

    const TorusKernel c = torus_kernel_from_modes(1, {{{0, 0}, kTwoPi}});
    ModeVector zeroMass;
    zeroMass.set({0, 0}, 0.0);
    CHECK(phi_norm_sq(c, zeroMass) == 0.0);
}

TEST_CASE("phi_series_coeff and mode ordering") {
    const TorusKernel ref = ref_kernel();
    CHECK(phi_series_coeff(ref, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(phi_series_coeff(ref, 1) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

    const TorusKernel c = torus_kernel_from_modes(1, {{{0, 0}, kTwoPi}});
    CHECK(phi_series_coeff(c, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(phi_series_coeff(c, 1), IndexOutOfSupportError);

    // Ordering by (|k|^2, lexicographic) over canonical representatives.
    const TorusKernel multi = torus_kernel_from_modes(
        1, {{{0, 0}, kTwoPi}, {{1, 0}, M_PI}, {{2, 0}, 4.0 * M_PI}});
    REQUIRE(multi.representatives().size() == 2);
    CHECK(multi.representatives()[0] == Wavevector{1, 0});
    CHECK(multi.representatives()[1] == Wavevector{2, 0});
    CHECK(phi_series_coeff(multi, 1) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(phi_series_coeff(multi, 2) ==
          doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));

    // Zero-weight mode under strict enumeration.
    const TorusKernel withZero =
        torus_kernel_from_modes(1, {{{0, 0}, 1.0}, {{1, 0}, 0.0}});
    CHECK(phi_series_coeff(withZero, 1) == 0.0);
    CHECK_THROWS_AS(phi_series_coeff(withZero, 1, true), IndexOutOfSupportError);
}

TEST_CASE("positive semi-definiteness at sample points") {
    std::mt19937 gen(42);
    std::uniform_real_distribution<double> point(0.0, kTwoPi);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    for (int rep = 0; rep < 50; ++rep) {
        const TorusKernel kernel = random_kernel(gen, 4);
        const int m = 2 + static_cast<int>(gen() % 7);
        std::vector<double> x(m), c(m);
        for (int i = 0; i < m; ++i) {
            x[i] = point(gen);
            c[i] = coeff(gen);
        }
        double quad = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                quad += c[i] * c[j] * eval_kernel(kernel, x[i] - x[j]);
        CHECK(quad >= -1e-10);
    }
}

TEST_CASE("Parseval consistency for discrete signed measures") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> point(0.0, kTwoPi);
    std::uniform_real_distribution<double> strength(-1.5, 1.5);
    for (int rep = 0; rep < 50; ++rep) {
        const TorusKernel kernel = random_kernel(gen, 3);
        const int m = 1 + static_cast<int>(gen() % 8);
        std::vector<double> x(m), s(m);
        for (int i = 0; i < m; ++i) {
            x[i] = point(gen);
            s[i] = strength(gen);
        }
        // Fourier data of sum_i s_i delta_{x_i}.
        ModeVector modes;
        for (const auto& [k, w] : kernel.modes()) {
            std::complex<double> f{0.0, 0.0};
            for (int i = 0; i < m; ++i)
                f += s[i] * std::complex<double>(std::cos(k[0] * x[i]),
                                                 -std::sin(k[0] * x[i]));
            modes.set(k, f);
        }
        double direct = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                direct += s[i] * s[j] * eval_kernel(kernel, x[i] - x[j]);
        const double viaModes = phi_norm_sq(kernel, modes);
        CHECK(viaModes == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("kernel peaks at the origin") {
    std::mt19937 gen(11);
    const TorusKernel kernel = random_kernel(gen, 5);
    const double peak = eval_kernel(kernel, 0.0);
    for (int i = 0; i < 64; ++i) {
        const double x = kTwoPi * (i + 0.5) / 64.0;
        CHECK(peak >= eval_kernel(kernel, x) - 1e-12);
    }
}

TEST_CASE("line kernel validation") {
    const LineKernel g = gaussian_line_kernel();
    CHECK(g(0.0) == 1.0);
    CHECK(g(1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));

    // Spectral density inconsistent with the evaluator fails the spot check.
    std::vector<double> omega(401), density(401);
    for (std::size_t i = 0; i < omega.size(); ++i) {
        omega[i] = -10.0 + 20.0 * i / 400.0;
        density[i] = 1.0;
    }
    CHECK_THROWS_AS(LineKernel([](double x) { return std::exp(-x * x / 2); }, omega,
                               density),
                    std::invalid_argument);

    density.assign(omega.size(), -1.0);
    CHECK_THROWS_AS(LineKernel([](double x) { return std::exp(-x * x / 2); }, omega,
                               density),
                    NegativeWeightError);
}
