#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fluct/torus_theory.hpp"

using namespace fluct;

namespace {
const TorusKernel kRef = one_plus_cos_kernel();
}

TEST_CASE("mode table values") {
    const TorusModeTable t1 = build_mode_table(kRef, 2.0, +1);
    REQUIRE(t1.rows.size() == 2);
    for (const auto& r : t1.rows) {
        CHECK(r.lambda == 0.5);
        CHECK(r.c == 0.5);
        CHECK(r.varY == 0.5);
        CHECK(r.k == Wavevector{1, 0});
    }

    const TorusKernel constant = torus_kernel_from_modes(1, {{{0, 0}, kTwoPi}});
    CHECK(build_mode_table(constant, 1.0, +1).rows.empty());

    const TorusModeTable t2 = build_mode_table(kRef, 4.0, -1);
    CHECK(t2.rows[0].lambda == 0.25);
    CHECK(t2.rows[0].c == 0.5);
    CHECK(t2.rows[0].varY == 0.5);
}

TEST_CASE("var_X closed forms") {
    const TorusModeTable sup = build_mode_table(kRef, 2.0, +1);
    // t -> infinity: varY * lambda/(C+lambda) = 0.25
    CHECK(var_X(sup, 1, 1e3) == doctest::Approx(0.25).epsilon(1e-12));

    // Resonant branch at beta = 2 (lambda = C): varY (1 + 2 lambda t).
    const TorusModeTable res = build_mode_table(kRef, 2.0, -1);
    CHECK(var_X(res, 1, 3.0) == doctest::Approx(2.0).epsilon(1e-14));

    // Supercritical branch at beta = 4: 0.5 (1 + 2(e^{t/2} - 1)).
    const TorusModeTable super = build_mode_table(kRef, 4.0, -1);
    CHECK(var_X(super, 1, 4.0) ==
          doctest::Approx(std::exp(2.0) - 0.5).epsilon(1e-13));

    // t = 0 returns varY exactly, both signs.
    CHECK(var_X(sup, 1, 0.0) == 0.5);
    CHECK(var_X(res, 2, 0.0) == 0.5);
    CHECK(var_X(super, 2, 0.0) == 0.5);
}

TEST_CASE("suppression and enhancement monotonicity") {
    const TorusModeTable sup = build_mode_table(kRef, 2.0, +1);
    const TorusModeTable enh = build_mode_table(kRef, 3.0, -1);
    double prevSup = var_X(sup, 1, 0.0);
    double prevEnh = var_X(enh, 1, 0.0);
    for (double t = 0.05; t <= 5.0; t += 0.05) {
        const double vs = var_X(sup, 1, t);
        const double ve = var_X(enh, 1, t);
        CHECK(vs < sup.row(1).varY);
        CHECK(vs <= prevSup + 1e-15);
        CHECK(ve >= enh.row(1).varY);
        CHECK(ve >= prevEnh - 1e-15);
        prevSup = vs;
        prevEnh = ve;
    }
}

TEST_CASE("resonant branch is the limit of the generic branch") {
    // lambda = C (1 + eps) with eps = 1e-8 stays on the generic branch and
    // must agree with the linear-growth formula to 1e-6 for t <= 10.
    const double eps = 1e-8;
    const double beta = 2.0 / (1.0 + eps);
    const TorusModeTable nearRes = build_mode_table(kRef, beta, -1);
    const TorusModeTable res = build_mode_table(kRef, 2.0, -1);
    CHECK(std::abs(nearRes.row(1).lambda - nearRes.row(1).c) >
          1e-9 * nearRes.row(1).c); // generic branch engaged
    for (double t : {0.1, 1.0, 5.0, 10.0}) {
        CHECK(std::abs(var_X(nearRes, 1, t) - var_X(res, 1, t)) <= 1e-6);
    }
}

TEST_CASE("total fluctuation curve") {
    const TorusModeTable sup = build_mode_table(kRef, 2.0, +1);
    const FluctuationCurve curve =
        total_fluctuation_curve(sup, {0.0, 5.0}, true);
    CHECK(curve.totals[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(curve.totals[1] ==
          doctest::Approx(0.5 + 0.5 * std::exp(-10.0)).epsilon(1e-14));
    REQUIRE(curve.perMode.size() == 2);
    CHECK(curve.perMode[0][0] == 0.5);

    const TorusModeTable res = build_mode_table(kRef, 2.0, -1);
    CHECK(total_fluctuation_curve(res, {3.0}).totals[0] ==
          doctest::Approx(4.0).epsilon(1e-14));

    CHECK_THROWS(total_fluctuation_curve(sup, {}));
    CHECK_THROWS(total_fluctuation_curve(sup, {2.0, 1.0}));
}

TEST_CASE("long-time limit") {
    CHECK(longtime_limit(kRef, 2.0) == 0.5);
    CHECK(longtime_limit(kRef, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    // Matches the curve at t = 1e3 to 1e-9 relative.
    const TorusModeTable sup = build_mode_table(kRef, 2.0, +1);
    const double tail = total_fluctuation_curve(sup, {1e3}).totals[0];
    CHECK(std::abs(tail - longtime_limit(kRef, 2.0)) <= 1e-9 * 0.5);

    // Decreasing toward zero with beta, dominated by 2/beta.
    double prev = std::numeric_limits<double>::infinity();
    for (double beta : {10.0, 1e2, 1e3, 1e4}) {
        const double lim = longtime_limit(kRef, beta);
        CHECK(lim < prev);
        CHECK(lim <= 2.0 / beta);
        prev = lim;
    }
}

TEST_CASE("initial level equals Phi(0) - Phi_0 for random kernels") {
    std::mt19937 gen(13);
    std::uniform_real_distribution<double> weight(0.0, 5.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<std::pair<Wavevector, double>> modes{{{0, 0}, weight(gen)}};
        const int kmax = 1 + static_cast<int>(gen() % 5);
        for (int k = 1; k <= kmax; ++k) modes.push_back({{k, 0}, weight(gen)});
        const TorusKernel kernel = torus_kernel_from_modes(1, modes);
        const TorusModeTable table = build_mode_table(kernel, 1.7, +1);
        const double level = total_fluctuation_curve(table, {0.0}).totals[0];
        const double expected =
            eval_kernel(kernel, 0.0) - phi_series_coeff(kernel, 0);
        CHECK(level == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("critical temperature") {
    CHECK(critical_beta(kRef) == 2.0);
    const TorusKernel constant = torus_kernel_from_modes(1, {{{0, 0}, kTwoPi}});
    CHECK(std::isinf(critical_beta(constant)));
    const TorusKernel multi = torus_kernel_from_modes(
        1, {{{0, 0}, kTwoPi}, {{1, 0}, M_PI}, {{2, 0}, 4.0 * M_PI}});
    CHECK(critical_beta(multi) == 0.5);
}

TEST_CASE("decay rate scan") {
    std::vector<double> grid;
    for (int i = 0; i <= 6; ++i) grid.push_back(std::pow(10.0, 2.0 + 0.5 * i));

    const double s2 = decay_rate_scan(2.0, grid, 200000);
    CHECK(s2 == doctest::Approx(-0.5).epsilon(0.06));

    CHECK_THROWS_AS(decay_rate_scan(2.0, {100.0, 100.0, 100.0}, 1000),
                    DegenerateGridError);
    CHECK_THROWS_AS(decay_rate_scan(2.0, {1.0, 2.0, 4.0}, 1000), DegenerateGridError);
    CHECK_THROWS_AS(decay_rate_scan(2.0, grid, 50), InsufficientModesError);
    CHECK_THROWS(decay_rate_scan(0.5, grid, 1000));
}
