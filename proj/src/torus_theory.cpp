#include "fluct/torus_theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fluct {

namespace {
constexpr double kResonanceTol = 1e-9;
}

const TorusModeRow& TorusModeTable::row(int j) const {
    for (const auto& r : rows)
        if (r.j == j) return r;
    throw std::out_of_range("mode row index not in table");
}

TorusModeTable build_mode_table(const TorusKernel& kernel, double beta, int sign) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("beta must be positive and finite");
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("mode table sign must be +1 or -1");

    TorusModeTable table;
    table.beta = beta;
    table.sign = sign;
    const double scale = kernel.dim() == 1 ? kTwoPi : kTwoPi * kTwoPi;
    int j = 0;
    for (const auto& k : kernel.representatives()) {
        const double w = kernel.weight(k);
        if (w <= 0.0) continue;
        const double k2 = static_cast<double>(norm_sq(k));
        const double lambda = k2 / beta;
        const double c = w * k2 / scale;
        const double varY = w / scale;
        table.rows.push_back({++j, k, lambda, c, varY});
        table.rows.push_back({++j, k, lambda, c, varY});
    }
    return table;
}

double var_X(const TorusModeTable& table, int j, double t) {
    if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
    const TorusModeRow& r = table.row(j);
    if (table.sign < 0 &&
        std::abs(r.lambda - r.c) < kResonanceTol * std::max(r.lambda, r.c)) {
        return r.varY * (1.0 + 2.0 * r.lambda * t);
    }
    const double a = table.sign * r.c;
    const double rate = a + r.lambda;
    return r.varY * (1.0 + a / rate * std::expm1(-2.0 * rate * t));
}

FluctuationCurve total_fluctuation_curve(const TorusModeTable& table,
                                         const std::vector<double>& times,
                                         bool includePerMode) {
    if (times.empty()) throw std::invalid_argument("empty time grid");
    if (times.front() < 0.0) throw std::invalid_argument("times must start at t >= 0");
    if (!std::is_sorted(times.begin(), times.end()))
        throw std::invalid_argument("times must be increasing");

    FluctuationCurve curve;
    curve.times = times;
    curve.totals.resize(times.size(), 0.0);
    if (includePerMode)
        curve.perMode.assign(table.rows.size(), std::vector<double>(times.size()));
    for (std::size_t i = 0; i < times.size(); ++i) {
        double total = 0.0;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const double v = var_X(table, table.rows[r].j, times[i]);
            total += v;
            if (includePerMode) curve.perMode[r][i] = v;
        }
        curve.totals[i] = total;
    }
    return curve;
}

double longtime_limit(const TorusKernel& kernel, double beta) {
    const TorusModeTable table = build_mode_table(kernel, beta, +1);
    double sum = 0.0;
    for (const auto& r : table.rows) sum += r.varY / (1.0 + beta * r.varY);
    return sum;
}

double critical_beta(const TorusKernel& kernel) {
    double betaC = std::numeric_limits<double>::infinity();
    const double scale = kernel.dim() == 1 ? kTwoPi : kTwoPi * kTwoPi;
    for (const auto& k : kernel.representatives()) {
        const double w = kernel.weight(k);
        if (w > 0.0) betaC = std::min(betaC, scale / w);
    }
    return betaC;
}

double decay_rate_scan(double alpha, const std::vector<double>& betaGrid,
                       std::size_t modeCount) {
    if (alpha <= 1.0) throw std::invalid_argument("alpha must exceed 1");
    if (betaGrid.size() < 2)
        throw DegenerateGridError("beta grid needs at least two points");
    const auto [minIt, maxIt] = std::minmax_element(betaGrid.begin(), betaGrid.end());
    if (*minIt <= 0.0) throw std::invalid_argument("beta values must be positive");
    if (*maxIt == *minIt)
        throw DegenerateGridError("beta grid has no spread");
    if (*maxIt / *minIt < 1e3)
        throw DegenerateGridError("beta grid must span at least 3 decades");

    // Truncation guard: the discarded tail beyond modeCount must not bend
    // the fit at the largest beta.
    if (std::pow(static_cast<double>(modeCount), -alpha) * *maxIt >= 1e-2)
        throw InsufficientModesError("mode count too small for the largest beta");

    std::vector<double> coeff(modeCount);
    for (std::size_t j = 0; j < modeCount; ++j)
        coeff[j] = std::pow(static_cast<double>(j + 1), -alpha);

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (double beta : betaGrid) {
        double f = 0.0;
        for (std::size_t j = modeCount; j-- > 0;) // ascending magnitude
            f += coeff[j] / (1.0 + beta * coeff[j]);
        const double x = std::log(beta), y = std::log(f);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(betaGrid.size());
    const double denom = n * sxx - sx * sx;
    return (n * sxy - sx * sy) / denom;
}

} // namespace fluct
