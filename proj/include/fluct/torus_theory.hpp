#pragma once

#include <vector>

#include "fluct/kernels.hpp"

namespace fluct {

// Closed-form fluctuation statistics for the space-homogeneous torus system
// (V = 0, uniform equilibrium). Modes k with Phi_hat(k) > 0, k != 0 each
// contribute a sin/cos row pair (j = 2n-1, 2n) with
//   lambda_j = |k|^2 / beta        relaxation rate of the mode
//   C_j      = Phi_hat(k) |k|^2 / (2pi)^d
//   E|Y_j|^2 = Phi_hat(k) / (2pi)^d   (stationary Monte Carlo level)
// and the interacting variance follows the exact exponential formulas of
// var_X below. The k = 0 row is absent: its forcing variance vanishes, so
// X_0 = Y_0 = 0 identically.

struct TorusModeRow {
    int j;         // 1-based row index; rows (2n-1, 2n) form a pair
    Wavevector k;  // canonical wavevector of the pair
    double lambda; // relaxation rate
    double c;      // interaction rate C_j
    double varY;   // E|Y_j|^2
};

struct TorusModeTable {
    double beta = 1.0;
    int sign = +1; // +1 for W = Phi, -1 for W = -Phi
    std::vector<TorusModeRow> rows;

    const TorusModeRow& row(int j) const;
};

struct FluctuationCurve {
    std::vector<double> times;
    std::vector<double> totals;             // E ||eta_t||_Phi^2
    std::vector<std::vector<double>> perMode; // optional, one curve per row
};

struct InsufficientModesError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DegenerateGridError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

TorusModeTable build_mode_table(const TorusKernel& kernel, double beta, int sign);

// E|X_j(t)|^2, exact. Generic branch:
//   varY (1 + a/(a+lambda) (e^{-2(a+lambda)t} - 1)),  a = sign * C_j.
// Resonant branch (sign = -1, C_j = lambda_j up to 1e-9 relative):
//   varY (1 + 2 lambda t).
double var_X(const TorusModeTable& table, int j, double t);

FluctuationCurve total_fluctuation_curve(const TorusModeTable& table,
                                         const std::vector<double>& times,
                                         bool includePerMode = false);

// lim_{t->inf} E||eta_t||_Phi^2 for W = +Phi:
//   sum_j varY_j / (1 + beta varY_j).
double longtime_limit(const TorusKernel& kernel, double beta);

// beta_c = min over contributing modes of sqrt(2)/Phi_{2n} = (2pi)^d/Phi_hat(k);
// +infinity when no k != 0 mode has positive weight.
double critical_beta(const TorusKernel& kernel);

// Log-log slope of sum_{j<=modeCount} j^-alpha / (1 + beta j^-alpha) against
// beta, fitted by least squares over betaGrid. For Phi_{2n} ~ n^-alpha the
// limit scales like beta^{-(alpha-1)/alpha}.
double decay_rate_scan(double alpha, const std::vector<double>& betaGrid,
                       std::size_t modeCount);

} // namespace fluct
