#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fluct/rng.hpp"
#include "fluct/spectral.hpp"

namespace fluct {

// The fluctuation coordinates solve the Volterra system of the second kind
//   X(t) = Y(t) -+ int_0^t Gamma(t-s) X(s) ds,
//   Gamma(t) = beta G^{1/2} Lambda(t) G^{1/2},  (Lambda(t)v)_i = lambda_i e^{-lambda_i t} v_i,
// with "-" for W = +Phi and "+" for W = -Phi. Gamma is symmetric PSD at
// every t and of positive type, which drives the time-averaged comparison
// between X and the Ornstein-Uhlenbeck forcing Y.

struct StepBlowupError : std::runtime_error {
    StepBlowupError(long step, double norm);
    long step;
    double norm;
};
struct SeriesDivergingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VolterraProblem {
    GMatrix gMatrix;
    double beta = 1.0;
    int sign = +1; // +1: W = Phi, -1: W = -Phi
    double dt = 1e-3;
    long steps = 0;
    Eigen::MatrixXd forcing; // (steps+1) x J, rows are Y(t_n)

    void validate() const;
};

// Stationary forcing paths: Ytilde_0 = 0; for i >= 1, Ytilde_i is an exact
// stationary OU chain with rate lambda_i,
//   Ytilde_i(0) ~ N(0,1),
//   Ytilde_i(t+dt) = e^{-lambda_i dt} Ytilde_i(t) + sqrt(1 - e^{-2 lambda_i dt}) xi,
// and Y(t) = G^{1/2} Ytilde(t). Rows are time, columns modes.
Eigen::MatrixXd sample_Y_paths(const GMatrix& gMatrix, double dt, long steps,
                               RngStream& rng);

// Trapezoidal marching solution of the Volterra system. The t_n self-term is
// handled implicitly: (I +- (dt/2) Gamma(0)) X_n = rhs, factored once. The
// history convolution uses the exponential structure of Lambda, so the cost
// is O(J^2) per step with no stored kernel history. Global error O(dt^2).
// Throws StepBlowupError when ||X(t_n)|| exceeds 1e12.
Eigen::MatrixXd solve_volterra(const VolterraProblem& problem);

struct ResolventResult {
    std::vector<Eigen::MatrixXd> omega; // Omega(t_n) on the grid
    double defect = 0.0;                // max_n ||Omega - Gamma + Gamma*Omega||_inf
    int termsUsed = 0;
};

// Partial sums of the alternating convolution series
// Omega = sum_{j>=1} (-1)^{j-1} Gamma^{*j} (positive-definite case only),
// each power by trapezoidal convolution. Throws SeriesDivergingError when
// the partial-sum norms grow for 3 consecutive terms.
ResolventResult resolvent_series(const GMatrix& gMatrix, double beta, int sign,
                                 double dt, long steps, int nTerms);

// (1/T) int_0^T ||path(t)||^2 dt, trapezoidal. Rows are time samples.
double time_avg_norm(const Eigen::MatrixXd& path, double dt);

struct InequalityReport {
    bool holds = false;
    double margin = 0.0; // signed toward the theorem's direction
    bool weakInteraction = false;
    double timeAvgX = 0.0;
    double timeAvgY = 0.0;
};

// Theorem-style comparison of time averages: strict "<" for sign = +1,
// strict ">" for sign = -1 (meaningful under ||G|| <= 2/beta). Strictness
// uses margin > 1e-12 * max(averages); identically-zero input is reported
// as holds = false with margin 0.
InequalityReport check_timeavg_inequality(const VolterraProblem& problem,
                                          const Eigen::MatrixXd& x,
                                          const Eigen::MatrixXd& y);

// Operator norm of the symmetric PSD matrix G (largest eigenvalue).
double operator_norm(const GMatrix& gMatrix);

} // namespace fluct
