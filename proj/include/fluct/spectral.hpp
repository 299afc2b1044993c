#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "fluct/common.hpp"
#include "fluct/kernels.hpp"

namespace fluct {

// Discretization of the Fokker-Planck generator A = -L for an equilibrium
// (U, beta),
//   A f = -(1/beta) e^{beta U} d/dx ( e^{-beta U} df/dx ),
// by conservative second-order finite differences in divergence form with
// face-centered weights e^{-beta U(x_{i+1/2})}. The operator is symmetrized
// by the sqrt(rho_*) similarity transform, so its matrix is symmetric and
// its spectrum nonnegative at the discrete level. Boundaries: periodic on
// the torus, zero-flux on the truncated line.
//
// All quadratures in this module use the uniform node weight h; this is the
// inner product under which the discrete operator is exactly self-adjoint.
// Confining potentials make the endpoint densities negligible, so the
// distinction from trapezoid weights is below solver tolerances.

struct ResolutionExceededError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotPSDError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GeneratorMatrix {
    Grid grid;
    double beta = 1.0;
    std::vector<double> rho;  // equilibrium density, sum rho*h = 1
    Eigen::MatrixXd matrix;   // symmetrized operator B = D^{1/2} A D^{-1/2}

    // A f on grid functions (through the similarity transform).
    std::vector<double> apply(const std::vector<double>& f) const;
    // <f, g>_{mu*} with uniform weights.
    double mu_inner(const std::vector<double>& f, const std::vector<double>& g) const;
};

// Face weights from averaged node values of U (second order).
GeneratorMatrix build_generator(const Grid& grid, const std::vector<double>& uNodes,
                                double beta);
// Face weights from U evaluated at midpoints (torus: n faces, face i between
// nodes i and i+1 mod n; line: n-1 faces).
GeneratorMatrix build_generator(const Grid& grid, const std::vector<double>& uNodes,
                                const std::vector<double>& uFaces, double beta);

struct SpectralModel {
    Grid grid;
    double beta = 1.0;
    int truncation = 0;            // J
    std::vector<double> rho;       // rho_* at nodes
    Eigen::VectorXd lambda;        // ascending, lambda_0 ~ 0
    Eigen::MatrixXd phi;           // gridSize x J, mu*-orthonormal, sign-fixed

    double mu_inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const;
};

// Lowest J eigenpairs of the generator. Eigenfunctions are orthonormal in
// L^2(mu*) and sign-fixed to be positive at their first nonvanishing node.
// Throws ResolutionExceededError when J > gridSize/4.
SpectralModel eigendecompose(const GeneratorMatrix& op, int j);

// c_j(omega) = int phi_j e^{i omega y} mu*(dy), j < J. On the torus omega
// must be an integer wavevector.
Eigen::VectorXcd coeff_c(const SpectralModel& model, double omega);

struct GMatrix {
    Eigen::MatrixXd g;     // J x J, symmetric PSD
    Eigen::MatrixXd sqrtG; // symmetric PSD square root
    Eigen::VectorXd rates; // lambda_j for Lambda(t)
};

// G_ij = int int Phi(y-y') phi_i(y) phi_j(y') mu*(dy) mu*(dy') by double
// quadrature; rates copied from the model; square root via g_sqrt.
GMatrix g_matrix(const SpectralModel& model, const TorusKernel& kernel);
GMatrix g_matrix(const SpectralModel& model, const LineKernel& kernel);

// The same matrix through the spectral route int c_i conj(c_j) nu(domega);
// agrees with the double quadrature to ~1e-6.
Eigen::MatrixXd g_matrix_via_coeffs(const SpectralModel& model, const TorusKernel& kernel);
Eigen::MatrixXd g_matrix_via_coeffs(const SpectralModel& model, const LineKernel& kernel);

// Symmetric PSD square root; eigenvalues in [-1e-10, 0) are clamped to 0,
// anything below -1e-8 raises NotPSDError.
Eigen::MatrixXd g_sqrt(const Eigen::MatrixXd& g);

// k(omega, omega', s) = beta sum_j lambda_j e^{-lambda_j s} conj(c_j(omega)) c_j(omega'),
// Hermitian in (omega, omega') by construction.
std::complex<double> kernel_k(const SpectralModel& model, double omega,
                              double omegaPrime, double s);

// Fluctuation coordinates tested on the eigenfunctions:
// Ytilde_j = (1/sqrt N) sum_i phi_j(X_i) - sqrt(N) <phi_j>_{mu*}
// (phi_j evaluated by linear interpolation on the grid).
std::vector<double> empirical_eigen_fluctuation(const SpectralModel& model,
                                                const std::vector<double>& positions);

} // namespace fluct
