#pragma once

#include <functional>
#include <vector>

#include "fluct/common.hpp"

namespace fluct {

// Thermal equilibrium as the self-consistent Gibbs fixed point
//   rho_*(x) = Z^{-1} exp(-beta (V + W*rho_*)(x)),
// the stationary density of the nonlinear Fokker-Planck flow and the
// minimizer of the free energy F = E + H/beta.

using PotentialFn = std::function<double(double)>; // V(x)
using KernelFn = std::function<double(double)>;    // W evaluated at a difference

struct DensityGrid {
    Grid grid;
    std::vector<double> values; // rho >= 0, sum rho*weight = 1 within 1e-12

    double mass() const;
    void normalize();
};

struct FreeEnergyReport {
    double energy = 0.0;      // E(mu)
    double entropyTerm = 0.0; // H(mu)/beta
    double total = 0.0;       // F(mu)
};

struct NoConvergenceError : std::runtime_error {
    NoConvergenceError(int iterations, double residual);
    int iterations;
    double residual;
};

// Quadrature values of the three free-energy terms (trapezoidal; the
// convolution uses the kernel difference table of the uniform grid).
FreeEnergyReport free_energy(const DensityGrid& rho, const PotentialFn& v,
                             const KernelFn& w, double beta);

// Damped fixed-point iteration rho <- (1-damping) rho + damping Z^{-1}e^{-beta(V+W*rho)}.
// Returns once the sup-norm fixed-point residual of the current iterate
// drops below tol; throws NoConvergenceError otherwise.
DensityGrid solve_gibbs_fixed_point(const PotentialFn& v, const KernelFn& w,
                                    double beta, const Grid& grid,
                                    double damping = 0.5, double tol = 1e-10,
                                    int maxIter = 2000);

// U = V + W*rho on the grid.
std::vector<double> effective_potential(const PotentialFn& v, const KernelFn& w,
                                        const DensityGrid& rhoStar);

// W(x_i - x_j) depends only on i-j on a uniform grid; table index i-j+(n-1).
// Torus grids wrap the difference.
std::vector<double> kernel_difference_table(const KernelFn& w, const Grid& grid);

} // namespace fluct
