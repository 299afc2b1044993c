#include "fluct/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fluct {

namespace {

std::vector<double> convolve(const std::vector<double>& table, const Grid& grid,
                             const std::vector<double>& rho) {
    const std::size_t n = grid.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = table.data() + (n - 1 + i); // table[row - j] = W(x_i - x_j)
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            acc += row[-static_cast<std::ptrdiff_t>(j)] * rho[j] * grid.weight(j);
        out[i] = acc;
    }
    return out;
}

} // namespace

double DensityGrid::mass() const {
    double m = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * grid.weight(i);
    return m;
}

void DensityGrid::normalize() {
    const double m = mass();
    if (!(m > 0.0)) throw std::invalid_argument("density has nonpositive mass");
    for (double& v : values) v /= m;
}

NoConvergenceError::NoConvergenceError(int iterations_, double residual_)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "Gibbs fixed point did not converge after " << iterations_
             << " iterations (residual " << residual_ << ")";
          return os.str();
      }()),
      iterations(iterations_),
      residual(residual_) {}

std::vector<double> kernel_difference_table(const KernelFn& w, const Grid& grid) {
    const std::size_t n = grid.size();
    std::vector<double> table(2 * n - 1);
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
        const double diff =
            (static_cast<double>(idx) - static_cast<double>(n - 1)) * grid.spacing;
        table[idx] = grid.domain == Domain::Torus
                         ? w(torus_difference(diff, 0.0))
                         : w(diff);
    }
    return table;
}

FreeEnergyReport free_energy(const DensityGrid& rho, const PotentialFn& v,
                             const KernelFn& w, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    const Grid& grid = rho.grid;
    const std::vector<double> table = kernel_difference_table(w, grid);
    const std::vector<double> wStarRho = convolve(table, grid, rho.values);

    double interaction = 0.0, external = 0.0, entropy = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double wi = grid.weight(i);
        const double r = rho.values[i];
        interaction += 0.5 * wStarRho[i] * r * wi;
        external += v(grid.x[i]) * r * wi;
        if (r > 0.0) entropy += r * std::log(r) * wi;
    }
    FreeEnergyReport report;
    report.energy = interaction + external;
    report.entropyTerm = entropy / beta;
    report.total = report.energy + report.entropyTerm;
    return report;
}

DensityGrid solve_gibbs_fixed_point(const PotentialFn& v, const KernelFn& w,
                                    double beta, const Grid& grid, double damping,
                                    double tol, int maxIter) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("beta must be positive and finite");
    if (!(damping > 0.0 && damping <= 1.0))
        throw std::invalid_argument("damping must lie in (0, 1]");

    const std::size_t n = grid.size();
    const std::vector<double> table = kernel_difference_table(w, grid);

    // Start from the pure external-field Gibbs measure.
    DensityGrid rho;
    rho.grid = grid;
    rho.values.resize(n);
    std::vector<double> vGrid(n);
    double vMin = v(grid.x[0]);
    for (std::size_t i = 0; i < n; ++i) {
        vGrid[i] = v(grid.x[i]);
        vMin = std::min(vMin, vGrid[i]);
    }
    for (std::size_t i = 0; i < n; ++i)
        rho.values[i] = std::exp(-beta * (vGrid[i] - vMin));
    rho.normalize();

    std::vector<double> target(n);
    double residual = 0.0;
    for (int iter = 0; iter < maxIter; ++iter) {
        const std::vector<double> wStarRho = convolve(table, grid, rho.values);
        double uMin = vGrid[0] + wStarRho[0];
        for (std::size_t i = 0; i < n; ++i)
            uMin = std::min(uMin, vGrid[i] + wStarRho[i]);
        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            target[i] = std::exp(-beta * (vGrid[i] + wStarRho[i] - uMin));
            z += target[i] * grid.weight(i);
        }
        residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            target[i] /= z;
            residual = std::max(residual, std::abs(rho.values[i] - target[i]));
        }
        if (residual < tol) return rho;
        for (std::size_t i = 0; i < n; ++i)
            rho.values[i] = (1.0 - damping) * rho.values[i] + damping * target[i];
        rho.normalize();
    }
    throw NoConvergenceError(maxIter, residual);
}

std::vector<double> effective_potential(const PotentialFn& v, const KernelFn& w,
                                        const DensityGrid& rhoStar) {
    const Grid& grid = rhoStar.grid;
    const std::vector<double> table = kernel_difference_table(w, grid);
    std::vector<double> u = convolve(table, grid, rhoStar.values);
    for (std::size_t i = 0; i < grid.size(); ++i) u[i] += v(grid.x[i]);
    return u;
}

} // namespace fluct
