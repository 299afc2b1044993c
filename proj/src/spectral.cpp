#include "fluct/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "fluct/equilibrium.hpp"

namespace fluct {

namespace {

std::vector<double> density_from_potential(const std::vector<double>& u, double beta,
                                           double h) {
    const double uMin = *std::min_element(u.begin(), u.end());
    std::vector<double> rho(u.size());
    double z = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        rho[i] = std::exp(-beta * (u[i] - uMin));
        z += rho[i] * h;
    }
    for (double& r : rho) r /= z;
    return rho;
}

GeneratorMatrix assemble(const Grid& grid, const std::vector<double>& uNodes,
                         const std::vector<double>& uFaces, double beta) {
    const std::size_t n = grid.size();
    const double h = grid.spacing;
    const double inv = 1.0 / (beta * h * h);

    GeneratorMatrix op;
    op.grid = grid;
    op.beta = beta;
    op.rho = density_from_potential(uNodes, beta, h);
    op.matrix = Eigen::MatrixXd::Zero(n, n);

    const std::size_t faceCount = grid.domain == Domain::Torus ? n : n - 1;
    if (uFaces.size() != faceCount)
        throw std::invalid_argument("face potential count does not match the grid");

    for (std::size_t f = 0; f < faceCount; ++f) {
        const std::size_t i = f;
        const std::size_t j = (f + 1) % n;
        // Similarity-transformed conductance; exponents stay O(h^2 U'')
        // because the face value is compared against the node average.
        const double off = -inv * std::exp(beta * (0.5 * (uNodes[i] + uNodes[j]) - uFaces[f]));
        op.matrix(i, j) += off;
        op.matrix(j, i) += off;
        op.matrix(i, i) += inv * std::exp(beta * (uNodes[i] - uFaces[f]));
        op.matrix(j, j) += inv * std::exp(beta * (uNodes[j] - uFaces[f]));
    }
    return op;
}

} // namespace

GeneratorMatrix build_generator(const Grid& grid, const std::vector<double>& uNodes,
                                double beta) {
    if (uNodes.size() != grid.size())
        throw std::invalid_argument("potential values do not match the grid");
    const std::size_t faceCount = grid.domain == Domain::Torus ? grid.size() : grid.size() - 1;
    std::vector<double> uFaces(faceCount);
    for (std::size_t f = 0; f < faceCount; ++f)
        uFaces[f] = 0.5 * (uNodes[f] + uNodes[(f + 1) % grid.size()]);
    return assemble(grid, uNodes, uFaces, beta);
}

GeneratorMatrix build_generator(const Grid& grid, const std::vector<double>& uNodes,
                                const std::vector<double>& uFaces, double beta) {
    if (uNodes.size() != grid.size())
        throw std::invalid_argument("potential values do not match the grid");
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("beta must be positive and finite");
    return assemble(grid, uNodes, uFaces, beta);
}

std::vector<double> GeneratorMatrix::apply(const std::vector<double>& f) const {
    const std::size_t n = grid.size();
    if (f.size() != n) throw std::invalid_argument("grid function size mismatch");
    Eigen::VectorXd v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::sqrt(rho[i]) * f[i];
    const Eigen::VectorXd w = matrix * v;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = w[i] / std::sqrt(rho[i]);
    return out;
}

double GeneratorMatrix::mu_inner(const std::vector<double>& f,
                                 const std::vector<double>& g) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) acc += f[i] * g[i] * rho[i];
    return acc * grid.spacing;
}

double SpectralModel::mu_inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) acc += f[i] * g[i] * rho[i];
    return acc * grid.spacing;
}

SpectralModel eigendecompose(const GeneratorMatrix& op, int j) {
    const std::size_t n = op.grid.size();
    if (j < 1) throw std::invalid_argument("truncation must be at least 1");
    if (static_cast<std::size_t>(j) > n / 4)
        throw ResolutionExceededError("truncation exceeds gridSize/4");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.matrix);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("generator eigendecomposition failed");

    SpectralModel model;
    model.grid = op.grid;
    model.beta = op.beta;
    model.truncation = j;
    model.rho = op.rho;
    model.lambda = solver.eigenvalues().head(j);
    model.phi.resize(n, j);

    const double h = op.grid.spacing;
    for (int c = 0; c < j; ++c) {
        if (model.lambda[c] < -1e-10)
            throw NotPSDError("generator spectrum negative beyond tolerance");
        if (model.lambda[c] < 0.0) model.lambda[c] = 0.0;
        Eigen::VectorXd v = solver.eigenvectors().col(c);
        for (std::size_t i = 0; i < n; ++i)
            model.phi(i, c) = v[i] / std::sqrt(op.rho[i] * h);
        // Sign convention: positive at the first node where phi is nonzero.
        const double scale = model.phi.col(c).cwiseAbs().maxCoeff();
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(model.phi(i, c)) > 1e-8 * scale) {
                if (model.phi(i, c) < 0.0) model.phi.col(c) *= -1.0;
                break;
            }
        }
    }
    return model;
}

Eigen::VectorXcd coeff_c(const SpectralModel& model, double omega) {
    if (model.grid.domain == Domain::Torus &&
        std::abs(omega - std::round(omega)) > 1e-12)
        throw std::invalid_argument("torus wavevector must be an integer");
    const std::size_t n = model.grid.size();
    Eigen::VectorXcd c(model.truncation);
    for (int j = 0; j < model.truncation; ++j) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            const double phase = omega * model.grid.x[i];
            acc += model.phi(i, j) * model.rho[i] *
                   std::complex<double>(std::cos(phase), std::sin(phase));
        }
        c[j] = acc * model.grid.spacing;
    }
    return c;
}

namespace {

GMatrix g_matrix_from_difference(const SpectralModel& model, const KernelFn& phiDiff) {
    const std::size_t n = model.grid.size();
    const int j = model.truncation;
    const std::vector<double> table = kernel_difference_table(phiDiff, model.grid);

    Eigen::MatrixXd m(n, n);
    for (std::size_t a = 0; a < n; ++a) {
        const double* row = table.data() + (n - 1 + a);
        for (std::size_t b = 0; b < n; ++b)
            m(a, b) = row[-static_cast<std::ptrdiff_t>(b)];
    }

    Eigen::MatrixXd f(n, j);
    for (std::size_t a = 0; a < n; ++a)
        for (int c = 0; c < j; ++c)
            f(a, c) = model.phi(a, c) * model.rho[a] * model.grid.spacing;

    GMatrix out;
    out.g = f.transpose() * (m * f);
    out.g = 0.5 * (out.g + out.g.transpose()).eval();
    out.sqrtG = g_sqrt(out.g);
    out.rates = model.lambda;
    return out;
}

} // namespace

GMatrix g_matrix(const SpectralModel& model, const TorusKernel& kernel) {
    if (kernel.dim() != 1)
        throw std::invalid_argument("spectral G matrix supports 1-d kernels");
    if (model.grid.domain != Domain::Torus)
        throw std::invalid_argument("torus kernel on a non-torus grid");
    return g_matrix_from_difference(model,
                                    [&](double d) { return eval_kernel(kernel, d); });
}

GMatrix g_matrix(const SpectralModel& model, const LineKernel& kernel) {
    if (model.grid.domain != Domain::Line)
        throw std::invalid_argument("line kernel on a non-line grid");
    return g_matrix_from_difference(model, [&](double d) { return kernel(d); });
}

Eigen::MatrixXd g_matrix_via_coeffs(const SpectralModel& model, const TorusKernel& kernel) {
    const int j = model.truncation;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(j, j);
    for (const auto& [k, w] : kernel.modes()) {
        if (w == 0.0) continue;
        const Eigen::VectorXcd c = coeff_c(model, k[0]);
        const double nu = w / kTwoPi;
        for (int a = 0; a < j; ++a)
            for (int b = 0; b < j; ++b)
                g(a, b) += nu * (c[a] * std::conj(c[b])).real();
    }
    return g;
}

Eigen::MatrixXd g_matrix_via_coeffs(const SpectralModel& model, const LineKernel& kernel) {
    const int j = model.truncation;
    const auto& omega = kernel.omega_grid();
    const auto& density = kernel.spectral_density();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(j, j);
    for (std::size_t q = 0; q < omega.size(); ++q) {
        if (density[q] == 0.0) continue;
        const double trap = (q == 0 || q + 1 == omega.size()) ? 0.5 : 1.0;
        const double nu = trap * density[q] * kernel.omega_spacing() / kTwoPi;
        const Eigen::VectorXcd c = coeff_c(model, omega[q]);
        for (int a = 0; a < j; ++a)
            for (int b = 0; b < j; ++b)
                g(a, b) += nu * (c[a] * std::conj(c[b])).real();
    }
    return g;
}

Eigen::MatrixXd g_sqrt(const Eigen::MatrixXd& g) {
    if (g.rows() != g.cols()) throw std::invalid_argument("square matrix required");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed in g_sqrt");
    Eigen::VectorXd d = solver.eigenvalues();
    for (int i = 0; i < d.size(); ++i) {
        if (d[i] < -1e-8) throw NotPSDError("matrix eigenvalue below -1e-8");
        d[i] = d[i] > 0.0 ? std::sqrt(d[i]) : 0.0;
    }
    Eigen::MatrixXd root =
        solver.eigenvectors() * d.asDiagonal() * solver.eigenvectors().transpose();
    return 0.5 * (root + root.transpose());
}

std::complex<double> kernel_k(const SpectralModel& model, double omega,
                              double omegaPrime, double s) {
    if (s < 0.0) throw std::invalid_argument("s must be nonnegative");
    const Eigen::VectorXcd cw = coeff_c(model, omega);
    const Eigen::VectorXcd cwp = coeff_c(model, omegaPrime);
    std::complex<double> acc{0.0, 0.0};
    for (int j = 0; j < model.truncation; ++j)
        acc += model.lambda[j] * std::exp(-model.lambda[j] * s) * std::conj(cw[j]) * cwp[j];
    return model.beta * acc;
}

std::vector<double> empirical_eigen_fluctuation(const SpectralModel& model,
                                                const std::vector<double>& positions) {
    const std::size_t n = positions.size();
    if (n < 2) throw std::invalid_argument("need at least two particles");
    const std::size_t g = model.grid.size();
    const double x0 = model.grid.x.front();
    const double invH = 1.0 / model.grid.spacing;

    std::vector<double> out(model.truncation, 0.0);
    for (double x : positions) {
        double u = (x - x0) * invH;
        u = std::clamp(u, 0.0, static_cast<double>(g - 1));
        const std::size_t lo = std::min<std::size_t>(static_cast<std::size_t>(u), g - 2);
        const double frac = u - static_cast<double>(lo);
        for (int j = 0; j < model.truncation; ++j)
            out[j] += (1.0 - frac) * model.phi(lo, j) + frac * model.phi(lo + 1, j);
    }
    const double sqrtN = std::sqrt(static_cast<double>(n));
    for (int j = 0; j < model.truncation; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < g; ++i)
            mean += model.phi(i, j) * model.rho[i];
        mean *= model.grid.spacing;
        out[j] = out[j] / sqrtN - sqrtN * mean;
    }
    return out;
}

} // namespace fluct
