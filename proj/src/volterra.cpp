#include "fluct/volterra.hpp"

#include <cmath>
#include <sstream>

namespace fluct {

namespace {
constexpr double kBlowupGuard = 1e12;
}

StepBlowupError::StepBlowupError(long step_, double norm_)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "Volterra solution exceeded the overflow guard at step " << step_
             << " (||X|| = " << norm_ << ")";
          return os.str();
      }()),
      step(step_),
      norm(norm_) {}

void VolterraProblem::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (steps < 1) throw std::invalid_argument("need at least one step");
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("sign must be +1 or -1");
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("beta must be positive and finite");
    if (forcing.rows() != steps + 1 || forcing.cols() != gMatrix.rates.size())
        throw std::invalid_argument("forcing shape must be (steps+1) x J");
}

Eigen::MatrixXd sample_Y_paths(const GMatrix& gMatrix, double dt, long steps,
                               RngStream& rng) {
    if (!(dt > 0.0) || steps < 1)
        throw std::invalid_argument("invalid path grid");
    const Eigen::Index j = gMatrix.rates.size();
    Eigen::MatrixXd ytilde(steps + 1, j);

    ytilde.col(0).setZero(); // zero mode carries no fluctuation
    for (Eigen::Index m = 1; m < j; ++m) {
        const double decay = std::exp(-gMatrix.rates[m] * dt);
        const double kick = std::sqrt(1.0 - decay * decay);
        double v = rng.next_normal();
        ytilde(0, m) = v;
        for (long n = 1; n <= steps; ++n) {
            v = decay * v + kick * rng.next_normal();
            ytilde(n, m) = v;
        }
    }
    return ytilde * gMatrix.sqrtG; // row-wise Y = G^{1/2} Ytilde
}

Eigen::MatrixXd solve_volterra(const VolterraProblem& problem) {
    problem.validate();
    const Eigen::Index j = problem.gMatrix.rates.size();
    const double dt = problem.dt;
    const double sgn = static_cast<double>(problem.sign);
    const Eigen::MatrixXd& sqrtG = problem.gMatrix.sqrtG;
    const Eigen::VectorXd& rates = problem.gMatrix.rates;

    // Gamma(0) = beta G^{1/2} diag(lambda) G^{1/2}.
    const Eigen::MatrixXd gamma0 =
        problem.beta * sqrtG * rates.asDiagonal() * sqrtG;
    const Eigen::MatrixXd lhs =
        Eigen::MatrixXd::Identity(j, j) + sgn * 0.5 * dt * gamma0;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);

    const Eigen::VectorXd decay = (-rates.array() * dt).exp().matrix();

    Eigen::MatrixXd x(problem.steps + 1, j);
    x.row(0) = problem.forcing.row(0);

    // history(t_n) = sum_{m<=n-1} w_m e^{-lambda (t_n - t_m)} (G^{1/2} X_m),
    // advanced by one decay multiply per step (w_0 = 1/2, interior w = 1).
    Eigen::VectorXd history =
        decay.cwiseProduct(0.5 * (sqrtG * x.row(0).transpose()));

    for (long n = 1; n <= problem.steps; ++n) {
        const Eigen::VectorXd conv =
            problem.beta * (sqrtG * rates.cwiseProduct(history));
        const Eigen::VectorXd rhs =
            problem.forcing.row(n).transpose() - sgn * dt * conv;
        const Eigen::VectorXd xn = lu.solve(rhs);
        const double norm = xn.norm();
        if (!(norm < kBlowupGuard)) throw StepBlowupError(n, norm);
        x.row(n) = xn.transpose();
        if (n < problem.steps)
            history = decay.cwiseProduct(history + sqrtG * xn);
    }
    return x;
}

ResolventResult resolvent_series(const GMatrix& gMatrix, double beta, int sign,
                                 double dt, long steps, int nTerms) {
    if (sign != +1)
        throw std::invalid_argument("the alternating resolvent series needs sign = +1");
    if (nTerms < 1) throw std::invalid_argument("need at least one series term");
    if (!(dt > 0.0) || steps < 1) throw std::invalid_argument("invalid grid");

    const Eigen::Index j = gMatrix.rates.size();
    const std::size_t n = static_cast<std::size_t>(steps) + 1;

    std::vector<Eigen::MatrixXd> gamma(n);
    for (std::size_t m = 0; m < n; ++m) {
        const Eigen::VectorXd lam =
            gMatrix.rates.cwiseProduct((-gMatrix.rates.array() * (m * dt)).exp().matrix());
        gamma[m] = beta * gMatrix.sqrtG * lam.asDiagonal() * gMatrix.sqrtG;
    }

    auto convolve = [&](const std::vector<Eigen::MatrixXd>& a,
                        const std::vector<Eigen::MatrixXd>& b) {
        std::vector<Eigen::MatrixXd> out(n, Eigen::MatrixXd::Zero(j, j));
        for (std::size_t k = 1; k < n; ++k) {
            Eigen::MatrixXd acc = 0.5 * (a[0] * b[k] + a[k] * b[0]);
            for (std::size_t m = 1; m < k; ++m) acc += a[m] * b[k - m];
            out[k] = dt * acc;
        }
        return out;
    };
    auto supNorm = [&](const std::vector<Eigen::MatrixXd>& a) {
        double v = 0.0;
        for (const auto& m : a) v = std::max(v, m.cwiseAbs().maxCoeff());
        return v;
    };

    ResolventResult result;
    result.omega = gamma;
    std::vector<Eigen::MatrixXd> term = gamma;
    int growthRun = 0;
    double prevNorm = supNorm(result.omega);
    for (int t = 2; t <= nTerms; ++t) {
        term = convolve(term, gamma);
        const double s = (t % 2 == 0) ? -1.0 : 1.0;
        for (std::size_t m = 0; m < n; ++m) result.omega[m] += s * term[m];
        const double norm = supNorm(result.omega);
        growthRun = norm > prevNorm ? growthRun + 1 : 0;
        if (growthRun >= 3)
            throw SeriesDivergingError("resolvent partial sums grew for 3 consecutive terms");
        prevNorm = norm;
        result.termsUsed = t;
    }

    const std::vector<Eigen::MatrixXd> check = convolve(gamma, result.omega);
    for (std::size_t m = 0; m < n; ++m) {
        const double d = (result.omega[m] - gamma[m] + check[m]).cwiseAbs().maxCoeff();
        result.defect = std::max(result.defect, d);
    }
    return result;
}

double time_avg_norm(const Eigen::MatrixXd& path, double dt) {
    if (path.rows() < 2) throw std::invalid_argument("path needs at least two samples");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    double acc = 0.5 * (path.row(0).squaredNorm() + path.row(path.rows() - 1).squaredNorm());
    for (Eigen::Index r = 1; r + 1 < path.rows(); ++r) acc += path.row(r).squaredNorm();
    const double horizon = dt * static_cast<double>(path.rows() - 1);
    return acc * dt / horizon;
}

InequalityReport check_timeavg_inequality(const VolterraProblem& problem,
                                          const Eigen::MatrixXd& x,
                                          const Eigen::MatrixXd& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw std::invalid_argument("X and Y must share the grid");
    InequalityReport report;
    report.timeAvgX = time_avg_norm(x, problem.dt);
    report.timeAvgY = time_avg_norm(y, problem.dt);
    report.weakInteraction =
        operator_norm(problem.gMatrix) <= 2.0 / problem.beta + 1e-12;
    report.margin = problem.sign > 0 ? report.timeAvgY - report.timeAvgX
                                     : report.timeAvgX - report.timeAvgY;
    const double scale = std::max(report.timeAvgX, report.timeAvgY);
    report.holds = report.margin > 1e-12 * scale && scale > 0.0;
    return report;
}

double operator_norm(const GMatrix& gMatrix) {
    if (gMatrix.g.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gMatrix.g);
    return std::max(0.0, solver.eigenvalues().maxCoeff());
}

} // namespace fluct
