#include "fluct/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace fluct {

namespace {

// Kahan-compensated accumulation; keeps long reductions drift-free.
double compensated_sum(const std::vector<double>& values,
                       double (*transform)(double, double), double arg) {
    double sum = 0.0, comp = 0.0;
    for (double v : values) {
        const double term = transform(v, arg) - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    return sum;
}

double identity_term(double v, double) { return v; }
double centered_sq(double v, double mean) { return (v - mean) * (v - mean); }

// Run `body(replica)` for replica = 0..count-1 across workers; the first
// failure is rethrown with its replica index attached.
template <typename Body>
void for_each_replica(int count, int threads, Body&& body) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int r = 0; r < count; ++r) {
            try {
                body(r);
            } catch (const std::exception& e) {
                throw ReplicaError(r, e.what());
            }
        }
        return;
    }
    std::atomic<int> next{0};
    std::mutex errorLock;
    int errorReplica = -1;
    std::exception_ptr error;
    auto worker = [&] {
        for (int r = next.fetch_add(1); r < count; r = next.fetch_add(1)) {
            try {
                body(r);
            } catch (...) {
                std::lock_guard<std::mutex> hold(errorLock);
                if (!error) {
                    error = std::current_exception();
                    errorReplica = r;
                }
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) {
        try {
            std::rethrow_exception(error);
        } catch (const std::exception& e) {
            throw ReplicaError(errorReplica, e.what());
        }
    }
}

void aggregate(EnsembleCurves& curves) {
    const int r = curves.replicas;
    const std::size_t t = curves.times.size();
    curves.mean.assign(t, 0.0);
    curves.stdError.assign(t, 0.0);
    std::vector<double> column(r);
    for (std::size_t i = 0; i < t; ++i) {
        for (int p = 0; p < r; ++p) column[p] = curves.perReplica[p][i];
        const double mean = compensated_sum(column, identity_term, 0.0) / r;
        curves.mean[i] = mean;
        if (r > 1) {
            const double varSum = compensated_sum(column, centered_sq, mean);
            curves.stdError[i] = std::sqrt(varSum / (r - 1) / r);
        }
    }
}

} // namespace

ReplicaError::ReplicaError(int replica_, const std::string& what_)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "replica " << replica_ << ": " << what_;
          return os.str();
      }()),
      replica(replica_) {}

void SimEnsembleConfig::validate() const {
    if (replicas < 2) throw std::invalid_argument("need at least 2 replicas");
    if (threads < 1) throw std::invalid_argument("need at least 1 worker");
    sim.validate();
    if (sim.recordTimes.empty())
        throw std::invalid_argument("ensemble needs record times");
}

EnsembleCurves run_ensemble(const SimEnsembleConfig& config) {
    config.validate();
    EnsembleCurves curves;
    curves.times = config.sim.recordTimes;
    curves.replicas = config.replicas;
    curves.perReplica.assign(config.replicas,
                             std::vector<double>(curves.times.size(), 0.0));

    const RngStream master = RngStream::master(config.masterSeed);
    for_each_replica(config.replicas, config.threads, [&](int r) {
        const std::uint64_t streamIndex =
            config.forceIdenticalStreams ? 0 : static_cast<std::uint64_t>(r);
        const auto records =
            simulate_replica(config.sim, master.substream(streamIndex));
        for (std::size_t i = 0; i < records.size(); ++i)
            curves.perReplica[r][i] = records[i].phiNormSq;
    });
    aggregate(curves);
    return curves;
}

ComparisonReport compare_theory(const EnsembleCurves& curves,
                                const FluctuationCurve& theory, double zThreshold) {
    if (curves.times.size() != theory.times.size())
        throw GridMismatchError("simulation and theory grids differ in length");
    for (std::size_t i = 0; i < curves.times.size(); ++i)
        if (std::abs(curves.times[i] - theory.times[i]) > 1e-12)
            throw GridMismatchError("simulation and theory grids differ");

    ComparisonReport report;
    report.zThreshold = zThreshold;
    report.pass = true;
    for (std::size_t i = 0; i < curves.times.size(); ++i) {
        ComparisonRow row;
        row.t = curves.times[i];
        row.simMean = curves.mean[i];
        row.simStderr = curves.stdError[i];
        row.theory = theory.totals[i];
        if (row.simStderr > 0.0)
            row.z = (row.simMean - row.theory) / row.simStderr;
        else
            row.z = row.simMean == row.theory
                        ? 0.0
                        : std::numeric_limits<double>::infinity();
        row.pass = std::abs(row.z) <= zThreshold;
        report.pass = report.pass && row.pass;
        report.rows.push_back(row);
    }
    return report;
}

VolterraEnsembleResult run_volterra_ensemble(const VolterraEnsembleConfig& config) {
    if (config.paths < 1) throw std::invalid_argument("need at least one path");
    if (config.steps < 1) throw std::invalid_argument("need at least one step");

    VolterraEnsembleResult result;
    result.verdicts.resize(config.paths);
    result.gNorm = operator_norm(config.gMatrix);
    result.weakInteraction = result.gNorm <= 2.0 / config.beta + 1e-12;

    std::vector<long> recordSteps;
    if (config.recordStride > 0) {
        for (long n = 0; n <= config.steps; n += config.recordStride)
            recordSteps.push_back(n);
        result.normCurves.times.resize(recordSteps.size());
        for (std::size_t i = 0; i < recordSteps.size(); ++i)
            result.normCurves.times[i] = recordSteps[i] * config.dt;
        result.normCurves.replicas = config.paths;
        result.normCurves.perReplica.assign(
            config.paths, std::vector<double>(recordSteps.size(), 0.0));
    }

    const RngStream master = RngStream::master(config.masterSeed);
    for_each_replica(config.paths, config.threads, [&](int p) {
        RngStream stream = master.substream(static_cast<std::uint64_t>(p));
        VolterraProblem problem;
        problem.gMatrix = config.gMatrix;
        problem.beta = config.beta;
        problem.sign = config.sign;
        problem.dt = config.dt;
        problem.steps = config.steps;
        problem.forcing = sample_Y_paths(config.gMatrix, config.dt, config.steps, stream);
        const Eigen::MatrixXd x = solve_volterra(problem);
        const InequalityReport rep =
            check_timeavg_inequality(problem, x, problem.forcing);
        result.verdicts[p] = {rep.timeAvgX, rep.timeAvgY, rep.holds, rep.margin};
        if (config.recordStride > 0)
            for (std::size_t i = 0; i < recordSteps.size(); ++i)
                result.normCurves.perReplica[p][i] = x.row(recordSteps[i]).squaredNorm();
    });

    for (const auto& v : result.verdicts) result.holdCount += v.holds ? 1 : 0;
    if (config.recordStride > 0) aggregate(result.normCurves);
    return result;
}

} // namespace fluct
