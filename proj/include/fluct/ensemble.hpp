#pragma once

#include <cstdint>
#include <vector>

#include "fluct/particle_sim.hpp"
#include "fluct/torus_theory.hpp"
#include "fluct/volterra.hpp"

namespace fluct {

// Replica ensembles with deterministic aggregation. Replica r draws its
// noise from split(masterSeed, r), results land in preallocated slots, and
// the reduction runs in index order with compensated summation, so the
// output is a pure function of the config regardless of worker count or
// scheduling.

struct GridMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ReplicaError : std::runtime_error {
    ReplicaError(int replica, const std::string& what);
    int replica;
};

struct EnsembleCurves {
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> stdError;
    int replicas = 0;
    std::vector<std::vector<double>> perReplica; // [replica][time]
};

struct SimEnsembleConfig {
    SimConfig sim;
    int replicas = 2;
    std::uint64_t masterSeed = 0;
    int threads = 1;
    bool forceIdenticalStreams = false; // diagnostic: every replica reuses stream 0

    void validate() const;
};

// Ensemble of simulate_replica runs; curves of E||eta_N||_Phi^2.
EnsembleCurves run_ensemble(const SimEnsembleConfig& config);

struct ComparisonRow {
    double t = 0.0;
    double simMean = 0.0;
    double simStderr = 0.0;
    double theory = 0.0;
    double z = 0.0;
    bool pass = false;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    double zThreshold = 3.0;
    bool pass = false;
};

// Per-time z-scores of the ensemble against a theory curve on the same grid.
ComparisonReport compare_theory(const EnsembleCurves& curves,
                                const FluctuationCurve& theory,
                                double zThreshold = 3.0);

struct VolterraEnsembleConfig {
    GMatrix gMatrix;
    double beta = 1.0;
    int sign = +1;
    double dt = 1e-2;
    long steps = 0;
    int paths = 2;
    std::uint64_t masterSeed = 0;
    int threads = 1;
    long recordStride = 0; // if > 0, also aggregate ||X(t)||^2 every stride steps
};

struct VolterraPathVerdict {
    double timeAvgX = 0.0;
    double timeAvgY = 0.0;
    bool holds = false;
    double margin = 0.0;
};

struct VolterraEnsembleResult {
    std::vector<VolterraPathVerdict> verdicts;
    int holdCount = 0;
    bool weakInteraction = false;
    double gNorm = 0.0;
    EnsembleCurves normCurves; // populated when recordStride > 0
};

// Ensemble of OU-forced Volterra solves with per-path time-average verdicts.
VolterraEnsembleResult run_volterra_ensemble(const VolterraEnsembleConfig& config);

} // namespace fluct
