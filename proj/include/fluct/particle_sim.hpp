#pragma once

#include <complex>
#include <functional>
#include <map>
#include <vector>

#include "fluct/common.hpp"
#include "fluct/kernels.hpp"
#include "fluct/rng.hpp"

namespace fluct {

// Euler-Maruyama ensembles for the N-particle mean-field system
//   dX_i = -(1/N) sum_j grad W(X_i - X_j) dt + sqrt(2/beta) dB_i,  W = sign*Phi,
// on the torus, and for the non-interacting mean-field baseline (sign = 0).
// Pairwise forces are accumulated through the kernel's Fourier modes in
// O(N*M) per step; the result matches the direct O(N^2) sum to roundoff.

struct SimConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ParticleState {
    int dim = 1;
    double time = 0.0;
    std::vector<double> positions; // flat, N*dim, torus coords in [0,2pi)

    int count() const { return static_cast<int>(positions.size()) / dim; }
};

struct SimConfig {
    int particleCount = 0;
    double beta = 1.0;  // inverse temperature, finite (zero temperature is out of scope)
    double dt = 1e-3;
    double tFinal = 1.0;
    int sign = 0; // +1: W = Phi, -1: W = -Phi, 0: baseline (interaction off)
    Domain domain = Domain::Torus;
    TorusKernel kernel;
    std::function<double(double)> gradPotential; // line runs only; zero on torus
    std::vector<double> recordTimes;

    // Throws SimConfigError; enforces the step-size stability rule
    // dt <= 0.1 * min(1, beta/max|k|^2, 1/max C_j).
    void validate() const;
};

// i.i.d. uniform positions on the torus; deterministic given the stream.
ParticleState init_uniform(int n, int dim, RngStream& rng);

// Inverse-CDF sampling from a grid density (line domain).
ParticleState init_from_density(const Grid& grid, const std::vector<double>& rho,
                                int n, RngStream& rng);

// S(k) = sum_j e^{-i k.X_j} for every stored kernel mode; S(-k) = conj S(k)
// holds exactly and S(0) = N.
std::map<Wavevector, std::complex<double>> mode_sums(const ParticleState& state,
                                                     const TorusKernel& kernel);

// drift_i = -(sign/N) sum_j grad Phi(X_i - X_j), accumulated via mode sums.
// The self term j = i is kept; it vanishes for smooth even kernels.
std::vector<double> interaction_drift(const ParticleState& state,
                                      const TorusKernel& kernel, int sign);

// One Euler-Maruyama step; stepRng supplies this step's noise.
void euler_maruyama_step(ParticleState& state, const SimConfig& config,
                         RngStream& stepRng);

// Fourier data of the empirical fluctuation sqrt(N)(mu_N - mu_*) on the
// uniform torus: entry(k) = S(k)/sqrt(N) for k != 0, entry(0) = 0 exactly.
ModeVector empirical_fluctuation(const ParticleState& state, const TorusKernel& kernel);

struct RecordPoint {
    double t;
    ModeVector modes;
    double phiNormSq;
};

// Run one replica from uniform initial data, recording the fluctuation modes
// and ||eta_N||_Phi^2 at config.recordTimes. Noise is keyed by
// (replicaStream, stepIndex), so the trajectory is a pure function of the
// stream. Torus domain only.
std::vector<RecordPoint> simulate_replica(const SimConfig& config,
                                          const RngStream& replicaStream);

} // namespace fluct
