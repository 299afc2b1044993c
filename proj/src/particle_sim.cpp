#include "fluct/particle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fluct {

namespace {

// Flattened view of the canonical k != 0 modes, hot-loop friendly.
struct ModePlan {
    std::vector<double> kx, ky, weight;
    int dim = 1;
    double scale = kTwoPi;

    explicit ModePlan(const TorusKernel& kernel) {
        dim = kernel.dim();
        scale = dim == 1 ? kTwoPi : kTwoPi * kTwoPi;
        for (const auto& k : kernel.representatives()) {
            const double w = kernel.weight(k);
            if (w == 0.0) continue;
            kx.push_back(k[0]);
            ky.push_back(k[1]);
            weight.push_back(w);
        }
    }
    std::size_t size() const { return kx.size(); }
};

// Per-mode sums S(k) plus cached cos/sin(k.x_i) for the drift pass.
struct TrigTable {
    std::vector<double> c, s;                 // n*M, mode-major
    std::vector<std::complex<double>> sums;   // S(k) per plan mode

    void compute(const ParticleState& state, const ModePlan& plan) {
        const std::size_t n = static_cast<std::size_t>(state.count());
        const std::size_t m = plan.size();
        c.resize(n * m);
        s.resize(n * m);
        sums.assign(m, {0.0, 0.0});
        for (std::size_t q = 0; q < m; ++q) {
            double sumRe = 0.0, sumIm = 0.0;
            const double akx = plan.kx[q], aky = plan.ky[q];
            double* cq = c.data() + q * n;
            double* sq = s.data() + q * n;
            for (std::size_t i = 0; i < n; ++i) {
                const double phase =
                    plan.dim == 1
                        ? akx * state.positions[i]
                        : akx * state.positions[2 * i] + aky * state.positions[2 * i + 1];
                const double cv = std::cos(phase);
                const double sv = std::sin(phase);
                cq[i] = cv;
                sq[i] = sv;
                sumRe += cv;
                sumIm -= sv; // S(k) = sum e^{-i k.x}
            }
            sums[q] = {sumRe, sumIm};
        }
    }
};

// drift_i = (sign/N) (2pi)^{-d} sum_{reps k} 2 k Phi_hat(k) Im(e^{i k.x_i} S(k)),
// which is the pair-symmetrized form of -(sign/N)(2pi)^{-d} sum_k Phi_hat(k)(ik)e^{ik.x_i}S(k).
void drift_from_table(const ParticleState& state, const ModePlan& plan,
                      const TrigTable& table, int sign, std::vector<double>& drift) {
    const std::size_t n = static_cast<std::size_t>(state.count());
    drift.assign(n * static_cast<std::size_t>(state.dim), 0.0);
    const double pref = 2.0 * static_cast<double>(sign) /
                        (static_cast<double>(n) * plan.scale);
    for (std::size_t q = 0; q < plan.size(); ++q) {
        const double re = table.sums[q].real();
        const double im = table.sums[q].imag();
        const double wq = plan.weight[q];
        const double* cq = table.c.data() + q * n;
        const double* sq = table.s.data() + q * n;
        if (state.dim == 1) {
            const double fx = pref * wq * plan.kx[q];
            for (std::size_t i = 0; i < n; ++i)
                drift[i] += fx * (cq[i] * im + sq[i] * re);
        } else {
            const double fx = pref * wq * plan.kx[q];
            const double fy = pref * wq * plan.ky[q];
            for (std::size_t i = 0; i < n; ++i) {
                const double t = cq[i] * im + sq[i] * re;
                drift[2 * i] += fx * t;
                drift[2 * i + 1] += fy * t;
            }
        }
    }
}

void check_positions_wrapped(const ParticleState& state) {
    for (double v : state.positions)
        if (!(v >= 0.0 && v < kTwoPi))
            throw std::invalid_argument("torus positions must lie in [0, 2pi)");
}

} // namespace

void SimConfig::validate() const {
    if (particleCount < 2) throw SimConfigError("particle count must be at least 2");
    if (!std::isfinite(beta) || beta <= 0.0)
        throw SimConfigError("beta must be positive and finite (zero temperature is out of scope)");
    if (!(dt > 0.0)) throw SimConfigError("dt must be positive");
    if (!(tFinal >= dt)) throw SimConfigError("tFinal must be at least dt");
    if (sign != -1 && sign != 0 && sign != 1)
        throw SimConfigError("sign must be +1, -1, or 0");
    if (domain == Domain::Line && sign != 0)
        throw SimConfigError("interacting dynamics requires the torus domain");
    if (domain == Domain::Line && !gradPotential)
        throw SimConfigError("line runs need a potential gradient");

    if (domain == Domain::Torus) {
        double bound = 1.0;
        double maxK2 = 0.0, maxC = 0.0;
        const double scale = kernel.dim() == 1 ? kTwoPi : kTwoPi * kTwoPi;
        for (const auto& k : kernel.representatives()) {
            const double w = kernel.weight(k);
            if (w <= 0.0) continue;
            maxK2 = std::max(maxK2, static_cast<double>(norm_sq(k)));
            maxC = std::max(maxC, w * static_cast<double>(norm_sq(k)) / scale);
        }
        if (maxK2 > 0.0) bound = std::min(bound, beta / maxK2);
        if (maxC > 0.0) bound = std::min(bound, 1.0 / maxC);
        if (dt > 0.1 * bound)
            throw SimConfigError("dt violates the stability rule dt <= 0.1*min(1, beta/max|k|^2, 1/max C)");
    }
    for (double t : recordTimes) {
        if (t < 0.0 || t > tFinal + 1e-9)
            throw SimConfigError("record times must lie in [0, tFinal]");
    }
    if (!std::is_sorted(recordTimes.begin(), recordTimes.end()))
        throw SimConfigError("record times must be increasing");
}

ParticleState init_uniform(int n, int dim, RngStream& rng) {
    if (n < 2) throw SimConfigError("particle count must be at least 2");
    if (dim != 1 && dim != 2) throw SimConfigError("dimension must be 1 or 2");
    ParticleState state;
    state.dim = dim;
    state.positions.resize(static_cast<std::size_t>(n) * dim);
    for (double& v : state.positions) v = kTwoPi * rng.next_uniform();
    return state;
}

ParticleState init_from_density(const Grid& grid, const std::vector<double>& rho,
                                int n, RngStream& rng) {
    if (n < 2) throw SimConfigError("particle count must be at least 2");
    if (grid.size() != rho.size() || grid.size() < 2)
        throw std::invalid_argument("density grid mismatch");
    std::vector<double> cdf(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i)
        cdf[i] = cdf[i - 1] + 0.5 * (rho[i - 1] + rho[i]) * grid.spacing;
    const double total = cdf.back();
    ParticleState state;
    state.dim = 1;
    state.positions.resize(static_cast<std::size_t>(n));
    for (double& v : state.positions) {
        const double u = total * rng.next_uniform();
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        const std::size_t hi = std::max<std::size_t>(1, it - cdf.begin());
        const double seg = cdf[hi] - cdf[hi - 1];
        const double frac = seg > 0.0 ? (u - cdf[hi - 1]) / seg : 0.5;
        v = grid.x[hi - 1] + frac * grid.spacing;
    }
    return state;
}

std::map<Wavevector, std::complex<double>> mode_sums(const ParticleState& state,
                                                     const TorusKernel& kernel) {
    check_positions_wrapped(state);
    const ModePlan plan(kernel);
    TrigTable table;
    table.compute(state, plan);

    std::map<Wavevector, std::complex<double>> sums;
    std::size_t q = 0;
    for (const auto& k : kernel.representatives()) {
        if (kernel.weight(k) == 0.0) continue;
        sums[k] = table.sums[q];
        sums[negate(k)] = std::conj(table.sums[q]);
        ++q;
    }
    // Zero-weight modes and k = 0 still get exact sums.
    for (const auto& [k, w] : kernel.modes()) {
        if (sums.count(k)) continue;
        if (is_zero(k)) {
            sums[k] = {static_cast<double>(state.count()), 0.0};
            continue;
        }
        std::complex<double> s{0.0, 0.0};
        for (int i = 0; i < state.count(); ++i) {
            const double phase = state.dim == 1
                                     ? k[0] * state.positions[i]
                                     : k[0] * state.positions[2 * i] +
                                           k[1] * state.positions[2 * i + 1];
            s += std::complex<double>(std::cos(phase), -std::sin(phase));
        }
        sums[k] = s;
    }
    return sums;
}

std::vector<double> interaction_drift(const ParticleState& state,
                                      const TorusKernel& kernel, int sign) {
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("interaction sign must be +1 or -1");
    check_positions_wrapped(state);
    const ModePlan plan(kernel);
    TrigTable table;
    table.compute(state, plan);
    std::vector<double> drift;
    drift_from_table(state, plan, table, sign, drift);
    return drift;
}

void euler_maruyama_step(ParticleState& state, const SimConfig& config,
                         RngStream& stepRng) {
    const double sigma = std::sqrt(2.0 * config.dt / config.beta);
    if (config.domain == Domain::Torus) {
        if (config.sign != 0) {
            static thread_local std::vector<double> drift;
            const ModePlan plan(config.kernel);
            static thread_local TrigTable table;
            table.compute(state, plan);
            drift_from_table(state, plan, table, config.sign, drift);
            for (std::size_t i = 0; i < state.positions.size(); ++i)
                state.positions[i] = wrap_torus(state.positions[i] + drift[i] * config.dt +
                                                sigma * stepRng.next_normal());
        } else {
            for (double& v : state.positions)
                v = wrap_torus(v + sigma * stepRng.next_normal());
        }
    } else {
        for (double& v : state.positions)
            v += -config.gradPotential(v) * config.dt + sigma * stepRng.next_normal();
    }
    state.time += config.dt;
}

ModeVector empirical_fluctuation(const ParticleState& state, const TorusKernel& kernel) {
    const auto sums = mode_sums(state, kernel);
    const double invSqrtN = 1.0 / std::sqrt(static_cast<double>(state.count()));
    ModeVector modes;
    for (const auto& [k, s] : sums)
        modes.set(k, is_zero(k) ? std::complex<double>(0.0) : s * invSqrtN);
    return modes;
}

std::vector<RecordPoint> simulate_replica(const SimConfig& config,
                                          const RngStream& replicaStream) {
    config.validate();
    if (config.domain != Domain::Torus)
        throw SimConfigError("simulate_replica extracts Fourier fluctuations; torus only");

    const long nSteps = std::lround(config.tFinal / config.dt);
    std::vector<long> recordSteps;
    for (double t : config.recordTimes) {
        const long idx = std::lround(t / config.dt);
        if (std::abs(idx * config.dt - t) > 1e-9 || idx > nSteps)
            throw SimConfigError("record times must sit on the step grid");
        recordSteps.push_back(idx);
    }

    RngStream initRng = replicaStream.substream(0);
    ParticleState state = init_uniform(config.particleCount, config.kernel.dim(), initRng);

    std::vector<RecordPoint> records;
    auto record = [&](double t) {
        RecordPoint p;
        p.t = t;
        p.modes = empirical_fluctuation(state, config.kernel);
        p.phiNormSq = phi_norm_sq(config.kernel, p.modes);
        records.push_back(std::move(p));
    };

    std::size_t nextRecord = 0;
    while (nextRecord < recordSteps.size() && recordSteps[nextRecord] == 0) {
        record(config.recordTimes[nextRecord]);
        ++nextRecord;
    }
    for (long n = 0; n < nSteps && nextRecord < recordSteps.size(); ++n) {
        RngStream stepRng = replicaStream.substream(static_cast<std::uint64_t>(n) + 1);
        euler_maruyama_step(state, config, stepRng);
        while (nextRecord < recordSteps.size() && recordSteps[nextRecord] == n + 1) {
            record(config.recordTimes[nextRecord]);
            ++nextRecord;
        }
    }
    return records;
}

} // namespace fluct
