#include "fluct/run.hpp"

#include <cmath>

#include "fluct/ensemble.hpp"
#include "fluct/equilibrium.hpp"
#include "fluct/output.hpp"
#include "fluct/spectral.hpp"
#include "fluct/torus_theory.hpp"
#include "fluct/volterra.hpp"

namespace fluct {

namespace {

nlohmann::ordered_json base_summary(const RunConfig& cfg) {
    const std::string echo = experiment_echo(cfg);
    nlohmann::ordered_json summary;
    summary["subcommand"] = cfg.subcommand;
    summary["config_hash"] = content_hash(echo);
    summary["config_echo"] = echo;
    return summary;
}

PotentialFn potential_fn(const RunConfig& cfg) {
    if (cfg.potential == "quadratic") return [](double x) { return 0.5 * x * x; };
    return [](double) { return 0.0; };
}

Grid grid_of(const RunConfig& cfg) {
    return cfg.domain == "line" ? make_line_grid(cfg.gridSize, cfg.gridHalfWidth)
                                : make_torus_grid(cfg.gridSize);
}

KernelFn interaction_fn(const RunConfig& cfg, const TorusKernel& torusKernel) {
    if (cfg.interaction == "none") return [](double) { return 0.0; };
    const double s = cfg.interaction == "minus_phi" ? -1.0 : 1.0;
    if (cfg.domain == "line") {
        if (cfg.lineKernel == "none")
            throw ValidationError("line_kernel",
                                  "interacting line runs need a line kernel");
        const LineKernel lk = gaussian_line_kernel();
        return [lk, s](double d) { return s * lk(d); };
    }
    return [torusKernel, s](double d) { return s * eval_kernel(torusKernel, d); };
}

// U = V + W*rho_* on nodes; face values averaged unless the run is
// interaction-free, in which case V is evaluated at the faces directly.
GeneratorMatrix generator_of(const RunConfig& cfg, const TorusKernel& torusKernel) {
    const Grid grid = grid_of(cfg);
    const PotentialFn v = potential_fn(cfg);

    if (cfg.interaction == "none") {
        std::vector<double> uNodes(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) uNodes[i] = v(grid.x[i]);
        const std::size_t faceCount =
            grid.domain == Domain::Torus ? grid.size() : grid.size() - 1;
        std::vector<double> uFaces(faceCount);
        for (std::size_t f = 0; f < faceCount; ++f)
            uFaces[f] = v(grid.x[f] + 0.5 * grid.spacing);
        return build_generator(grid, uNodes, uFaces, cfg.beta);
    }

    const KernelFn w = interaction_fn(cfg, torusKernel);
    const DensityGrid rho = solve_gibbs_fixed_point(v, w, cfg.beta, grid, cfg.damping,
                                                    cfg.fpTol, cfg.maxIter);
    return build_generator(grid, effective_potential(v, w, rho), cfg.beta);
}

GMatrix g_matrix_of(const RunConfig& cfg, const SpectralModel& model,
                    const TorusKernel& torusKernel) {
    if (cfg.domain == "line") {
        if (cfg.lineKernel == "none")
            throw ValidationError("line_kernel", "the G matrix needs a line kernel");
        return g_matrix(model, gaussian_line_kernel());
    }
    return g_matrix(model, torusKernel);
}

int run_theory(const RunConfig& cfg, RunOutputs& out) {
    if (cfg.sign == 0)
        throw ValidationError("sign", "theory curves need sign +1 or -1");
    const TorusKernel kernel = cfg.kernel.build();
    const TorusModeTable table = build_mode_table(kernel, cfg.beta, cfg.sign);
    const FluctuationCurve curve =
        total_fluctuation_curve(table, cfg.recordTimes, cfg.perMode);

    std::string header = "t,total";
    if (cfg.perMode)
        for (const auto& row : table.rows) header += ",mode_" + std::to_string(row.j);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        std::vector<double> row{curve.times[i], curve.totals[i]};
        for (const auto& mode : curve.perMode) row.push_back(mode[i]);
        rows.push_back(std::move(row));
    }
    out.files.push_back({"theory_curve.csv", csv_table(header, rows)});

    const double betaC = critical_beta(kernel);
    auto& results = out.summary["results"];
    results["beta"] = cfg.beta;
    results["sign"] = cfg.sign;
    if (std::isfinite(betaC))
        results["beta_c"] = betaC;
    else
        results["beta_c"] = "infinity";
    results["longtime_limit"] = longtime_limit(kernel, cfg.beta);
    return 0;
}

SimEnsembleConfig sim_ensemble_of(const RunConfig& cfg) {
    if (cfg.domain != "torus")
        throw ValidationError("domain", "particle ensembles run on the torus");
    SimEnsembleConfig ec;
    ec.sim.particleCount = cfg.particles;
    ec.sim.beta = cfg.beta;
    ec.sim.dt = cfg.dt;
    ec.sim.tFinal = cfg.tFinal;
    ec.sim.sign = cfg.sign;
    ec.sim.domain = Domain::Torus;
    ec.sim.kernel = cfg.kernel.build();
    ec.sim.recordTimes = cfg.recordTimes;
    ec.replicas = cfg.replicas;
    ec.masterSeed = cfg.seed;
    ec.threads = cfg.threads;
    return ec;
}

void emit_ensemble_files(const EnsembleCurves& curves, RunOutputs& out) {
    std::vector<std::vector<double>> replicaRows;
    for (int r = 0; r < curves.replicas; ++r)
        for (std::size_t i = 0; i < curves.times.size(); ++i)
            replicaRows.push_back({static_cast<double>(r), curves.times[i],
                                   curves.perReplica[r][i]});
    out.files.push_back(
        {"replica_norms.csv", csv_table("replica,t,phi_norm_sq", replicaRows)});

    std::vector<std::vector<double>> aggRows;
    for (std::size_t i = 0; i < curves.times.size(); ++i)
        aggRows.push_back({curves.times[i], curves.mean[i], curves.stdError[i],
                           static_cast<double>(curves.replicas)});
    out.files.push_back(
        {"aggregate.csv", csv_table("t,mean,stderr,replicas", aggRows)});
}

int run_simulate(const RunConfig& cfg, RunOutputs& out) {
    const EnsembleCurves curves = run_ensemble(sim_ensemble_of(cfg));
    emit_ensemble_files(curves, out);
    auto& results = out.summary["results"];
    results["replicas"] = curves.replicas;
    results["record_times"] = curves.times;
    results["mean"] = curves.mean;
    results["stderr"] = curves.stdError;
    return 0;
}

int run_equilibrium(const RunConfig& cfg, RunOutputs& out) {
    const Grid grid = grid_of(cfg);
    const TorusKernel kernel = cfg.kernel.build();
    const PotentialFn v = potential_fn(cfg);
    const KernelFn w = interaction_fn(cfg, kernel);

    const DensityGrid rho = solve_gibbs_fixed_point(v, w, cfg.beta, grid, cfg.damping,
                                                    cfg.fpTol, cfg.maxIter);
    const std::vector<double> u = effective_potential(v, w, rho);
    const FreeEnergyReport report = free_energy(rho, v, w, cfg.beta);

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < grid.size(); ++i)
        rows.push_back({grid.x[i], rho.values[i], u[i]});
    out.files.push_back({"equilibrium.csv", csv_table("x,rho,potential_u", rows)});

    auto& results = out.summary["results"];
    results["energy"] = report.energy;
    results["entropy_term"] = report.entropyTerm;
    results["free_energy"] = report.total;
    results["mass"] = rho.mass();
    return 0;
}

int run_spectral(const RunConfig& cfg, RunOutputs& out) {
    const TorusKernel kernel = cfg.kernel.build();
    const GeneratorMatrix gen = generator_of(cfg, kernel);
    const SpectralModel model = eigendecompose(gen, cfg.truncation);
    const GMatrix g = g_matrix_of(cfg, model, kernel);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gEigs(g.g);

    auto& results = out.summary["results"];
    results["eigenvalues"] =
        std::vector<double>(model.lambda.data(), model.lambda.data() + model.truncation);
    results["spectral_gap"] = model.truncation > 1 ? model.lambda[1] : 0.0;
    std::vector<double> gDiag(g.g.rows()), gEig(g.g.rows());
    for (Eigen::Index i = 0; i < g.g.rows(); ++i) {
        gDiag[i] = g.g(i, i);
        gEig[i] = gEigs.eigenvalues()[i];
    }
    results["g_diagonal"] = gDiag;
    results["g_eigenvalues"] = gEig;

    if (cfg.emitMatrices) {
        auto matrixRows = [](const Eigen::MatrixXd& m) {
            std::vector<std::vector<double>> rows;
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                std::vector<double> row(m.cols());
                for (Eigen::Index c = 0; c < m.cols(); ++c) row[c] = m(r, c);
                rows.push_back(std::move(row));
            }
            return rows;
        };
        auto indexHeader = [](const std::string& stem, Eigen::Index n) {
            std::string h;
            for (Eigen::Index i = 0; i < n; ++i)
                h += (i ? "," : "") + stem + std::to_string(i);
            return h;
        };
        out.files.push_back({"g_matrix.csv",
                             csv_table(indexHeader("g", g.g.cols()), matrixRows(g.g))});
        out.files.push_back({"g_sqrt.csv",
                             csv_table(indexHeader("g", g.sqrtG.cols()), matrixRows(g.sqrtG))});
        std::vector<std::vector<double>> phiRows;
        for (std::size_t i = 0; i < model.grid.size(); ++i) {
            std::vector<double> row{model.grid.x[i]};
            for (int j = 0; j < model.truncation; ++j) row.push_back(model.phi(i, j));
            phiRows.push_back(std::move(row));
        }
        out.files.push_back(
            {"eigenfunctions.csv",
             csv_table("x," + indexHeader("phi_", model.truncation), phiRows)});
    }
    return 0;
}

int run_volterra(const RunConfig& cfg, RunOutputs& out) {
    if (cfg.sign == 0)
        throw ValidationError("sign", "volterra comparisons need sign +1 or -1");
    const TorusKernel kernel = cfg.kernel.build();
    const GeneratorMatrix gen = generator_of(cfg, kernel);
    const SpectralModel model = eigendecompose(gen, cfg.truncation);

    VolterraEnsembleConfig vc;
    vc.gMatrix = g_matrix_of(cfg, model, kernel);
    vc.beta = cfg.beta;
    vc.sign = cfg.sign;
    vc.dt = cfg.volterraDt;
    vc.steps = std::lround(cfg.volterraT / cfg.volterraDt);
    vc.paths = cfg.volterraPaths;
    vc.masterSeed = cfg.seed;
    vc.threads = cfg.threads;
    const VolterraEnsembleResult result = run_volterra_ensemble(vc);

    std::vector<std::vector<double>> pathRows;
    for (std::size_t p = 0; p < result.verdicts.size(); ++p) {
        const auto& vd = result.verdicts[p];
        pathRows.push_back({static_cast<double>(p), vd.timeAvgX, vd.timeAvgY,
                            vd.holds ? 1.0 : 0.0, vd.margin});
    }
    out.files.push_back(
        {"volterra_paths.csv",
         csv_table("path,time_avg_X,time_avg_Y,holds,margin", pathRows)});

    // Built-in scalar convergence diagnostic: Gamma(t) = 0.5 e^{-0.5 t},
    // Y = 1, closed form X(t) = 0.5 (1 + e^{-t}).
    std::vector<std::vector<double>> convRows;
    double prevErr = 0.0;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
        VolterraProblem scalar;
        scalar.gMatrix.g = Eigen::MatrixXd::Ones(1, 1);
        scalar.gMatrix.sqrtG = Eigen::MatrixXd::Ones(1, 1);
        scalar.gMatrix.rates = Eigen::VectorXd::Constant(1, 0.5);
        scalar.beta = 1.0;
        scalar.sign = +1;
        scalar.dt = dt;
        scalar.steps = std::lround(1.0 / dt);
        scalar.forcing = Eigen::MatrixXd::Ones(scalar.steps + 1, 1);
        const Eigen::MatrixXd x = solve_volterra(scalar);
        double maxErr = 0.0;
        for (long n = 0; n <= scalar.steps; ++n)
            maxErr = std::max(maxErr,
                              std::abs(x(n, 0) - 0.5 * (1.0 + std::exp(-n * dt))));
        convRows.push_back({dt, maxErr, prevErr > 0.0 ? prevErr / maxErr : 0.0});
        prevErr = maxErr;
    }
    out.files.push_back(
        {"volterra_convergence.csv", csv_table("dt,max_error,ratio", convRows)});

    auto& results = out.summary["results"];
    results["paths"] = vc.paths;
    results["hold_count"] = result.holdCount;
    results["weak_interaction"] = result.weakInteraction;
    results["g_norm"] = result.gNorm;
    return 0;
}

int run_compare(const RunConfig& cfg, RunOutputs& out) {
    const EnsembleCurves curves = run_ensemble(sim_ensemble_of(cfg));
    const TorusKernel kernel = cfg.kernel.build();

    FluctuationCurve theory;
    if (cfg.sign == 0) {
        // Baseline target: the stationary Monte Carlo level sum_j E|Y_j|^2.
        const TorusModeTable table = build_mode_table(kernel, cfg.beta, +1);
        double level = 0.0;
        for (const auto& row : table.rows) level += row.varY;
        theory.times = cfg.recordTimes;
        theory.totals.assign(cfg.recordTimes.size(), level);
    } else {
        theory = total_fluctuation_curve(build_mode_table(kernel, cfg.beta, cfg.sign),
                                         cfg.recordTimes);
    }

    const ComparisonReport report = compare_theory(curves, theory, cfg.zThreshold);

    std::vector<std::vector<double>> rows;
    double maxAbsZ = 0.0;
    for (const auto& r : report.rows) {
        rows.push_back({r.t, r.simMean, r.simStderr, r.theory, r.z, r.pass ? 1.0 : 0.0});
        maxAbsZ = std::max(maxAbsZ, std::abs(r.z));
    }
    out.files.push_back(
        {"comparison.csv", csv_table("t,sim_mean,sim_stderr,theory,z,pass", rows)});
    emit_ensemble_files(curves, out);

    auto& results = out.summary["results"];
    results["pass"] = report.pass;
    results["z_threshold"] = report.zThreshold;
    results["max_abs_z"] = maxAbsZ;
    return report.pass ? 0 : 1;
}

} // namespace

int run_with_config(const RunConfig& cfg) {
    RunOutputs out;
    out.summary = base_summary(cfg);

    int code = 0;
    if (cfg.subcommand == "theory") code = run_theory(cfg, out);
    else if (cfg.subcommand == "simulate") code = run_simulate(cfg, out);
    else if (cfg.subcommand == "equilibrium") code = run_equilibrium(cfg, out);
    else if (cfg.subcommand == "spectral") code = run_spectral(cfg, out);
    else if (cfg.subcommand == "volterra") code = run_volterra(cfg, out);
    else if (cfg.subcommand == "compare") code = run_compare(cfg, out);
    else throw ValidationError("subcommand", "unknown subcommand " + cfg.subcommand);

    write_outputs(out, cfg.outDir);
    return code;
}

} // namespace fluct
