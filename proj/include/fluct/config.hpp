#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fluct/kernels.hpp"

namespace fluct {

struct ParseError : std::runtime_error {
    ParseError(int line, const std::string& what);
    int line;
};

struct ValidationError : std::runtime_error {
    ValidationError(const std::string& field, const std::string& reason);
    std::string field;
    std::string reason;
};

struct KernelSpec {
    int dim = 1;
    std::string preset = "one_plus_cos"; // empty when explicit modes are given
    std::vector<std::pair<Wavevector, double>> modes;

    bool operator==(const KernelSpec&) const = default;

    TorusKernel build() const;
};

// Parsed and validated run configuration. Sections: [run], [kernel],
// [experiment]; unknown sections and keys are rejected. The format reference
// lives in the README.
struct RunConfig {
    std::string subcommand = "theory";

    KernelSpec kernel;

    double beta = 1.0;
    int sign = +1;
    int particles = 1000;
    double dt = 1e-3;
    double tFinal = 1.0;
    std::vector<double> recordTimes{1.0};
    int gridSize = 256;
    double gridHalfWidth = 8.0;
    int truncation = 64;
    int replicas = 100;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string domain = "torus";      // torus | line
    std::string potential = "zero";    // zero | quadratic (V = x^2/2)
    std::string interaction = "phi";   // none | phi | minus_phi
    std::string lineKernel = "gaussian"; // gaussian | none
    bool perMode = false;
    bool emitMatrices = false;
    double zThreshold = 3.0;
    double volterraT = 10.0;
    double volterraDt = 0.01;
    int volterraPaths = 200;
    double damping = 0.5;
    double fpTol = 1e-10;
    int maxIter = 2000;

    std::string outDir = "out";

    bool operator==(const RunConfig&) const = default;
};

// Parse + validate; throws ParseError with a line reference on malformed
// input, ValidationError (field, reason) on bad values or unknown keys.
RunConfig parse_config(const std::string& text);

// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

// The experiment identity: canonical text without outDir and threads (they
// do not influence results). Hashed into the output summaries.
std::string experiment_echo(const RunConfig& config);

} // namespace fluct
