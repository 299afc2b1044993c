#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fluct/config.hpp"
#include "fluct/run.hpp"

namespace {

// Exit codes: 0 success/pass, 1 comparison fail, 2 config error, 3 runtime error.
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fluctsim: fluctuation statistics of mean-field particle systems"};

    std::string subcommand;
    std::string configPath;
    std::string outDir;
    std::uint64_t seed = 0;
    int replicas = 0;
    int threads = 0;

    app.add_option("subcommand", subcommand,
                   "theory | simulate | equilibrium | spectral | volterra | compare "
                   "(overrides the config's subcommand)")
        ->check(CLI::IsMember(
            {"theory", "simulate", "equilibrium", "spectral", "volterra", "compare"}));
    app.add_option("--config", configPath, "run configuration file")->required();
    auto* seedOpt = app.add_option("--seed", seed, "override the master seed");
    auto* replicasOpt = app.add_option("--replicas", replicas, "override the replica count");
    auto* threadsOpt = app.add_option("--threads", threads, "override the worker count");
    auto* outOpt = app.add_option("--out", outDir, "override the output directory");

    CLI11_PARSE(app, argc, argv);

    std::string text;
    {
        std::ifstream in(configPath, std::ios::binary);
        if (!in) {
            std::cerr << "error: cannot read config file " << configPath << "\n";
            return kConfigError;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }

    try {
        fluct::RunConfig config = fluct::parse_config(text);
        if (!subcommand.empty()) config.subcommand = subcommand;
        if (seedOpt->count()) config.seed = seed;
        if (replicasOpt->count()) config.replicas = replicas;
        if (threadsOpt->count()) config.threads = threads;
        if (outOpt->count()) config.outDir = outDir;

        const int code = fluct::run_with_config(config);
        std::cout << config.subcommand << ": outputs written to " << config.outDir
                  << (code == 0 ? "" : " (comparison FAILED)") << "\n";
        return code;
    } catch (const fluct::ParseError& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        return kConfigError;
    } catch (const fluct::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kRuntimeError;
    }
}
