#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fluct/config.hpp"
#include "fluct/output.hpp"
#include "fluct/run.hpp"

using namespace fluct;

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

const char* kMinimalTheory = R"(
[run]
subcommand = theory

[kernel]
dim = 1
preset = one_plus_cos

[experiment]
beta = 2.0
sign = +1
record_times = 0, 1, 5
)";

} // namespace

TEST_CASE("minimal config parses with defaults") {
    const RunConfig cfg = parse_config(kMinimalTheory);
    CHECK(cfg.subcommand == "theory");
    CHECK(cfg.beta == 2.0);
    CHECK(cfg.sign == 1);
    CHECK(cfg.recordTimes == std::vector<double>{0.0, 1.0, 5.0});
    CHECK(cfg.threads == 1);   // default
    CHECK(cfg.outDir == "out"); // default
}

TEST_CASE("validation errors carry field and reason") {
    try {
        parse_config("[run]\nsubcommand = theory\n[experiment]\nbeta = -1\n");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.field == "beta");
        CHECK(e.reason.find("positive") != std::string::npos);
    }

    try {
        parse_config("[run]\nsubcommand = theory\n[experiment]\nsign = 2\n");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.field == "sign");
        CHECK(e.reason.find("+1, -1, or 0") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_config("[run]\nmystery = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("[mystery]\nkey = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("[run]\nsubcommand = theory\nsubcommand = theory\n"),
                    ValidationError);
}

TEST_CASE("parse errors carry the line number") {
    try {
        parse_config("[run]\nsubcommand = theory\nnonsense line\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }
    CHECK_THROWS_AS(parse_config("[unterminated\n"), ParseError);
    CHECK_THROWS_AS(parse_config("orphan = 1\n"), ParseError);
}

TEST_CASE("round trip through the canonical form") {
    const RunConfig a = parse_config(kMinimalTheory);
    CHECK(parse_config(serialize_config(a)) == a);

    RunConfig b = a;
    b.subcommand = "simulate";
    b.kernel.preset.clear();
    b.kernel.modes = {{{0, 0}, kTwoPi}, {{1, 0}, M_PI}, {{-1, 0}, M_PI}};
    b.seed = 987654321;
    b.replicas = 37;
    b.dt = 0.0025;
    b.recordTimes = {0.5, 1.25};
    b.tFinal = 1.25;
    CHECK(parse_config(serialize_config(b)) == b);

    // The experiment echo drops runtime-only keys.
    const std::string echo = experiment_echo(b);
    CHECK(echo.find("threads") == std::string::npos);
    CHECK(echo.find("out =") == std::string::npos);
    CHECK(content_hash(echo) == content_hash(experiment_echo(b)));
}

TEST_CASE("csv formatting uses 17 significant digits") {
    const std::string table =
        csv_table("a,b", {{1.0 / 3.0, 2.0}, {6.283185307179586, 0.1}});
    CHECK(table.find("0.33333333333333331") != std::string::npos);
    CHECK(table.find("6.2831853071795862") != std::string::npos);
    CHECK(table.substr(0, 4) == "a,b\n");
}

TEST_CASE("write_outputs produces a manifest") {
    const auto dir = std::filesystem::temp_directory_path() / "fluct_io_test";
    std::filesystem::remove_all(dir);
    RunOutputs out;
    out.summary["subcommand"] = "noop";
    const auto manifest = write_outputs(out, dir);
    REQUIRE(manifest.size() == 1);
    CHECK(manifest[0] == "summary.json");
    CHECK(std::filesystem::exists(dir / "summary.json"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("theory run writes deterministic artifacts") {
    const auto dirA = std::filesystem::temp_directory_path() / "fluct_theory_a";
    const auto dirB = std::filesystem::temp_directory_path() / "fluct_theory_b";
    std::filesystem::remove_all(dirA);
    std::filesystem::remove_all(dirB);

    RunConfig cfg = parse_config(kMinimalTheory);
    cfg.outDir = dirA.string();
    CHECK(run_with_config(cfg) == 0);
    cfg.outDir = dirB.string();
    CHECK(run_with_config(cfg) == 0);

    const std::string summary = read_file(dirA / "summary.json");
    CHECK(summary.find("\"beta_c\": 2.0") != std::string::npos);
    CHECK(summary.find("\"longtime_limit\": 0.5") != std::string::npos);

    // Identical experiment, different directories: byte-identical artifacts.
    CHECK(read_file(dirA / "summary.json") == read_file(dirB / "summary.json"));
    CHECK(read_file(dirA / "theory_curve.csv") == read_file(dirB / "theory_curve.csv"));

    const std::string curve = read_file(dirA / "theory_curve.csv");
    CHECK(curve.substr(0, 8) == "t,total\n");
    CHECK(curve.find("0,1\n") != std::string::npos); // t = 0 level Phi(0) - Phi_0

    std::filesystem::remove_all(dirA);
    std::filesystem::remove_all(dirB);
}

TEST_CASE("theory rejects the baseline sign") {
    RunConfig cfg = parse_config(kMinimalTheory);
    cfg.sign = 0;
    cfg.outDir = (std::filesystem::temp_directory_path() / "fluct_reject").string();
    CHECK_THROWS_AS(run_with_config(cfg), ValidationError);
}
