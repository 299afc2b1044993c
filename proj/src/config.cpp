#include "fluct/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace fluct {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(trim(s.substr(start)));
            break;
        }
        parts.push_back(trim(s.substr(start, pos - start)));
        start = pos + 1;
    }
    return parts;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Entry {
    std::string section, key, value;
    int line;
};

double parse_double(const Entry& e) {
    try {
        std::size_t used = 0;
        const double v = std::stod(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ValidationError(e.key, "not a number (line " + std::to_string(e.line) + ")");
    }
}

long parse_long(const Entry& e) {
    try {
        std::size_t used = 0;
        const long v = std::stol(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ValidationError(e.key, "not an integer (line " + std::to_string(e.line) + ")");
    }
}

std::uint64_t parse_u64(const Entry& e) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ValidationError(e.key,
                              "not an unsigned integer (line " + std::to_string(e.line) + ")");
    }
}

bool parse_bool(const Entry& e) {
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    throw ValidationError(e.key, "must be true or false (line " + std::to_string(e.line) + ")");
}

std::vector<double> parse_double_list(const Entry& e) {
    std::vector<double> out;
    for (const auto& part : split(e.value, ',')) {
        if (part.empty())
            throw ValidationError(e.key, "empty list item (line " + std::to_string(e.line) + ")");
        try {
            std::size_t used = 0;
            out.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ValidationError(e.key, "bad list item '" + part + "' (line " +
                                             std::to_string(e.line) + ")");
        }
    }
    return out;
}

std::vector<std::pair<Wavevector, double>> parse_modes(const Entry& e, int dim) {
    std::vector<std::pair<Wavevector, double>> out;
    for (const auto& item : split(e.value, ';')) {
        if (item.empty()) continue;
        const auto colon = item.rfind(':');
        if (colon == std::string::npos)
            throw ValidationError(e.key, "mode item '" + item + "' needs k:weight (line " +
                                             std::to_string(e.line) + ")");
        const auto kparts = split(item.substr(0, colon), ',');
        if (static_cast<int>(kparts.size()) != dim)
            throw ValidationError(e.key, "wavevector arity does not match dim (line " +
                                             std::to_string(e.line) + ")");
        Wavevector k{0, 0};
        try {
            for (std::size_t i = 0; i < kparts.size(); ++i) k[i] = std::stoi(kparts[i]);
            out.emplace_back(k, std::stod(trim(item.substr(colon + 1))));
        } catch (const std::exception&) {
            throw ValidationError(e.key, "bad mode item '" + item + "' (line " +
                                             std::to_string(e.line) + ")");
        }
    }
    if (out.empty())
        throw ValidationError(e.key, "mode list is empty (line " + std::to_string(e.line) + ")");
    return out;
}

void check_choice(const Entry& e, const std::vector<std::string>& allowed) {
    if (std::find(allowed.begin(), allowed.end(), e.value) != allowed.end()) return;
    std::string msg = "must be one of {";
    for (std::size_t i = 0; i < allowed.size(); ++i)
        msg += (i ? ", " : "") + allowed[i];
    msg += "} (line " + std::to_string(e.line) + ")";
    throw ValidationError(e.key, msg);
}

} // namespace

ParseError::ParseError(int line_, const std::string& what_)
    : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}

ValidationError::ValidationError(const std::string& field_, const std::string& reason_)
    : std::runtime_error("config field '" + field_ + "': " + reason_),
      field(field_),
      reason(reason_) {}

TorusKernel KernelSpec::build() const {
    if (!preset.empty()) {
        if (preset == "one_plus_cos") return one_plus_cos_kernel();
        throw ValidationError("kernel.preset", "unknown preset '" + preset + "'");
    }
    try {
        return torus_kernel_from_modes(dim, modes);
    } catch (const std::exception& e) {
        throw ValidationError("kernel.modes", e.what());
    }
}

RunConfig parse_config(const std::string& text) {
    std::vector<Entry> entries;
    {
        std::istringstream in(text);
        std::string raw;
        std::string section;
        int lineNo = 0;
        while (std::getline(in, raw)) {
            ++lineNo;
            const auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            const std::string line = trim(raw);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ParseError(lineNo, "unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty()) throw ParseError(lineNo, "empty section name");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ParseError(lineNo, "expected key = value");
            const std::string key = trim(line.substr(0, eq));
            if (key.empty()) throw ParseError(lineNo, "empty key");
            if (section.empty())
                throw ParseError(lineNo, "key outside of any section");
            entries.push_back({section, key, trim(line.substr(eq + 1)), lineNo});
        }
    }

    RunConfig cfg;
    cfg.recordTimes.clear();
    bool recordTimesSet = false;
    std::set<std::string> seen;

    // Kernel dim must be known before modes can be parsed.
    for (const auto& e : entries)
        if (e.section == "kernel" && e.key == "dim") cfg.kernel.dim = static_cast<int>(parse_long(e));

    for (const auto& e : entries) {
        const std::string id = e.section + "." + e.key;
        if (!seen.insert(id).second)
            throw ValidationError(id, "duplicate key (line " + std::to_string(e.line) + ")");

        if (e.section == "run") {
            if (e.key == "subcommand") {
                check_choice(e, {"theory", "simulate", "equilibrium", "spectral",
                                 "volterra", "compare"});
                cfg.subcommand = e.value;
            } else if (e.key == "out") {
                cfg.outDir = e.value;
            } else {
                throw ValidationError(id, "unknown key (line " + std::to_string(e.line) + ")");
            }
        } else if (e.section == "kernel") {
            if (e.key == "dim") {
                // parsed in the pre-pass
            } else if (e.key == "preset") {
                check_choice(e, {"one_plus_cos"});
                cfg.kernel.preset = e.value;
                cfg.kernel.modes.clear();
            } else if (e.key == "modes") {
                cfg.kernel.modes = parse_modes(e, cfg.kernel.dim);
                cfg.kernel.preset.clear();
            } else {
                throw ValidationError(id, "unknown key (line " + std::to_string(e.line) + ")");
            }
        } else if (e.section == "experiment") {
            if (e.key == "beta") cfg.beta = parse_double(e);
            else if (e.key == "sign") cfg.sign = static_cast<int>(parse_long(e));
            else if (e.key == "particles") cfg.particles = static_cast<int>(parse_long(e));
            else if (e.key == "dt") cfg.dt = parse_double(e);
            else if (e.key == "t_final") cfg.tFinal = parse_double(e);
            else if (e.key == "record_times") { cfg.recordTimes = parse_double_list(e); recordTimesSet = true; }
            else if (e.key == "grid_size") cfg.gridSize = static_cast<int>(parse_long(e));
            else if (e.key == "grid_halfwidth") cfg.gridHalfWidth = parse_double(e);
            else if (e.key == "truncation") cfg.truncation = static_cast<int>(parse_long(e));
            else if (e.key == "replicas") cfg.replicas = static_cast<int>(parse_long(e));
            else if (e.key == "seed") cfg.seed = parse_u64(e);
            else if (e.key == "threads") cfg.threads = static_cast<int>(parse_long(e));
            else if (e.key == "domain") { check_choice(e, {"torus", "line"}); cfg.domain = e.value; }
            else if (e.key == "potential") { check_choice(e, {"zero", "quadratic"}); cfg.potential = e.value; }
            else if (e.key == "interaction") { check_choice(e, {"none", "phi", "minus_phi"}); cfg.interaction = e.value; }
            else if (e.key == "line_kernel") { check_choice(e, {"gaussian", "none"}); cfg.lineKernel = e.value; }
            else if (e.key == "per_mode") cfg.perMode = parse_bool(e);
            else if (e.key == "emit_matrices") cfg.emitMatrices = parse_bool(e);
            else if (e.key == "z_threshold") cfg.zThreshold = parse_double(e);
            else if (e.key == "volterra_t") cfg.volterraT = parse_double(e);
            else if (e.key == "volterra_dt") cfg.volterraDt = parse_double(e);
            else if (e.key == "volterra_paths") cfg.volterraPaths = static_cast<int>(parse_long(e));
            else if (e.key == "damping") cfg.damping = parse_double(e);
            else if (e.key == "fp_tol") cfg.fpTol = parse_double(e);
            else if (e.key == "max_iter") cfg.maxIter = static_cast<int>(parse_long(e));
            else throw ValidationError(id, "unknown key (line " + std::to_string(e.line) + ")");
        } else {
            throw ValidationError(e.section, "unknown section (line " + std::to_string(e.line) + ")");
        }
    }
    if (!recordTimesSet) cfg.recordTimes = {1.0};

    // Cross-field validation.
    if (cfg.kernel.dim != 1 && cfg.kernel.dim != 2)
        throw ValidationError("kernel.dim", "must be 1 or 2");
    if (cfg.kernel.preset.empty() && cfg.kernel.modes.empty())
        throw ValidationError("kernel", "needs a preset or an explicit mode list");
    (void)cfg.kernel.build();
    if (!(cfg.beta > 0.0) || !std::isfinite(cfg.beta))
        throw ValidationError("beta", "must be positive");
    if (cfg.sign != -1 && cfg.sign != 0 && cfg.sign != 1)
        throw ValidationError("sign", "must be +1, -1, or 0");
    if (cfg.particles < 2) throw ValidationError("particles", "must be at least 2");
    if (!(cfg.dt > 0.0)) throw ValidationError("dt", "must be positive");
    if (!(cfg.tFinal > 0.0)) throw ValidationError("t_final", "must be positive");
    if (cfg.recordTimes.empty())
        throw ValidationError("record_times", "must not be empty");
    if (!std::is_sorted(cfg.recordTimes.begin(), cfg.recordTimes.end()))
        throw ValidationError("record_times", "must be increasing");
    if (cfg.recordTimes.front() < 0.0)
        throw ValidationError("record_times", "must be nonnegative");
    if (cfg.gridSize < 8) throw ValidationError("grid_size", "must be at least 8");
    if (!(cfg.gridHalfWidth > 0.0))
        throw ValidationError("grid_halfwidth", "must be positive");
    if (cfg.truncation < 1) throw ValidationError("truncation", "must be at least 1");
    if (cfg.replicas < 2) throw ValidationError("replicas", "must be at least 2");
    if (cfg.threads < 1) throw ValidationError("threads", "must be at least 1");
    if (!(cfg.zThreshold > 0.0)) throw ValidationError("z_threshold", "must be positive");
    if (!(cfg.volterraT > 0.0)) throw ValidationError("volterra_t", "must be positive");
    if (!(cfg.volterraDt > 0.0)) throw ValidationError("volterra_dt", "must be positive");
    if (cfg.volterraPaths < 1)
        throw ValidationError("volterra_paths", "must be at least 1");
    if (!(cfg.damping > 0.0 && cfg.damping <= 1.0))
        throw ValidationError("damping", "must lie in (0, 1]");
    if (!(cfg.fpTol > 0.0)) throw ValidationError("fp_tol", "must be positive");
    if (cfg.maxIter < 1) throw ValidationError("max_iter", "must be at least 1");
    return cfg;
}

namespace {

std::string serialize_impl(const RunConfig& c, bool includeRuntime) {
    std::ostringstream os;
    os << "[run]\n";
    os << "subcommand = " << c.subcommand << "\n";
    if (includeRuntime) os << "out = " << c.outDir << "\n";
    os << "\n[kernel]\n";
    os << "dim = " << c.kernel.dim << "\n";
    if (!c.kernel.preset.empty()) {
        os << "preset = " << c.kernel.preset << "\n";
    } else {
        os << "modes = ";
        for (std::size_t i = 0; i < c.kernel.modes.size(); ++i) {
            const auto& [k, w] = c.kernel.modes[i];
            if (i) os << "; ";
            os << k[0];
            if (c.kernel.dim == 2) os << "," << k[1];
            os << ":" << format_double(w);
        }
        os << "\n";
    }
    os << "\n[experiment]\n";
    os << "beta = " << format_double(c.beta) << "\n";
    os << "sign = " << c.sign << "\n";
    os << "particles = " << c.particles << "\n";
    os << "dt = " << format_double(c.dt) << "\n";
    os << "t_final = " << format_double(c.tFinal) << "\n";
    os << "record_times = ";
    for (std::size_t i = 0; i < c.recordTimes.size(); ++i)
        os << (i ? ", " : "") << format_double(c.recordTimes[i]);
    os << "\n";
    os << "grid_size = " << c.gridSize << "\n";
    os << "grid_halfwidth = " << format_double(c.gridHalfWidth) << "\n";
    os << "truncation = " << c.truncation << "\n";
    os << "replicas = " << c.replicas << "\n";
    os << "seed = " << c.seed << "\n";
    if (includeRuntime) os << "threads = " << c.threads << "\n";
    os << "domain = " << c.domain << "\n";
    os << "potential = " << c.potential << "\n";
    os << "interaction = " << c.interaction << "\n";
    os << "line_kernel = " << c.lineKernel << "\n";
    os << "per_mode = " << (c.perMode ? "true" : "false") << "\n";
    os << "emit_matrices = " << (c.emitMatrices ? "true" : "false") << "\n";
    os << "z_threshold = " << format_double(c.zThreshold) << "\n";
    os << "volterra_t = " << format_double(c.volterraT) << "\n";
    os << "volterra_dt = " << format_double(c.volterraDt) << "\n";
    os << "volterra_paths = " << c.volterraPaths << "\n";
    os << "damping = " << format_double(c.damping) << "\n";
    os << "fp_tol = " << format_double(c.fpTol) << "\n";
    os << "max_iter = " << c.maxIter << "\n";
    return os.str();
}

} // namespace

std::string serialize_config(const RunConfig& config) {
    return serialize_impl(config, true);
}

std::string experiment_echo(const RunConfig& config) {
    return serialize_impl(config, false);
}

} // namespace fluct
