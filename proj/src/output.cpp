#include "fluct/output.hpp"

#include <cstdio>
#include <fstream>

namespace fluct {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string content_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string csv_table(const std::string& header,
                      const std::vector<std::vector<double>>& rows) {
    std::string out = header;
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_number(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::vector<std::string> write_outputs(RunOutputs& outputs,
                                       const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());

    auto writeFile = [&](const std::string& name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw IoError("cannot open " + (dir / name).string());
        out << content;
        if (!out) throw IoError("write failed for " + (dir / name).string());
    };

    std::vector<std::string> manifest;
    for (const auto& f : outputs.files) {
        writeFile(f.name, f.content);
        manifest.push_back(f.name);
    }
    manifest.push_back("summary.json");
    outputs.summary["files"] = manifest;
    writeFile("summary.json", outputs.summary.dump(2) + "\n");
    return manifest;
}

} // namespace fluct
