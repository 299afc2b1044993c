#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fluct {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// %.17g with '.' decimal separator; CSV cells and JSON-adjacent text share
// this formatting so reruns diff byte-for-byte.
std::string format_number(double v);

// FNV-1a 64-bit content hash, hex-encoded.
std::string content_hash(const std::string& text);

struct OutputFile {
    std::string name;    // relative to the output directory
    std::string content; // final bytes, '\n' line endings
};

struct RunOutputs {
    nlohmann::ordered_json summary; // written as summary.json
    std::vector<OutputFile> files;
};

// Write all files plus summary.json (which lists the manifest); returns the
// manifest of written names.
std::vector<std::string> write_outputs(RunOutputs& outputs,
                                       const std::filesystem::path& dir);

// CSV assembly: fixed header, rows of %.17g cells.
std::string csv_table(const std::string& header,
                      const std::vector<std::vector<double>>& rows);

} // namespace fluct
