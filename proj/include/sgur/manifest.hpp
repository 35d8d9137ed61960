#ifndef SGUR_MANIFEST_HPP
#define SGUR_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace sgur {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Reproducibility record written next to every command's outputs. Inputs
// carry content checksums so cached results can be trusted; outputs list
// every file the command emitted (the manifest itself excepted).
struct RunManifest {
    std::string command_line;
    std::string tool_version;
    nlohmann::json config = nlohmann::json::object();
    std::vector<std::pair<std::string, std::string>> inputs;  // (path, sha256)
    std::vector<std::string> outputs;
    double duration_seconds = 0.0;

    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path);
    nlohmann::json to_json() const;
    void write(const std::filesystem::path& path) const;
};

}

#endif
