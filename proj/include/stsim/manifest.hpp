#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace stsim {

inline constexpr const char* kToolVersion = "0.1.0";

std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);
std::string digest_file(const std::filesystem::path& path);

/// Provenance record written next to every artifact-producing command's
/// outputs. Identical runs differ only in wall_time_ms.
struct RunManifest {
    std::string tool_version = kToolVersion;
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs;   // path, digest
    std::vector<std::pair<std::string, std::string>> outputs;  // path, digest
    double wall_time_ms = 0.0;

    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path);
    nlohmann::json to_json() const;
};

/// Writes via a temporary sibling and renames into place, so failures never
/// leave partial output files.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace stsim
