#include "stsim/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stsim {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const char c : data) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string fnv1a64_hex(std::string_view data) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream content;
    content << in.rdbuf();
    return content.str();
}

std::string digest_file(const std::filesystem::path& path) {
    return fnv1a64_hex(read_file(path));
}

void RunManifest::add_input(const std::filesystem::path& path) {
    inputs.emplace_back(path.string(), digest_file(path));
}

void RunManifest::add_output(const std::filesystem::path& path) {
    outputs.emplace_back(path.string(), digest_file(path));
}

nlohmann::json RunManifest::to_json() const {
    auto entries = [](const std::vector<std::pair<std::string, std::string>>& list) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& [path, digest] : list) {
            out.push_back({{"path", path}, {"digest", digest}});
        }
        return out;
    };
    return {{"tool_version", tool_version},
            {"command", command},
            {"config", config},
            {"seed", seed},
            {"inputs", entries(inputs)},
            {"outputs", entries(outputs)},
            {"wall_time_ms", wall_time_ms}};
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << content;
        if (!out.good()) {
            throw std::runtime_error("short write to " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace stsim
