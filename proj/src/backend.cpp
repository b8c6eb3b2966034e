#include "stsim/backend.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include <httplib.h>

#include "stsim/errors.hpp"

namespace stsim {

ScriptedBackend::ScriptedBackend(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw BackendError("scripted backend directory not found: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        std::ostringstream content;
        content << in.rdbuf();
        responses_.push_back(content.str());
    }
    if (responses_.empty()) {
        throw BackendError("scripted backend directory is empty: " + dir.string());
    }
}

std::string ScriptedBackend::send(const std::string&, const std::vector<std::string>&) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (next_ >= responses_.size()) {
        throw BackendError("scripted transcript exhausted after " +
                           std::to_string(responses_.size()) + " responses");
    }
    return responses_[next_++];
}

HttpChatBackend::HttpChatBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.base_url.empty()) {
        throw BackendError("live backend requires a base URL");
    }
}

HttpBackendConfig HttpChatBackend::config_from_env() {
    HttpBackendConfig cfg;
    if (const char* url = std::getenv("STSIM_BACKEND_URL")) cfg.base_url = url;
    if (const char* model = std::getenv("STSIM_BACKEND_MODEL")) cfg.model = model;
    if (const char* key = std::getenv("STSIM_BACKEND_KEY")) cfg.api_key = key;
    return cfg;
}

std::string HttpChatBackend::send(const std::string& prompt,
                                  const std::vector<std::string>&) {
    nlohmann::json body = {
        {"model", cfg_.model},
        {"messages", {{{"role", "user"}, {"content", prompt}}}},
    };
    const std::string payload = body.dump();

    std::string last_failure;
    int backoff = cfg_.backoff_ms;
    for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
        httplib::Client client(cfg_.base_url);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(120, 0);
        httplib::Headers headers;
        if (!cfg_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + cfg_.api_key);
        }
        auto res = client.Post(cfg_.path, headers, payload, "application/json");
        if (res && res->status >= 200 && res->status < 300) {
            try {
                const auto doc = nlohmann::json::parse(res->body);
                return doc.at("choices").at(0).at("message").at("content")
                    .get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                throw BackendError(std::string("malformed chat response: ") + e.what());
            }
        }
        if (res && res->status >= 400 && res->status < 500 && res->status != 429) {
            throw BackendError("backend rejected request with status " +
                               std::to_string(res->status) + ": " + res->body);
        }
        last_failure = res ? "status " + std::to_string(res->status)
                           : "connection failed";
        if (attempt < cfg_.max_attempts) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff *= 2;
        }
    }
    throw BackendError("backend failed after " + std::to_string(cfg_.max_attempts) +
                       " attempts (" + last_failure + ")");
}

}  // namespace stsim
