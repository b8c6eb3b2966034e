#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

namespace stsim {

/// One chat exchange. Implementations may fail transiently; each encapsulates
/// its own bounded retry policy so callers see either a response or a
/// BackendError.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;

    virtual std::string send(const std::string& prompt,
                             const std::vector<std::string>& attachments = {}) = 0;

    /// Whether image attachments are meaningful to this backend.
    virtual bool supports_images() const { return false; }

    /// Backends that replay ordered responses must be called one at a time.
    virtual bool single_flight() const { return false; }
};

/// Replays a directory of response files in lexicographic filename order,
/// ignoring the prompt. Deterministic given its transcript.
class ScriptedBackend : public ChatBackend {
public:
    explicit ScriptedBackend(const std::filesystem::path& dir);

    std::string send(const std::string& prompt,
                     const std::vector<std::string>& attachments = {}) override;
    bool single_flight() const override { return true; }

    std::size_t consumed() const { return next_; }
    std::size_t total() const { return responses_.size(); }

private:
    std::vector<std::string> responses_;
    std::size_t next_ = 0;
    std::mutex mutex_;
};

struct HttpBackendConfig {
    std::string base_url;   // e.g. "http://localhost:8318"
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string api_key;
    int max_attempts = 3;
    int backoff_ms = 250;   // doubles per retry
};

/// Chat-completion client over HTTP. Connection failures, 429 and 5xx
/// responses are retried with exponential backoff up to max_attempts.
class HttpChatBackend : public ChatBackend {
public:
    explicit HttpChatBackend(HttpBackendConfig cfg);

    std::string send(const std::string& prompt,
                     const std::vector<std::string>& attachments = {}) override;

    /// Built from STSIM_BACKEND_URL / STSIM_BACKEND_MODEL / STSIM_BACKEND_KEY.
    static HttpBackendConfig config_from_env();

private:
    HttpBackendConfig cfg_;
};

}  // namespace stsim
