#pragma once

#include <stdexcept>
#include <string>

namespace stsim {

/// Malformed or schema-violating input document. `where()` is a JSON-ish
/// path into the offending document, `rule()` a stable rule identifier.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string path, std::string rule, const std::string& detail)
        : std::runtime_error(path + ": [" + rule + "] " + detail),
          path_(std::move(path)),
          rule_(std::move(rule)) {}

    const std::string& where() const noexcept { return path_; }
    const std::string& rule() const noexcept { return rule_; }

private:
    std::string path_;
    std::string rule_;
};

/// Unknown node id, out-of-range matrix index, broken edge chain.
class IndexError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A parameter required by the active drift type is absent at every layer
/// of the hierarchy, or is singular (logistic baseline = 0).
class ResolutionError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Simulation precondition breach (inputs failed deterministic validation).
class ValidationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Simulation state left the finite/bounded envelope.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int node, double step, const std::string& detail)
        : std::runtime_error("node " + std::to_string(node) + " at step " +
                             std::to_string(step) + ": " + detail),
          node_(node),
          step_(step) {}

    int node() const noexcept { return node_; }
    double step() const noexcept { return step_; }

private:
    int node_;
    double step_;
};

/// Prompt template problems: unknown template id or missing placeholder.
class TemplateError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// No parseable JSON payload in a model response. Carries the raw text.
class ExtractionError : public std::runtime_error {
public:
    explicit ExtractionError(std::string raw)
        : std::runtime_error("no JSON payload found in response"),
          raw_(std::move(raw)) {}

    const std::string& raw_response() const noexcept { return raw_; }

private:
    std::string raw_;
};

/// Chat backend failed after bounded retries.
class BackendError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Pipeline exhausted its round limit without judge approval.
class SynthesisError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace stsim
