#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace stsim {

struct Violation {
    std::string rule_id;   // stable identifier, e.g. "TIMING", "KAPPA-RANGE"
    std::string location;  // node/edge/field the rule fired on
    std::string detail;
    std::string suggestion;

    bool operator==(const Violation&) const = default;
};

/// Outcome of a deterministic rule check. Hard violations block approval;
/// warnings are advisory and surface in judge feedback only.
struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<Violation> warnings;

    bool approved() const { return violations.empty(); }

    void add(std::string rule_id, std::string location, std::string detail,
             std::string suggestion = "") {
        violations.push_back({std::move(rule_id), std::move(location),
                              std::move(detail), std::move(suggestion)});
    }
    void warn(std::string rule_id, std::string location, std::string detail,
              std::string suggestion = "") {
        warnings.push_back({std::move(rule_id), std::move(location),
                            std::move(detail), std::move(suggestion)});
    }

    void merge(const ValidationReport& other) {
        violations.insert(violations.end(), other.violations.begin(),
                          other.violations.end());
        warnings.insert(warnings.end(), other.warnings.begin(),
                        other.warnings.end());
    }

    /// Judge-1 wire shape: {approved, issues:[{type, field, problem, suggestion}]}.
    nlohmann::json to_json() const {
        nlohmann::json issues = nlohmann::json::array();
        for (const auto& v : violations) {
            issues.push_back({{"type", v.rule_id},
                              {"field", v.location},
                              {"problem", v.detail},
                              {"suggestion", v.suggestion}});
        }
        return {{"approved", approved()}, {"issues", issues}};
    }
};

}  // namespace stsim
