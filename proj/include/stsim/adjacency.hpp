#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stsim/scenario.hpp"
#include "stsim/validation.hpp"

namespace stsim {

/// N x N matrix, entry [s][t] = base weight of directed edge s->t.
/// The coupling sum for node i reads column i.
struct BaseAdjacency {
    std::vector<std::vector<double>> matrix;

    std::size_t size() const { return matrix.size(); }
    double at(int source, int target) const;

    bool operator==(const BaseAdjacency&) const = default;
};

struct EdgeModulation {
    double multiplier = 1.0;
    std::string description;

    bool operator==(const EdgeModulation&) const = default;
};

struct ModulationPattern {
    TimeRange time_range;
    std::string description;
    std::map<std::string, EdgeModulation> edge_modulations;  // key "s->t"

    bool operator==(const ModulationPattern&) const = default;
};

struct TimeModulation {
    std::vector<ModulationPattern> patterns;

    bool operator==(const TimeModulation&) const = default;
};

/// Parsed form of the adjacency agent's document: modulation rules plus the
/// optional explicit base matrix.
struct ModulationDocument {
    TimeModulation modulation;
    std::optional<BaseAdjacency> base_adjacency;

    bool operator==(const ModulationDocument&) const = default;
};

ModulationDocument parse_modulation(const nlohmann::json& doc);
ModulationDocument parse_modulation_text(const std::string& text);
nlohmann::json serialize_modulation(const ModulationDocument& doc);

/// Base weight 0.1 on every scenario edge (the system-side default used
/// when a document does not carry base_adjacency).
BaseAdjacency default_base_adjacency(const StructuredScenario& s);

/// 1.0 outside every pattern window; the maximum multiplier across covering
/// patterns otherwise (overlaps intensify, they do not stack).
double multiplier_at(const TimeModulation& m, std::pair<int, int> edge,
                     std::int64_t t);

/// base[src][tgt] * multiplier_at(...); zero wherever the base entry is zero.
double effective_weight(const BaseAdjacency& b, const TimeModulation& m,
                        std::pair<int, int> edge, std::int64_t t);

/// Checks modulated edges against the scenario and multipliers against the
/// band implied by the matching scenario modulation's effect
/// (strong: 10-20, moderate: 5-10).
ValidationReport validate_modulation(const TimeModulation& m,
                                     const StructuredScenario& s);

/// Base-matrix shape rules: zero diagonal, nonzero entries exactly on
/// scenario edges.
ValidationReport validate_base_adjacency(const BaseAdjacency& b,
                                         const StructuredScenario& s);

}  // namespace stsim
