#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stsim/adjacency.hpp"
#include "stsim/params.hpp"
#include "stsim/scenario.hpp"

namespace stsim {

enum class QaCategory { temporal, spatial, spatial_temporal };

std::string to_string(QaCategory c);

struct AlignQuestion {
    QaCategory category = QaCategory::temporal;
    std::string template_key;
    std::string question;
    std::string answer;
    std::vector<int> node_scope;
    std::optional<TimeRange> time_range;

    bool operator==(const AlignQuestion&) const = default;
};

/// Numeric answer rendering: up to 4 significant digits, trailing zeros
/// trimmed.
std::string format_answer_number(double v);

/// Per node, per drift pattern: one question per matched template key
/// (drift_type, baseline, kappa, sigma, lambda, diffusion_shape), plus the
/// A/omega/phi questions for sinusoidal patterns. Node-major, template-key
/// order.
std::vector<AlignQuestion> gen_temporal_qa(const SdeParameters& p,
                                           const StructuredScenario& s);

/// edge_relationship and indirect_connection for every ordered node pair,
/// self-pairs included: exactly 2 * N^2 questions.
std::vector<AlignQuestion> gen_spatial_qa(const StructuredScenario& s);

/// One node_type question per node, one edge_lag per edge, and per
/// modulation (pattern, edge) entry a multiplier plus an effective-coupling
/// question: N + E + 2M questions.
std::vector<AlignQuestion> gen_spatiotemporal_qa(const StructuredScenario& s,
                                                 const SdeParameters& p,
                                                 const BaseAdjacency& b,
                                                 const TimeModulation& m);

/// One JSON-lines record: {category, template_key, question, answer,
/// scenario_id}.
nlohmann::json qa_record(const AlignQuestion& q, const std::string& scenario_id);

}  // namespace stsim
