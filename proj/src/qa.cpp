#include "stsim/qa.hpp"

#include <algorithm>
#include <cstdio>

#include "stsim/errors.hpp"

namespace stsim {
namespace {

std::string node_text(int id) { return std::to_string(id); }

std::string edge_text(int s, int t) {
    return std::to_string(s) + "->" + std::to_string(t);
}

// Walk of length >= 2: some direct successor of src still has to travel at
// least one more edge to tgt.
bool indirect_connection(const StructuredScenario& s, int src, int tgt) {
    for (const auto& e : s.edges) {
        if (e.source != src) continue;
        if (reachable(s, e.target, tgt)) return true;
    }
    return false;
}

}  // namespace

std::string to_string(QaCategory c) {
    switch (c) {
        case QaCategory::temporal: return "temporal";
        case QaCategory::spatial: return "spatial";
        case QaCategory::spatial_temporal: return "spatial_temporal";
    }
    return "temporal";
}

std::string format_answer_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::vector<AlignQuestion> gen_temporal_qa(const SdeParameters& p,
                                           const StructuredScenario& s) {
    std::vector<AlignQuestion> out;
    for (const auto& node : s.nodes) {
        // The node's resolution timeline: its override windows, or one
        // whole-horizon window when it has none.
        std::vector<TimeRange> windows;
        if (auto it = p.node_overrides.find(node.id);
            it != p.node_overrides.end() && it->second.drift_patterns &&
            !it->second.drift_patterns->empty()) {
            for (const auto& cfg : *it->second.drift_patterns) {
                windows.push_back(cfg.time_range);
            }
        } else {
            windows.push_back({0, s.seq_len});
        }
        for (const auto& window : windows) {
            const std::int64_t probe = window.start;
            const ResolvedParams rp = resolve_node_params(p, s, node.id, probe);
            const std::string range = window.text();

            auto push = [&](const char* key, std::string question, std::string answer) {
                AlignQuestion q;
                q.category = QaCategory::temporal;
                q.template_key = key;
                q.question = std::move(question);
                q.answer = std::move(answer);
                q.node_scope = {node.id};
                q.time_range = window;
                out.push_back(std::move(q));
            };
            auto ask = [&](const char* key, const std::string& phrase,
                           const std::string& answer) {
                push(key,
                     "What is the " + phrase + " of node " + node_text(node.id) +
                         " during the time range " + range + "?",
                     answer);
            };

            ask("drift_type", "evolution pattern", to_string(rp.drift_type));
            if (auto v = resolve_numeric_field(p, s, node.id, probe, "baseline")) {
                ask("baseline", "long-term baseline value", format_answer_number(*v));
            }
            if (auto v = resolve_numeric_field(p, s, node.id, probe, "kappa")) {
                ask("kappa", "mean reversion speed (kappa)", format_answer_number(*v));
            }
            if (auto v = resolve_numeric_field(p, s, node.id, probe, "sigma")) {
                ask("sigma", "random fluctuation intensity (sigma)",
                    format_answer_number(*v));
            }
            if (auto v = resolve_numeric_field(p, s, node.id, probe, "lambda")) {
                ask("lambda", "coupling strength (lambda)", format_answer_number(*v));
            }
            if (auto shape = resolve_shape_field(p, s, node.id, probe)) {
                ask("diffusion_shape", "diffusion shape (diffusion_shape)",
                    to_string(*shape));
            }
            if (rp.drift_type == Behavior::sinusoidal) {
                ask("sinusoidal_A", "sinusoidal amplitude (A)",
                    format_answer_number(rp.A));
                ask("sinusoidal_omega", "sinusoidal frequency (omega)",
                    format_answer_number(rp.omega));
                ask("sinusoidal_phi", "sinusoidal phase (phi)",
                    format_answer_number(rp.phi));
            }
        }
    }
    return out;
}

std::vector<AlignQuestion> gen_spatial_qa(const StructuredScenario& s) {
    std::vector<AlignQuestion> out;
    for (const auto& src : s.nodes) {
        for (const auto& tgt : s.nodes) {
            AlignQuestion direct;
            direct.category = QaCategory::spatial;
            direct.template_key = "edge_relationship";
            direct.question = "Is there a direct connection from node " +
                              node_text(src.id) + " to node " + node_text(tgt.id) + "?";
            direct.answer = s.find_edge(src.id, tgt.id) ? "Yes" : "No";
            direct.node_scope = {src.id, tgt.id};
            out.push_back(std::move(direct));

            AlignQuestion indirect;
            indirect.category = QaCategory::spatial;
            indirect.template_key = "indirect_connection";
            indirect.question =
                "Is there an indirect path (through one or more intermediate nodes) "
                "from node " +
                node_text(src.id) + " to node " + node_text(tgt.id) + "?";
            indirect.answer = indirect_connection(s, src.id, tgt.id) ? "Yes" : "No";
            indirect.node_scope = {src.id, tgt.id};
            out.push_back(std::move(indirect));
        }
    }
    return out;
}

std::vector<AlignQuestion> gen_spatiotemporal_qa(const StructuredScenario& s,
                                                 const SdeParameters& p,
                                                 const BaseAdjacency& b,
                                                 const TimeModulation& m) {
    (void)p;
    std::vector<AlignQuestion> out;
    for (const auto& node : s.nodes) {
        AlignQuestion q;
        q.category = QaCategory::spatial_temporal;
        q.template_key = "node_type";
        q.question = "What is the type of node " + node_text(node.id) +
                     "? demand_source or propagation?";
        q.answer = to_string(node.node_type);
        q.node_scope = {node.id};
        out.push_back(std::move(q));
    }
    for (const auto& e : s.edges) {
        AlignQuestion q;
        q.category = QaCategory::spatial_temporal;
        q.template_key = "edge_lag";
        q.question = "What is the time lag between node " + node_text(e.source) +
                     " and node " + node_text(e.target) + "?";
        q.answer = std::to_string(e.time_lag);
        q.node_scope = {e.source, e.target};
        out.push_back(std::move(q));
    }
    for (const auto& pattern : m.patterns) {
        for (const auto& [key, em] : pattern.edge_modulations) {
            const auto arrow = key.find("->");
            const int src = std::stoi(key.substr(0, arrow));
            const int tgt = std::stoi(key.substr(arrow + 2));
            if (!s.find_edge(src, tgt)) {
                throw ValidationError("modulation references unknown edge " + key);
            }
            const std::string range = pattern.time_range.text();

            AlignQuestion mult;
            mult.category = QaCategory::spatial_temporal;
            mult.template_key = "edge_modulation";
            mult.question = "What is the modulation multiplier (multiplier) of edge " +
                            edge_text(src, tgt) + " during the time range " + range + "?";
            mult.answer = format_answer_number(em.multiplier);
            mult.node_scope = {src, tgt};
            mult.time_range = pattern.time_range;
            out.push_back(std::move(mult));

            AlignQuestion coupling;
            coupling.category = QaCategory::spatial_temporal;
            coupling.template_key = "effective_coupling_strength";
            coupling.question = "What is the effective coupling strength of edge " +
                                edge_text(src, tgt) + " during the time range " + range +
                                "?";
            const int src_pos = s.node_position(src);
            const int tgt_pos = s.node_position(tgt);
            coupling.answer =
                format_answer_number(em.multiplier * b.at(src_pos, tgt_pos));
            coupling.node_scope = {src, tgt};
            coupling.time_range = pattern.time_range;
            out.push_back(std::move(coupling));
        }
    }
    return out;
}

nlohmann::json qa_record(const AlignQuestion& q, const std::string& scenario_id) {
    return {{"category", to_string(q.category)},
            {"template_key", q.template_key},
            {"question", q.question},
            {"answer", q.answer},
            {"scenario_id", scenario_id}};
}

}  // namespace stsim
