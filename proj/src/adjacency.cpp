#include "stsim/adjacency.hpp"

#include <algorithm>
#include <sstream>

#include "stsim/errors.hpp"

namespace stsim {
namespace {

using nlohmann::json;

std::string edge_key(int s, int t) {
    return std::to_string(s) + "->" + std::to_string(t);
}

std::pair<int, int> split_edge_key(const std::string& key, const std::string& path) {
    const auto arrow = key.find("->");
    if (arrow == std::string::npos) {
        throw ParseError(path, "EDGE-KEY", "expected 's->t', got '" + key + "'");
    }
    try {
        return {std::stoi(key.substr(0, arrow)), std::stoi(key.substr(arrow + 2))};
    } catch (const std::exception&) {
        throw ParseError(path, "EDGE-KEY", "cannot parse '" + key + "'");
    }
}

// Inclusive raw window [start, end_raw]; modulation windows are clipped by
// the simulation horizon, not here.
bool window_covers(const TimeRange& r, std::int64_t t) {
    return t >= r.start && t <= r.end_raw;
}

}  // namespace

double BaseAdjacency::at(int source, int target) const {
    if (source < 0 || target < 0 || source >= static_cast<int>(matrix.size()) ||
        target >= static_cast<int>(matrix.size())) {
        throw IndexError("adjacency index " + edge_key(source, target) +
                         " outside " + std::to_string(matrix.size()) + "x" +
                         std::to_string(matrix.size()) + " matrix");
    }
    return matrix[source][target];
}

ModulationDocument parse_modulation(const json& doc) {
    if (!doc.is_object()) {
        throw ParseError("document", "JSON", "modulation document must be an object");
    }
    ModulationDocument out;
    const json* tm = &doc;
    if (doc.contains("time_modulation")) tm = &doc["time_modulation"];
    if (!tm->contains("patterns") || !(*tm)["patterns"].is_array()) {
        throw ParseError("time_modulation", "MISSING-FIELD",
                         "missing 'patterns' array");
    }
    const json& patterns = (*tm)["patterns"];
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        const std::string path = "time_modulation.patterns[" + std::to_string(i) + "]";
        const json& pj = patterns[i];
        ModulationPattern p;
        if (!pj.contains("time_range") || !pj["time_range"].is_array() ||
            pj["time_range"].size() != 2) {
            throw ParseError(path + ".time_range", "TIME-RANGE",
                             "expected [start, end]");
        }
        p.time_range = {pj["time_range"][0].get<std::int64_t>(),
                        pj["time_range"][1].get<std::int64_t>()};
        if (p.time_range.start < 0 || p.time_range.end_raw < p.time_range.start) {
            throw ParseError(path + ".time_range", "TIME-RANGE", "range is not ordered");
        }
        p.description = pj.value("description", std::string{});
        if (!pj.contains("edge_modulations") || !pj["edge_modulations"].is_object()) {
            throw ParseError(path, "MISSING-FIELD", "missing 'edge_modulations' map");
        }
        for (const auto& [key, body] : pj["edge_modulations"].items()) {
            split_edge_key(key, path + ".edge_modulations");  // shape check
            EdgeModulation em;
            if (!body.contains("multiplier") || !body["multiplier"].is_number()) {
                throw ParseError(path + ".edge_modulations." + key, "MULTIPLIER",
                                 "missing numeric 'multiplier'");
            }
            em.multiplier = body["multiplier"].get<double>();
            if (!(em.multiplier > 0.0)) {
                throw ParseError(path + ".edge_modulations." + key, "MULTIPLIER",
                                 "multiplier must be > 0");
            }
            em.description = body.value("description", std::string{});
            p.edge_modulations[key] = std::move(em);
        }
        out.modulation.patterns.push_back(std::move(p));
    }
    if (doc.contains("base_adjacency") && !doc["base_adjacency"].is_null()) {
        const json& bj = doc["base_adjacency"];
        if (!bj.is_array()) {
            throw ParseError("base_adjacency", "TYPE", "expected a matrix");
        }
        BaseAdjacency base;
        for (std::size_t r = 0; r < bj.size(); ++r) {
            if (!bj[r].is_array() || bj[r].size() != bj.size()) {
                throw ParseError("base_adjacency", "SHAPE", "matrix must be square");
            }
            std::vector<double> row;
            for (const auto& v : bj[r]) row.push_back(v.get<double>());
            base.matrix.push_back(std::move(row));
        }
        out.base_adjacency = std::move(base);
    }
    return out;
}

ModulationDocument parse_modulation_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError("document", "JSON", e.what());
    }
    return parse_modulation(doc);
}

nlohmann::json serialize_modulation(const ModulationDocument& doc) {
    json patterns = json::array();
    for (const auto& p : doc.modulation.patterns) {
        json mods = json::object();
        for (const auto& [key, em] : p.edge_modulations) {
            mods[key] = {{"multiplier", em.multiplier}, {"description", em.description}};
        }
        patterns.push_back({{"time_range", {p.time_range.start, p.time_range.end_raw}},
                            {"description", p.description},
                            {"edge_modulations", mods}});
    }
    json out = {{"time_modulation", {{"patterns", patterns}}}};
    if (doc.base_adjacency) {
        json rows = json::array();
        for (const auto& row : doc.base_adjacency->matrix) rows.push_back(row);
        out["base_adjacency"] = rows;
    }
    return out;
}

BaseAdjacency default_base_adjacency(const StructuredScenario& s) {
    BaseAdjacency base;
    const std::size_t n = s.nodes.size();
    base.matrix.assign(n, std::vector<double>(n, 0.0));
    for (const auto& e : s.edges) {
        const int sp = s.node_position(e.source);
        const int tp = s.node_position(e.target);
        if (sp >= 0 && tp >= 0) base.matrix[sp][tp] = 0.1;
    }
    return base;
}

double multiplier_at(const TimeModulation& m, std::pair<int, int> edge,
                     std::int64_t t) {
    const std::string key = edge_key(edge.first, edge.second);
    double best = 1.0;
    bool covered = false;
    for (const auto& p : m.patterns) {
        if (!window_covers(p.time_range, t)) continue;
        auto it = p.edge_modulations.find(key);
        if (it == p.edge_modulations.end()) continue;
        best = covered ? std::max(best, it->second.multiplier) : it->second.multiplier;
        covered = true;
    }
    return covered ? best : 1.0;
}

double effective_weight(const BaseAdjacency& b, const TimeModulation& m,
                        std::pair<int, int> edge, std::int64_t t) {
    const double base = b.at(edge.first, edge.second);
    if (base == 0.0) return 0.0;
    return base * multiplier_at(m, edge, t);
}

ValidationReport validate_modulation(const TimeModulation& m,
                                     const StructuredScenario& s) {
    ValidationReport report;
    for (std::size_t i = 0; i < m.patterns.size(); ++i) {
        const auto& p = m.patterns[i];
        const std::string where = "time_modulation.patterns[" + std::to_string(i) + "]";
        for (const auto& [key, em] : p.edge_modulations) {
            const auto edge = split_edge_key(key, where);
            if (!s.find_edge(edge.first, edge.second)) {
                report.add("UNKNOWN-EDGE", where + "." + key,
                           "modulated edge " + key + " is not a scenario edge",
                           "modulate only declared edges");
                continue;
            }
            // Band check against the matching scenario modulation window.
            const ModulationSpec* match = nullptr;
            for (const auto& spec : s.adjacency_modulation) {
                if (spec.time_period != p.time_range) continue;
                if (std::find(spec.applies_to.begin(), spec.applies_to.end(), edge) !=
                    spec.applies_to.end()) {
                    match = &spec;
                    break;
                }
            }
            if (!match) {
                report.warn("UNMATCHED-PATTERN", where + "." + key,
                            "no scenario modulation covers edge " + key +
                                " over " + p.time_range.text(),
                            "derive patterns from the scenario's adjacency_modulation");
                continue;
            }
            const double lo = match->effect == ModulationEffect::strong ? 10.0 : 5.0;
            const double hi = match->effect == ModulationEffect::strong ? 20.0 : 10.0;
            if (em.multiplier < lo || em.multiplier > hi) {
                std::ostringstream detail;
                detail << "multiplier " << em.multiplier << " outside the "
                       << to_string(match->effect) << " band [" << lo << ", " << hi << "]";
                report.add("MULTIPLIER-BAND", where + "." + key, detail.str(),
                           "pick a multiplier inside the effect band");
            }
        }
        // Overlapping windows on one edge intensify via max; flag them.
        for (std::size_t j = i + 1; j < m.patterns.size(); ++j) {
            const auto& q = m.patterns[j];
            const bool overlap = p.time_range.start <= q.time_range.end_raw &&
                                 q.time_range.start <= p.time_range.end_raw;
            if (!overlap) continue;
            for (const auto& [key, em] : p.edge_modulations) {
                if (q.edge_modulations.count(key)) {
                    report.warn("OVERLAP", where + "." + key,
                                "edge " + key + " is modulated by overlapping windows " +
                                    p.time_range.text() + " and " + q.time_range.text() +
                                    "; the maximum multiplier applies",
                                "stagger the windows or merge the patterns");
                }
            }
        }
    }
    return report;
}

ValidationReport validate_base_adjacency(const BaseAdjacency& b,
                                         const StructuredScenario& s) {
    ValidationReport report;
    const std::size_t n = s.nodes.size();
    if (b.size() != n) {
        report.add("BASE-SHAPE", "base_adjacency",
                   "matrix is " + std::to_string(b.size()) + "x" +
                       std::to_string(b.size()) + " but the scenario has " +
                       std::to_string(n) + " nodes",
                   "emit one row and column per node");
        return report;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (b.matrix[i][i] != 0.0) {
            report.add("BASE-DIAGONAL", "base_adjacency[" + std::to_string(i) + "]",
                       "diagonal entries must be zero", "zero the self-weight");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const int si = s.nodes[i].id;
            const int tj = s.nodes[j].id;
            const bool is_edge = s.find_edge(si, tj) != nullptr;
            const bool nonzero = b.matrix[i][j] != 0.0;
            if (nonzero && !is_edge) {
                report.add("BASE-EDGES", "base_adjacency[" + edge_key(si, tj) + "]",
                           "nonzero weight on a non-edge", "zero entries off the edge set");
            } else if (!nonzero && is_edge) {
                report.add("BASE-EDGES", "base_adjacency[" + edge_key(si, tj) + "]",
                           "scenario edge has zero base weight", "assign a base weight");
            }
        }
    }
    return report;
}

}  // namespace stsim
