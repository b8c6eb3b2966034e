#include "stsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "stsim/duration.hpp"
#include "stsim/errors.hpp"

namespace stsim {
namespace {

using nlohmann::json;

const json& require_field(const json& j, const char* key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw ParseError(path, "MISSING-FIELD", std::string("missing '") + key + "'");
    }
    return *it;
}

std::string require_string(const json& j, const char* key, const std::string& path) {
    const json& v = require_field(j, key, path);
    if (!v.is_string()) {
        throw ParseError(path + "." + key, "TYPE", "expected a string");
    }
    return v.get<std::string>();
}

std::int64_t require_int(const json& j, const char* key, const std::string& path) {
    const json& v = require_field(j, key, path);
    if (!v.is_number_integer()) {
        throw ParseError(path + "." + key, "TYPE", "expected an integer");
    }
    return v.get<std::int64_t>();
}

double require_number(const json& j, const char* key, const std::string& path) {
    const json& v = require_field(j, key, path);
    if (!v.is_number()) {
        throw ParseError(path + "." + key, "TYPE", "expected a number");
    }
    return v.get<double>();
}

TimeRange parse_time_range_array(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
        !v[1].is_number_integer()) {
        throw ParseError(path, "TIME-RANGE", "expected [start, end] integer pair");
    }
    TimeRange r{v[0].get<std::int64_t>(), v[1].get<std::int64_t>()};
    if (r.start < 0 || r.end_raw < r.start) {
        throw ParseError(path, "TIME-RANGE",
                         "range [" + std::to_string(r.start) + ", " +
                             std::to_string(r.end_raw) + "] is not ordered");
    }
    return r;
}

// Accepts "14-19" text or a [14, 19] array.
TimeRange parse_time_period(const json& v, const std::string& path) {
    if (v.is_array()) return parse_time_range_array(v, path);
    if (!v.is_string()) {
        throw ParseError(path, "TIME-RANGE", "expected 'start-end' text or array");
    }
    const std::string text = v.get<std::string>();
    const auto dash = text.find('-', 1);  // skip a leading sign
    if (dash == std::string::npos) {
        throw ParseError(path, "TIME-RANGE", "expected 'start-end', got '" + text + "'");
    }
    try {
        TimeRange r{std::stoll(text.substr(0, dash)), std::stoll(text.substr(dash + 1))};
        if (r.start < 0 || r.end_raw < r.start) {
            throw ParseError(path, "TIME-RANGE", "range '" + text + "' is not ordered");
        }
        return r;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError(path, "TIME-RANGE", "cannot parse '" + text + "'");
    }
}

std::pair<int, int> parse_edge_key(const std::string& key, const std::string& path) {
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

std::vector<std::pair<int, int>> parse_applies_to(const json& v, const std::string& path) {
    std::vector<std::pair<int, int>> edges;
    if (v.is_string()) {
        // Single key or comma-separated list.
        std::stringstream in(v.get<std::string>());
        std::string token;
        while (std::getline(in, token, ',')) {
            const auto begin = token.find_first_not_of(" \t");
            const auto end = token.find_last_not_of(" \t");
            if (begin == std::string::npos) continue;
            edges.push_back(parse_edge_key(token.substr(begin, end - begin + 1), path));
        }
    } else if (v.is_array()) {
        for (const auto& item : v) {
            if (!item.is_string()) {
                throw ParseError(path, "EDGE-KEY", "expected edge key strings");
            }
            edges.push_back(parse_edge_key(item.get<std::string>(), path));
        }
    } else {
        throw ParseError(path, "EDGE-KEY", "expected edge key or list of keys");
    }
    if (edges.empty()) {
        throw ParseError(path, "EDGE-KEY", "applies_to names no edges");
    }
    return edges;
}

std::string edge_key(int s, int t) {
    return std::to_string(s) + "->" + std::to_string(t);
}

}  // namespace

std::string to_string(NodeType t) {
    return t == NodeType::demand_source ? "demand_source" : "propagation";
}

NodeType node_type_from_string(const std::string& s) {
    if (s == "demand_source") return NodeType::demand_source;
    if (s == "propagation") return NodeType::propagation;
    throw ParseError("type", "NODE-TYPE",
                     "unknown node type '" + s + "' (demand_source|propagation)");
}

std::string to_string(Behavior b) {
    switch (b) {
        case Behavior::mean_reverting: return "mean_reverting";
        case Behavior::sinusoidal: return "sinusoidal";
        case Behavior::constant: return "constant";
        case Behavior::logistic: return "logistic";
    }
    return "mean_reverting";
}

Behavior behavior_from_string(const std::string& s) {
    if (s == "mean_reverting") return Behavior::mean_reverting;
    if (s == "sinusoidal") return Behavior::sinusoidal;
    if (s == "constant") return Behavior::constant;
    if (s == "logistic") return Behavior::logistic;
    throw ParseError("behavior", "BEHAVIOR",
                     "unknown behavior '" + s +
                         "' (mean_reverting|sinusoidal|constant|logistic)");
}

std::string to_string(ModulationEffect e) {
    return e == ModulationEffect::strong ? "strong" : "moderate";
}

ModulationEffect effect_from_string(const std::string& s) {
    if (s == "strong") return ModulationEffect::strong;
    if (s == "moderate") return ModulationEffect::moderate;
    throw ParseError("effect", "EFFECT", "unknown effect '" + s + "' (strong|moderate)");
}

const NodeSpec* StructuredScenario::find_node(int id) const {
    for (const auto& n : nodes) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

const EdgeSpec* StructuredScenario::find_edge(int source, int target) const {
    for (const auto& e : edges) {
        if (e.source == source && e.target == target) return &e;
    }
    return nullptr;
}

int StructuredScenario::node_position(int id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id == id) return static_cast<int>(i);
    }
    return -1;
}

StructuredScenario parse_scenario(const json& doc) {
    if (!doc.is_object()) {
        throw ParseError("document", "JSON", "scenario document must be an object");
    }
    StructuredScenario s;
    s.time_span = require_string(doc, "time_span", "document");
    s.sampling_frequency = require_string(doc, "sampling_frequency", "document");
    s.seq_len = require_int(doc, "seq_len", "document");
    s.variable = require_string(doc, "variable", "document");
    s.domain = doc.value("domain", std::string{});
    s.scenario_id = doc.value("task_id", std::string{});

    const std::int64_t inferred = infer_seq_len(s.time_span, s.sampling_frequency);
    if (s.seq_len != inferred) {
        throw ParseError("document.seq_len", "SEQ-LEN",
                         "seq_len " + std::to_string(s.seq_len) +
                             " does not equal time_span / sampling_frequency = " +
                             std::to_string(inferred));
    }

    // Nodes: ids must be 0..N-1, no gaps or duplicates.
    const json& nodes = require_field(doc, "nodes", "document");
    if (!nodes.is_array() || nodes.empty()) {
        throw ParseError("document.nodes", "NODE-IDS", "expected a non-empty node list");
    }
    std::set<int> seen_ids;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string path = "nodes[" + std::to_string(i) + "]";
        const json& nj = nodes[i];
        NodeSpec n;
        n.id = static_cast<int>(require_int(nj, "id", path));
        try {
            n.node_type = node_type_from_string(require_string(nj, "type", path));
        } catch (const ParseError& e) {
            throw ParseError(path + ".type", e.rule(), e.what());
        }
        n.name = nj.value("name", std::string{});
        n.description = nj.value("description", std::string{});
        if (!seen_ids.insert(n.id).second) {
            throw ParseError(path + ".id", "NODE-IDS",
                             "duplicate node id " + std::to_string(n.id));
        }
        s.nodes.push_back(std::move(n));
    }
    for (int id = 0; id < static_cast<int>(s.nodes.size()); ++id) {
        if (!seen_ids.count(id)) {
            throw ParseError("document.nodes", "NODE-IDS",
                             "node ids must be 0.." +
                                 std::to_string(s.nodes.size() - 1) +
                                 " with no gaps; missing " + std::to_string(id));
        }
    }

    // Edges: endpoints must exist, no self-loops, (source, target) unique.
    std::set<std::pair<int, int>> seen_edges;
    if (auto it = doc.find("edges"); it != doc.end()) {
        if (!it->is_array()) {
            throw ParseError("document.edges", "TYPE", "expected an edge list");
        }
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string path = "edges[" + std::to_string(i) + "]";
            const json& ej = (*it)[i];
            EdgeSpec e;
            e.source = static_cast<int>(require_int(ej, "source", path));
            e.target = static_cast<int>(require_int(ej, "target", path));
            e.relationship = ej.value("relationship", std::string{});
            if (ej.contains("time_lag") && !ej["time_lag"].is_null()) {
                if (!ej["time_lag"].is_number_integer()) {
                    throw ParseError(path + ".time_lag", "TYPE", "expected an integer");
                }
                e.time_lag = ej["time_lag"].get<std::int64_t>();
            }
            if (e.time_lag < 0) {
                throw ParseError(path + ".time_lag", "TIME-LAG",
                                 "time_lag must be non-negative");
            }
            if (!s.find_node(e.source) || !s.find_node(e.target)) {
                throw ParseError(path, "NODE-REF",
                                 "edge " + edge_key(e.source, e.target) +
                                     " names an unknown node");
            }
            if (e.source == e.target) {
                throw ParseError(path, "SELF-LOOP",
                                 "self-loop on node " + std::to_string(e.source));
            }
            if (!seen_edges.insert({e.source, e.target}).second) {
                throw ParseError(path, "DUP-EDGE",
                                 "duplicate edge " + edge_key(e.source, e.target));
            }
            s.edges.push_back(std::move(e));
        }
    }

    // Drift program.
    const json& dp = require_field(doc, "drift_patterns", "document");
    s.drift_patterns.repeat = dp.value("repeat", false);
    if (dp.contains("repeat_period") && !dp["repeat_period"].is_null()) {
        s.drift_patterns.repeat_period = require_int(dp, "repeat_period", "drift_patterns");
        if (*s.drift_patterns.repeat_period < 1) {
            throw ParseError("drift_patterns.repeat_period", "REPEAT",
                             "repeat_period must be positive");
        }
    }
    if (s.drift_patterns.repeat && !s.drift_patterns.repeat_period) {
        throw ParseError("drift_patterns", "REPEAT",
                         "repeat is true but repeat_period is absent");
    }
    if (!s.drift_patterns.repeat) {
        s.drift_patterns.repeat_period.reset();
    }

    std::set<int> drift_ids;
    if (auto it = dp.find("nodes"); it != dp.end()) {
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string path = "drift_patterns.nodes[" + std::to_string(i) + "]";
            const json& nj = (*it)[i];
            NodeDrift nd;
            nd.id = static_cast<int>(require_int(nj, "id", path));
            if (!s.find_node(nd.id)) {
                throw ParseError(path + ".id", "NODE-REF",
                                 "unknown node id " + std::to_string(nd.id));
            }
            if (!drift_ids.insert(nd.id).second) {
                throw ParseError(path + ".id", "DUP-NODE",
                                 "duplicate drift entry for node " + std::to_string(nd.id));
            }
            const json& patterns = require_field(nj, "patterns", path);
            for (std::size_t k = 0; k < patterns.size(); ++k) {
                const std::string ppath = path + ".patterns[" + std::to_string(k) + "]";
                const json& pj = patterns[k];
                PatternSpec p;
                p.time_range = parse_time_range_array(require_field(pj, "time_range", ppath),
                                                      ppath + ".time_range");
                try {
                    p.behavior = behavior_from_string(require_string(pj, "behavior", ppath));
                } catch (const ParseError& e) {
                    throw ParseError(ppath + ".behavior", e.rule(), e.what());
                }
                p.baseline = require_number(pj, "baseline", ppath);
                if (!(p.baseline > 0.0)) {
                    throw ParseError(ppath + ".baseline", "BASELINE",
                                     "baseline must be > 0");
                }
                p.amplitude = pj.value("amplitude", 0.0);
                if (p.amplitude < 0.0) {
                    throw ParseError(ppath + ".amplitude", "AMPLITUDE",
                                     "amplitude must be >= 0");
                }
                if (pj.contains("peak") && !pj["peak"].is_null()) {
                    p.peak = pj["peak"].get<std::int64_t>();
                }
                if (p.behavior == Behavior::sinusoidal) {
                    if (!(p.amplitude > 0.0) || !p.peak) {
                        throw ParseError(ppath, "SINUSOIDAL-PEAK",
                                         "sinusoidal pattern requires amplitude > 0 "
                                         "and a peak step");
                    }
                } else if (p.peak) {
                    throw ParseError(ppath + ".peak", "SINUSOIDAL-PEAK",
                                     "peak is only meaningful for sinusoidal patterns");
                }
                nd.patterns.push_back(std::move(p));
            }
            if (auto vit = nj.find("propagated_variations"); vit != nj.end()) {
                for (std::size_t k = 0; k < vit->size(); ++k) {
                    const std::string vpath =
                        path + ".propagated_variations[" + std::to_string(k) + "]";
                    const json& vj = (*vit)[k];
                    VariationNote v;
                    v.time = vj.value("time", std::string{});
                    v.origin = vj.value("origin", std::string{});
                    v.source = static_cast<int>(require_int(vj, "source", vpath));
                    if (!s.find_node(v.source)) {
                        throw ParseError(vpath + ".source", "NODE-REF",
                                         "unknown node id " + std::to_string(v.source));
                    }
                    if (vj.contains("delay") && !vj["delay"].is_null()) {
                        v.delay = vj["delay"].get<std::string>();
                    }
                    v.description = vj.value("description", std::string{});
                    nd.propagated_variations.push_back(std::move(v));
                }
            }
            s.drift_patterns.per_node.push_back(std::move(nd));
        }
    }

    // Adjacency modulation.
    if (auto it = doc.find("adjacency_modulation"); it != doc.end() && !it->is_null()) {
        const json& patterns = require_field(*it, "patterns", "adjacency_modulation");
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            const std::string path = "adjacency_modulation.patterns[" + std::to_string(i) + "]";
            const json& mj = patterns[i];
            ModulationSpec m;
            m.time_period = parse_time_period(require_field(mj, "time_period", path),
                                              path + ".time_period");
            try {
                m.effect = effect_from_string(require_string(mj, "effect", path));
            } catch (const ParseError& e) {
                throw ParseError(path + ".effect", e.rule(), e.what());
            }
            m.applies_to = parse_applies_to(require_field(mj, "applies_to", path),
                                            path + ".applies_to");
            m.description = mj.value("description", std::string{});
            for (const auto& [src, tgt] : m.applies_to) {
                if (!s.find_edge(src, tgt)) {
                    throw ParseError(path + ".applies_to", "EDGE-REF",
                                     "modulated edge " + edge_key(src, tgt) +
                                         " is not a scenario edge");
                }
            }
            s.adjacency_modulation.push_back(std::move(m));
        }
    }

    // Spatial layout.
    if (auto it = doc.find("spatial_layout"); it != doc.end() && !it->is_null()) {
        for (const auto& [key, value] : it->items()) {
            int id = 0;
            try {
                id = std::stoi(key);
            } catch (const std::exception&) {
                throw ParseError("spatial_layout", "NODE-REF",
                                 "layout key '" + key + "' is not a node id");
            }
            if (!s.find_node(id)) {
                throw ParseError("spatial_layout", "NODE-REF",
                                 "unknown node id " + key);
            }
            s.spatial_layout[id] = {require_number(value, "x", "spatial_layout." + key),
                                    require_number(value, "y", "spatial_layout." + key)};
        }
    }
    return s;
}

StructuredScenario parse_scenario_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError("document", "JSON", e.what());
    }
    return parse_scenario(doc);
}

nlohmann::json serialize_scenario(const StructuredScenario& s) {
    json doc;
    doc["time_span"] = s.time_span;
    doc["sampling_frequency"] = s.sampling_frequency;
    doc["seq_len"] = s.seq_len;
    doc["variable"] = s.variable;

    json nodes = json::array();
    for (const auto& n : s.nodes) {
        nodes.push_back({{"id", n.id},
                         {"type", to_string(n.node_type)},
                         {"name", n.name},
                         {"description", n.description}});
    }
    doc["nodes"] = nodes;

    json edges = json::array();
    for (const auto& e : s.edges) {
        edges.push_back({{"source", e.source},
                         {"target", e.target},
                         {"relationship", e.relationship},
                         {"time_lag", e.time_lag}});
    }
    doc["edges"] = edges;

    json dp;
    dp["repeat"] = s.drift_patterns.repeat;
    if (s.drift_patterns.repeat_period) {
        dp["repeat_period"] = *s.drift_patterns.repeat_period;
    }
    json dnodes = json::array();
    for (const auto& nd : s.drift_patterns.per_node) {
        json patterns = json::array();
        for (const auto& p : nd.patterns) {
            json pj = {{"time_range", {p.time_range.start, p.time_range.end_raw}},
                       {"behavior", to_string(p.behavior)},
                       {"baseline", p.baseline},
                       {"amplitude", p.amplitude}};
            pj["peak"] = p.peak ? json(*p.peak) : json(nullptr);
            patterns.push_back(std::move(pj));
        }
        json variations = json::array();
        for (const auto& v : nd.propagated_variations) {
            json vj = {{"time", v.time},
                       {"origin", v.origin},
                       {"source", v.source},
                       {"description", v.description}};
            if (v.delay) vj["delay"] = *v.delay;
            variations.push_back(std::move(vj));
        }
        dnodes.push_back({{"id", nd.id},
                          {"patterns", patterns},
                          {"propagated_variations", variations}});
    }
    dp["nodes"] = dnodes;
    doc["drift_patterns"] = dp;

    json mpatterns = json::array();
    for (const auto& m : s.adjacency_modulation) {
        json keys = json::array();
        for (const auto& [src, tgt] : m.applies_to) keys.push_back(edge_key(src, tgt));
        mpatterns.push_back({{"time_period", std::to_string(m.time_period.start) + "-" +
                                                 std::to_string(m.time_period.end_raw)},
                             {"effect", to_string(m.effect)},
                             {"applies_to", keys},
                             {"description", m.description}});
    }
    doc["adjacency_modulation"] = {{"patterns", mpatterns}};

    json layout = json::object();
    for (const auto& [id, xy] : s.spatial_layout) {
        layout[std::to_string(id)] = {{"x", xy.first}, {"y", xy.second}};
    }
    doc["spatial_layout"] = layout;
    if (!s.domain.empty()) doc["domain"] = s.domain;
    if (!s.scenario_id.empty()) doc["task_id"] = s.scenario_id;
    return doc;
}

std::int64_t event_arrival_time(std::int64_t start, const std::vector<EdgeSpec>& path) {
    std::int64_t t = start;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0 && path[i].source != path[i - 1].target) {
            throw IndexError("path breaks at edge " + std::to_string(i) + ": " +
                             edge_key(path[i - 1].source, path[i - 1].target) +
                             " does not feed " +
                             edge_key(path[i].source, path[i].target));
        }
        t += path[i].time_lag;
    }
    return t;
}

bool reachable(const StructuredScenario& s, int src, int tgt) {
    if (!s.find_node(src)) {
        throw IndexError("unknown node id " + std::to_string(src));
    }
    if (!s.find_node(tgt)) {
        throw IndexError("unknown node id " + std::to_string(tgt));
    }
    // BFS over directed edges; paths must have length >= 1.
    std::set<int> visited;
    std::deque<int> frontier;
    for (const auto& e : s.edges) {
        if (e.source == src && visited.insert(e.target).second) {
            frontier.push_back(e.target);
        }
    }
    while (!frontier.empty()) {
        const int v = frontier.front();
        frontier.pop_front();
        if (v == tgt) return true;
        for (const auto& e : s.edges) {
            if (e.source == v && visited.insert(e.target).second) {
                frontier.push_back(e.target);
            }
        }
    }
    return visited.count(tgt) > 0;
}

namespace {

// Simple directed paths through one modulation entry's edge set, tracked
// with cumulative lag so cross-entry chains can be timed.
struct EntryPath {
    std::vector<int> nodes;  // visited nodes, in order
    std::int64_t lag_sum = 0;
};

void extend_entry_paths(const std::vector<EdgeSpec>& entry_edges, EntryPath path,
                        std::vector<EntryPath>& out) {
    out.push_back(path);
    const int tail = path.nodes.back();
    for (const auto& e : entry_edges) {
        if (e.source != tail) continue;
        if (std::find(path.nodes.begin(), path.nodes.end(), e.target) != path.nodes.end()) {
            continue;  // keep paths simple
        }
        EntryPath next = path;
        next.nodes.push_back(e.target);
        next.lag_sum += e.time_lag;
        extend_entry_paths(entry_edges, std::move(next), out);
    }
}

}  // namespace

ValidationReport validate_scenario(const StructuredScenario& s) {
    ValidationReport report;
    const std::int64_t limit = s.pattern_limit();

    // TYPE-RULES ----------------------------------------------------------
    int demand_sources = 0;
    for (const auto& n : s.nodes) {
        if (n.node_type == NodeType::demand_source) ++demand_sources;
    }
    if (demand_sources < 1 || demand_sources > 2) {
        report.add("TYPE-RULES", "nodes",
                   "expected 1 or 2 demand_source nodes, found " +
                       std::to_string(demand_sources),
                   "reclassify nodes so exactly 1-2 act as demand sources");
    }
    for (const auto& nd : s.drift_patterns.per_node) {
        const NodeSpec* node = s.find_node(nd.id);
        if (!node) continue;
        const std::string loc = "node " + std::to_string(nd.id);
        if (node->node_type == NodeType::propagation) {
            for (std::size_t i = 0; i < nd.patterns.size(); ++i) {
                const auto& p = nd.patterns[i];
                if (p.amplitude != 0.0 || p.peak) {
                    report.add("TYPE-RULES",
                               loc + " pattern " + std::to_string(i),
                               "propagation-node patterns must have amplitude 0 "
                               "and no peak",
                               "set amplitude to 0 and peak to null");
                }
            }
        } else {
            int peaked = 0;
            for (const auto& p : nd.patterns) {
                if (p.behavior == Behavior::sinusoidal) ++peaked;
            }
            if (s.drift_patterns.repeat ? (peaked != 1) : (peaked > 1)) {
                report.add("TYPE-RULES", loc,
                           "demand_source must have exactly one self-generated "
                           "peak per cycle, found " + std::to_string(peaked),
                           "keep a single sinusoidal pattern per cycle");
            }
        }
        // Coverage: with repeat, pattern ranges tile [0, repeat_period).
        if (s.drift_patterns.repeat && !nd.patterns.empty()) {
            auto sorted = nd.patterns;
            std::sort(sorted.begin(), sorted.end(),
                      [](const PatternSpec& a, const PatternSpec& b) {
                          return a.time_range.start < b.time_range.start;
                      });
            std::int64_t cursor = 0;
            bool tiled = sorted.front().time_range.start == 0;
            for (const auto& p : sorted) {
                if (p.time_range.start != cursor) tiled = false;
                cursor = p.time_range.end_exclusive(limit);
            }
            if (cursor != limit) tiled = false;
            if (!tiled) {
                report.add("TYPE-RULES", loc,
                           "repeating patterns must tile [0, " +
                               std::to_string(limit) + ") without gap or overlap",
                           "adjust pattern time_ranges to cover the cycle exactly");
            }
        }
    }

    // BASELINE-MAGNITUDE ---------------------------------------------------
    double min_baseline = 0.0, max_baseline = 0.0;
    bool have_baseline = false;
    for (const auto& nd : s.drift_patterns.per_node) {
        for (const auto& p : nd.patterns) {
            if (!have_baseline) {
                min_baseline = max_baseline = p.baseline;
                have_baseline = true;
            } else {
                min_baseline = std::min(min_baseline, p.baseline);
                max_baseline = std::max(max_baseline, p.baseline);
            }
        }
    }
    if (have_baseline && min_baseline > 0.0 && max_baseline / min_baseline > 10.0) {
        std::ostringstream detail;
        detail << "baseline spread " << max_baseline << "/" << min_baseline
               << " exceeds one order of magnitude";
        report.add("BASELINE-MAGNITUDE", "drift_patterns", detail.str(),
                   "bring node baselines within a 10x band");
    }

    // SOURCE-OUT -----------------------------------------------------------
    if (s.nodes.size() > 1) {
        for (const auto& n : s.nodes) {
            if (n.node_type != NodeType::demand_source) continue;
            bool has_out = false;
            for (const auto& e : s.edges) {
                if (e.source == n.id) { has_out = true; break; }
            }
            if (!has_out) {
                report.add("SOURCE-OUT", "node " + std::to_string(n.id),
                           "demand_source has no outgoing edge",
                           "add an edge carrying this node's generated flow");
            }
        }
    }

    // CONNECTED ------------------------------------------------------------
    for (const auto& n : s.nodes) {
        if (n.node_type == NodeType::demand_source) continue;
        bool fed = false;
        for (const auto& src : s.nodes) {
            if (src.node_type == NodeType::demand_source &&
                reachable(s, src.id, n.id)) {
                fed = true;
                break;
            }
        }
        if (!fed) {
            report.add("CONNECTED", "node " + std::to_string(n.id),
                       "not reachable from any demand_source",
                       "connect this node to a source's propagation path");
        }
    }
    if (s.nodes.size() > 1) {
        // Undirected connectivity over the edge list.
        std::set<int> visited{s.nodes.front().id};
        std::deque<int> frontier{s.nodes.front().id};
        while (!frontier.empty()) {
            const int v = frontier.front();
            frontier.pop_front();
            for (const auto& e : s.edges) {
                const int other = e.source == v ? e.target : (e.target == v ? e.source : v);
                if (other != v && visited.insert(other).second) frontier.push_back(other);
            }
        }
        if (visited.size() != s.nodes.size()) {
            report.add("CONNECTED", "edges",
                       "graph is not connected (" + std::to_string(visited.size()) +
                           " of " + std::to_string(s.nodes.size()) + " nodes in one component)",
                       "add edges until every node joins the network");
        }
    }

    // EDGE-CONSISTENCY -----------------------------------------------------
    for (const auto& nd : s.drift_patterns.per_node) {
        for (std::size_t i = 0; i < nd.propagated_variations.size(); ++i) {
            const auto& v = nd.propagated_variations[i];
            if (!s.find_node(v.source) || !reachable(s, v.source, nd.id)) {
                report.add("EDGE-CONSISTENCY",
                           "node " + std::to_string(nd.id) +
                               " propagated_variations[" + std::to_string(i) + "]",
                           "declared source " + std::to_string(v.source) +
                               " has no directed path to node " + std::to_string(nd.id),
                           "declare the edges this propagation travels through");
            }
        }
    }

    // TIMING ----------------------------------------------------------------
    // A propagating event modulating edges in one entry arrives downstream
    // after the entry's cumulative lags; a different entry continuing the
    // chain must not start before that arrival. Chains must be simple and
    // span two distinct entries (a single entry is one simultaneous event).
    for (std::size_t pi = 0; pi < s.adjacency_modulation.size(); ++pi) {
        const auto& upstream = s.adjacency_modulation[pi];
        std::vector<EdgeSpec> upstream_edges;
        for (const auto& [src, tgt] : upstream.applies_to) {
            if (const EdgeSpec* e = s.find_edge(src, tgt)) upstream_edges.push_back(*e);
        }
        std::vector<EntryPath> paths;
        for (const auto& e : upstream_edges) {
            EntryPath seed;
            seed.nodes = {e.source, e.target};
            seed.lag_sum = e.time_lag;
            extend_entry_paths(upstream_edges, std::move(seed), paths);
        }
        for (std::size_t qi = 0; qi < s.adjacency_modulation.size(); ++qi) {
            if (qi == pi) continue;
            const auto& downstream = s.adjacency_modulation[qi];
            for (const auto& [src, tgt] : downstream.applies_to) {
                std::int64_t worst_arrival = -1;
                for (const auto& path : paths) {
                    if (path.nodes.back() != src) continue;
                    if (std::find(path.nodes.begin(), path.nodes.end(), tgt) !=
                        path.nodes.end()) {
                        continue;  // backtracking chain, not one event
                    }
                    worst_arrival = std::max(worst_arrival,
                                             upstream.time_period.start + path.lag_sum);
                }
                if (worst_arrival >= 0 && downstream.time_period.start < worst_arrival) {
                    std::ostringstream detail;
                    detail << "event on pattern " << pi << " reaches node " << src
                           << " at step " << worst_arrival << " but pattern " << qi
                           << " modulates " << edge_key(src, tgt) << " from step "
                           << downstream.time_period.start;
                    report.add("TIMING",
                               "adjacency_modulation.patterns[" + std::to_string(qi) + "]",
                               detail.str(),
                               "delay the downstream window to the arrival step");
                }
            }
        }
    }

    return report;
}

}  // namespace stsim
