#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "stsim/adjacency.hpp"
#include "stsim/params.hpp"
#include "stsim/scenario.hpp"

#ifndef STSIM_FIXTURE_DIR
#error "STSIM_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace testutil {

inline std::string fixture_path(const std::string& name) {
    return std::string(STSIM_FIXTURE_DIR) + "/" + name;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline nlohmann::json fixture_json(const std::string& name) {
    return nlohmann::json::parse(slurp(fixture_path(name)));
}

inline stsim::StructuredScenario showcase_scenario() {
    return stsim::parse_scenario(fixture_json("listing1.json"));
}

inline stsim::SdeParameters showcase_params() {
    return stsim::parse_params(fixture_json("listing2.json"));
}

inline stsim::ModulationDocument showcase_modulation() {
    return stsim::parse_modulation(fixture_json("listing3.json"));
}

/// Randomized valid scenario + matching parameter/modulation documents.
/// Graph: a directed tree rooted at demand source 0 covering every node
/// (plus a guaranteed outgoing edge for source 1 when present), random
/// whole-step lags, repeat-free three-phase drift on sources, and 1-3
/// single-edge modulation entries chosen so no two entries chain.
struct RandomArtifacts {
    stsim::StructuredScenario scenario;
    stsim::SdeParameters params;
    stsim::TimeModulation modulation;
    stsim::BaseAdjacency base;
};

inline RandomArtifacts random_artifacts(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto pick = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };

    stsim::StructuredScenario s;
    const std::int64_t seq_len = 48;
    s.time_span = "1 day";
    s.sampling_frequency = "30 minutes";
    s.seq_len = seq_len;
    s.variable = "flow (units/hour)";
    s.scenario_id = "random_" + std::to_string(seed);

    const int sources = n >= 4 ? pick(1, 2) : 1;
    for (int i = 0; i < n; ++i) {
        s.nodes.push_back({i,
                           i < sources ? stsim::NodeType::demand_source
                                       : stsim::NodeType::propagation,
                           "node " + std::to_string(i),
                           "synthetic node"});
    }
    // Directed tree rooted at node 0 (everything reachable from source 0),
    // then one extra edge out of source 1 when it exists.
    for (int i = 1; i < n; ++i) {
        const int parent = i < sources ? 0 : pick(0, i - 1);
        s.edges.push_back({parent, i, "link", pick(1, 3)});
    }
    if (sources == 2) {
        bool has_out = false;
        for (const auto& e : s.edges) {
            if (e.source == 1) has_out = true;
        }
        if (!has_out && n > 2) {
            s.edges.push_back({1, pick(2, n - 1), "link", pick(1, 3)});
        }
    }

    for (int i = 0; i < n; ++i) {
        stsim::NodeDrift nd;
        nd.id = i;
        const double baseline = 80.0 + 5.0 * i;
        if (i < sources) {
            nd.patterns.push_back(
                {{0, 13}, stsim::Behavior::mean_reverting, baseline, 0.0, {}});
            nd.patterns.push_back(
                {{14, 34}, stsim::Behavior::sinusoidal, baseline, 150.0 + 10.0 * i,
                 std::int64_t(pick(16, 24))});
            nd.patterns.push_back(
                {{35, 48}, stsim::Behavior::mean_reverting, baseline, 0.0, {}});
        } else {
            nd.patterns.push_back(
                {{0, 48}, stsim::Behavior::mean_reverting, baseline, 0.0, {}});
        }
        s.drift_patterns.per_node.push_back(std::move(nd));
    }

    // Modulation entries on edges with pairwise disjoint endpoints, so no
    // two entries form a chain and the TIMING rule stays vacuous.
    const int want_mods = pick(1, 3);
    std::vector<stsim::EdgeSpec> chosen;
    for (const auto& e : s.edges) {
        if (static_cast<int>(chosen.size()) >= want_mods) break;
        bool disjoint = true;
        for (const auto& c : chosen) {
            if (c.source == e.source || c.source == e.target || c.target == e.source ||
                c.target == e.target) {
                disjoint = false;
                break;
            }
        }
        if (disjoint) chosen.push_back(e);
    }
    stsim::TimeModulation modulation;
    for (const auto& e : chosen) {
        const std::int64_t start = pick(10, 20);
        const std::int64_t end = start + pick(2, 6);
        const bool strong = pick(0, 1) == 1;
        s.adjacency_modulation.push_back(
            {{start, end},
             strong ? stsim::ModulationEffect::strong : stsim::ModulationEffect::moderate,
             {{e.source, e.target}},
             "synthetic window"});
        stsim::ModulationPattern pattern;
        pattern.time_range = {start, end};
        pattern.description = "synthetic window";
        pattern.edge_modulations[std::to_string(e.source) + "->" +
                                 std::to_string(e.target)] = {
            strong ? double(pick(10, 20)) : double(pick(5, 10)), "synthetic"};
        modulation.patterns.push_back(std::move(pattern));
    }

    stsim::SdeParameters p;
    p.global_defaults.drift_type = stsim::Behavior::mean_reverting;
    p.global_defaults.kappa = 0.25;
    p.global_defaults.baseline = 100.0;
    p.global_defaults.lambda = 1.0;
    p.global_defaults.sigma = 0.5;
    p.global_defaults.diffusion_shape = stsim::DiffusionShape::sqrt;
    stsim::ParamSet source_group;
    source_group.drift_type = stsim::Behavior::mean_reverting;
    source_group.kappa = 0.25;
    source_group.lambda = 1.0;
    source_group.sigma = 0.5;
    stsim::ParamSet relay_group;
    relay_group.drift_type = stsim::Behavior::mean_reverting;
    relay_group.kappa = 0.1;
    relay_group.lambda = 1.2;
    relay_group.sigma = 0.3;
    p.group_params["demand_sources"] = source_group;
    p.group_params["propagation_nodes"] = relay_group;
    for (int i = 0; i < n; ++i) {
        stsim::NodeOverride ov;
        ov.group = i < sources ? "demand_sources" : "propagation_nodes";
        std::vector<stsim::DriftConfig> configs;
        for (const auto& pattern : s.drift_patterns.per_node[i].patterns) {
            stsim::DriftConfig cfg;
            cfg.time_range = pattern.time_range;
            cfg.drift_type = pattern.behavior;
            cfg.params.drift_type = pattern.behavior;
            cfg.params.baseline = pattern.baseline;
            cfg.params.kappa = i < sources ? 0.25 : 0.1;
            if (pattern.behavior == stsim::Behavior::sinusoidal) {
                cfg.params.A = pattern.amplitude;
                cfg.params.omega = 0.1309;
                cfg.params.phi = -1.5;
            }
            configs.push_back(std::move(cfg));
        }
        ov.drift_patterns = std::move(configs);
        p.node_overrides[i] = std::move(ov);
    }

    RandomArtifacts out;
    out.base = stsim::default_base_adjacency(s);
    out.scenario = std::move(s);
    out.params = std::move(p);
    out.modulation = std::move(modulation);
    return out;
}

}  // namespace testutil
