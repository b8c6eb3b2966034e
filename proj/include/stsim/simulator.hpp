#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stsim/adjacency.hpp"
#include "stsim/params.hpp"
#include "stsim/scenario.hpp"

namespace stsim {

struct SimulationConfig {
    std::uint64_t seed = 0;
    int substeps = 10;  // Euler-Maruyama sub-intervals per sampling step
    bool clamp_nonnegative = true;
    std::map<int, double> initial_values;  // node id -> X(0) override

    bool operator==(const SimulationConfig&) const = default;
};

struct Trajectories {
    std::vector<std::vector<double>> values;  // N x T, scenario node order
    std::int64_t seq_len = 0;
    std::vector<int> node_ids;
    struct Meta {
        std::uint64_t seed = 0;
        int substeps = 10;
        std::string scenario_id;

        bool operator==(const Meta&) const = default;
    } meta;

    bool operator==(const Trajectories&) const = default;
};

/// Every sub-step state of every node, retained for delayed coupling
/// lookups. Index granularity is 1/substeps of a sampling step. Slots are
/// preallocated so concurrent writers touch disjoint per-node rows.
class SubstepHistory {
public:
    SubstepHistory(std::size_t nodes, int substeps)
        : substeps_(substeps), states_(nodes) {}

    void resize(std::size_t total_substeps) {
        for (auto& series : states_) series.assign(total_substeps, 0.0);
    }

    void set(std::size_t node, std::int64_t index, double value) {
        states_[node][static_cast<std::size_t>(index)] = value;
    }

    /// State at the most recent stored sub-step <= index - tau steps;
    /// times before the origin return X(0).
    double delayed(std::size_t node, std::int64_t substep_index,
                   std::int64_t tau_steps) const {
        std::int64_t idx = substep_index - tau_steps * substeps_;
        if (idx < 0) idx = 0;
        return states_[node][static_cast<std::size_t>(idx)];
    }

    /// Continuous-time variant: the most recent stored sub-step <= t - tau.
    double delayed_state(std::size_t node, double t, std::int64_t tau_steps) const;

    int substeps() const { return substeps_; }
    std::size_t length(std::size_t node) const { return states_[node].size(); }

private:
    int substeps_;
    std::vector<std::vector<double>> states_;
};

/// Integrates the network dynamics with an explicit Euler-Maruyama scheme:
/// per sub-step of size 1/substeps,
///   X_i += [f_i(X_i, t) + lambda_i * sum_j w_ji(floor(t)) (X_j(t - tau_ji) - X_i)] dt
///          + sigma_i g_i(X_i) sqrt(dt) xi,
/// with xi drawn from the node's (seed, id) stream. Edge weights are held
/// constant within each sampling step. Node updates within a sub-step are
/// independent and run under OpenMP.
///
/// Throws ValidationError when the scenario fails its hard rules or the
/// base/modulation documents are structurally inconsistent with it, and
/// DivergenceError when a state leaves the finite envelope.
Trajectories simulate(const StructuredScenario& s, const SdeParameters& p,
                      const BaseAdjacency& b, const TimeModulation& m,
                      const SimulationConfig& cfg);

/// Straight-line serial implementation of the same scheme, kept as the
/// reference for parity tests and benchmarking.
Trajectories simulate_reference(const StructuredScenario& s, const SdeParameters& p,
                                const BaseAdjacency& b, const TimeModulation& m,
                                const SimulationConfig& cfg);

/// Columnar table: header of node column names, then one row per step,
/// 6 significant digits per value.
std::string trajectories_to_csv(const Trajectories& t);

/// Structured export embedding values and meta.
nlohmann::json trajectories_to_json(const Trajectories& t);
Trajectories trajectories_from_json(const nlohmann::json& doc);

/// min/max/argmax/first/last digest per node, used as the text fallback
/// for judges on backends without image support.
std::string summarize_trajectories(const Trajectories& t);

}  // namespace stsim
