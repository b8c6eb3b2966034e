#include "doctest.h"

#include <cmath>
#include <numeric>

#include "stsim/errors.hpp"
#include "stsim/rng.hpp"
#include "stsim/simulator.hpp"
#include "test_util.hpp"

using namespace stsim;

namespace {

struct ShowcaseInputs {
    StructuredScenario scenario = testutil::showcase_scenario();
    SdeParameters params = testutil::showcase_params();
    ModulationDocument modulation = testutil::showcase_modulation();
};

// Single node with one mean-reverting pattern; id preserved so the noise
// stream matches the same node inside a larger run.
StructuredScenario single_node_scenario(int id, double baseline,
                                        const StructuredScenario& like) {
    StructuredScenario s;
    s.time_span = like.time_span;
    s.sampling_frequency = like.sampling_frequency;
    s.seq_len = like.seq_len;
    s.variable = like.variable;
    s.nodes.push_back({id, NodeType::demand_source, "solo", ""});
    NodeDrift nd;
    nd.id = id;
    nd.patterns.push_back({{0, like.seq_len}, Behavior::mean_reverting, baseline, 0.0, {}});
    s.drift_patterns.per_node.push_back(nd);
    return s;
}

// Two-node fixture: a source emitting one sinusoidal bump into a strongly
// coupled downstream node over a single lagged edge.
struct ImpulseFixture {
    StructuredScenario scenario;
    SdeParameters params;
    BaseAdjacency base;
    TimeModulation modulation;
};

ImpulseFixture impulse_fixture(std::int64_t tau, double base_weight = 2.0) {
    ImpulseFixture f;
    StructuredScenario& s = f.scenario;
    s.time_span = "64 hours";
    s.sampling_frequency = "1 hour";
    s.seq_len = 64;
    s.variable = "flow (units/hour)";
    s.nodes.push_back({0, NodeType::demand_source, "source", ""});
    s.nodes.push_back({1, NodeType::propagation, "sink", ""});
    s.edges.push_back({0, 1, "feed", tau});
    NodeDrift n0;
    n0.id = 0;
    n0.patterns = {
        {{0, 9}, Behavior::mean_reverting, 100.0, 0.0, {}},
        {{10, 19}, Behavior::sinusoidal, 100.0, 300.0, std::int64_t(15)},
        {{20, 64}, Behavior::mean_reverting, 100.0, 0.0, {}},
    };
    NodeDrift n1;
    n1.id = 1;
    n1.patterns = {{{0, 64}, Behavior::mean_reverting, 100.0, 0.0, {}}};
    s.drift_patterns.per_node = {n0, n1};

    SdeParameters& p = f.params;
    p.global_defaults.drift_type = Behavior::mean_reverting;
    p.global_defaults.kappa = 0.25;
    p.global_defaults.baseline = 100.0;
    p.global_defaults.lambda = 1.0;
    p.global_defaults.sigma = 0.0;
    p.global_defaults.diffusion_shape = DiffusionShape::constant;
    NodeOverride ov0;
    std::vector<DriftConfig> configs;
    DriftConfig calm;
    calm.time_range = {0, 9};
    calm.drift_type = Behavior::mean_reverting;
    DriftConfig bump;
    bump.time_range = {10, 19};
    bump.drift_type = Behavior::sinusoidal;
    bump.params.A = 300.0;
    bump.params.omega = 2.0 * 3.14159265358979323846 / 20.0;  // one bump over 10 steps
    bump.params.phi = -2.0 * 3.14159265358979323846 * 10.0 / 20.0;
    bump.params.kappa = 0.45;
    DriftConfig tail;
    tail.time_range = {20, 64};
    tail.drift_type = Behavior::mean_reverting;
    configs = {calm, bump, tail};
    ov0.drift_patterns = configs;
    p.node_overrides[0] = ov0;

    f.base.matrix = {{0.0, base_weight}, {0.0, 0.0}};
    return f;
}

// Lag of the cross-correlation argmax between mean-removed series.
std::int64_t xcorr_argmax(const std::vector<double>& source,
                          const std::vector<double>& target, std::int64_t max_lag) {
    const auto n = static_cast<std::int64_t>(source.size());
    const double mean_s = std::accumulate(source.begin(), source.end(), 0.0) / n;
    const double mean_t = std::accumulate(target.begin(), target.end(), 0.0) / n;
    std::int64_t best_lag = 0;
    double best = -1e300;
    for (std::int64_t lag = 0; lag <= max_lag; ++lag) {
        double sum = 0.0;
        for (std::int64_t t = 0; t + lag < n; ++t) {
            sum += (source[t] - mean_s) * (target[t + lag] - mean_t);
        }
        if (sum > best) {
            best = sum;
            best_lag = lag;
        }
    }
    return best_lag;
}

}  // namespace

TEST_CASE("showcase simulation has shape N x T and finite entries") {
    ShowcaseInputs in;
    SimulationConfig cfg;
    cfg.seed = 42;
    const Trajectories t = simulate(in.scenario, in.params, *in.modulation.base_adjacency,
                                    in.modulation.modulation, cfg);
    REQUIRE(t.values.size() == 3);
    for (const auto& series : t.values) {
        REQUIRE(series.size() == 48);
        for (double v : series) {
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0);
        }
    }
    CHECK(t.meta.scenario_id == "task_0030");
}

TEST_CASE("fixed seed reproduces bit-identical trajectories") {
    ShowcaseInputs in;
    SimulationConfig cfg;
    cfg.seed = 20240901;
    const Trajectories a = simulate(in.scenario, in.params, *in.modulation.base_adjacency,
                                    in.modulation.modulation, cfg);
    const Trajectories b = simulate(in.scenario, in.params, *in.modulation.base_adjacency,
                                    in.modulation.modulation, cfg);
    CHECK(a == b);
    cfg.seed = 20240902;
    const Trajectories c = simulate(in.scenario, in.params, *in.modulation.base_adjacency,
                                    in.modulation.modulation, cfg);
    CHECK(a.values != c.values);
}

TEST_CASE("openmp kernel matches the serial reference bit for bit") {
    SUBCASE("showcase network") {
        ShowcaseInputs in;
        SimulationConfig cfg;
        cfg.seed = 7;
        CHECK(simulate(in.scenario, in.params, *in.modulation.base_adjacency,
                       in.modulation.modulation, cfg) ==
              simulate_reference(in.scenario, in.params, *in.modulation.base_adjacency,
                                 in.modulation.modulation, cfg));
    }
    SUBCASE("wide network exercising the parallel path") {
        // 80 nodes clears the parallel dispatch threshold.
        StructuredScenario s;
        s.time_span = "30 hours";
        s.sampling_frequency = "1 hour";
        s.seq_len = 30;
        s.variable = "flow (units/hour)";
        const int n = 80;
        for (int i = 0; i < n; ++i) {
            s.nodes.push_back({i, i == 0 ? NodeType::demand_source : NodeType::propagation,
                               "", ""});
            NodeDrift nd;
            nd.id = i;
            nd.patterns.push_back(
                {{0, 30}, Behavior::mean_reverting, 100.0 + i % 7, 0.0, {}});
            s.drift_patterns.per_node.push_back(nd);
        }
        for (int i = 0; i + 1 < n; ++i) s.edges.push_back({i, i + 1, "", 1 + i % 3});
        SdeParameters p;
        p.global_defaults.drift_type = Behavior::mean_reverting;
        p.global_defaults.kappa = 0.2;
        p.global_defaults.baseline = 100.0;
        p.global_defaults.lambda = 1.0;
        p.global_defaults.sigma = 0.6;
        p.global_defaults.diffusion_shape = DiffusionShape::sqrt;
        const BaseAdjacency b = default_base_adjacency(s);
        const TimeModulation m;
        SimulationConfig cfg;
        cfg.seed = 99;
        CHECK(simulate(s, p, b, m, cfg) == simulate_reference(s, p, b, m, cfg));
    }
}

TEST_CASE("zero noise and zero coupling hold every node at its baseline") {
    ShowcaseInputs in;
    SdeParameters p = in.params;
    p.global_defaults.sigma = 0.0;
    p.global_defaults.lambda = 0.0;
    for (auto& [name, group] : p.group_params) {
        group.sigma = 0.0;
        group.lambda = 0.0;
    }
    for (auto& [id, ov] : p.node_overrides) {
        ov.extra.sigma = 0.0;
        ov.extra.lambda = 0.0;
        if (ov.drift_patterns) {
            for (auto& cfg : *ov.drift_patterns) {
                cfg.params.sigma = 0.0;
                cfg.params.lambda = 0.0;
                cfg.drift_type = Behavior::mean_reverting;
                cfg.params.drift_type = Behavior::mean_reverting;
            }
        }
    }
    SimulationConfig cfg;
    cfg.seed = 5;
    const Trajectories t = simulate(in.scenario, p, *in.modulation.base_adjacency,
                                    in.modulation.modulation, cfg);
    CHECK(t.values[0] == std::vector<double>(48, 100.0));
    CHECK(t.values[1] == std::vector<double>(48, 120.0));
    CHECK(t.values[2] == std::vector<double>(48, 110.0));
}

TEST_CASE("decoupled network equals independent single-node runs exactly") {
    ShowcaseInputs in;
    SdeParameters p = in.params;
    // All coupling off; baselines kept; noise on so the check is sharp.
    p.global_defaults.lambda = 0.0;
    for (auto& [name, group] : p.group_params) group.lambda = 0.0;
    for (auto& [id, ov] : p.node_overrides) {
        if (ov.drift_patterns) {
            for (auto& cfg : *ov.drift_patterns) cfg.params.lambda = 0.0;
        }
    }
    SimulationConfig cfg;
    cfg.seed = 314159;
    const Trajectories joint = simulate(in.scenario, p, *in.modulation.base_adjacency,
                                        in.modulation.modulation, cfg);
    for (int node = 0; node < 3; ++node) {
        // Same node id (so the noise stream matches), relabeled as a lone
        // demand source with a non-repeating program; neither field feeds
        // the integrator, and the horizon never wraps the 48-step cycle.
        StructuredScenario solo;
        solo.time_span = in.scenario.time_span;
        solo.sampling_frequency = in.scenario.sampling_frequency;
        solo.seq_len = in.scenario.seq_len;
        solo.variable = in.scenario.variable;
        solo.nodes.push_back(in.scenario.nodes[node]);
        solo.nodes[0].node_type = NodeType::demand_source;
        for (const auto& nd : in.scenario.drift_patterns.per_node) {
            if (nd.id == node) {
                NodeDrift clean = nd;
                clean.propagated_variations.clear();
                solo.drift_patterns.per_node.push_back(clean);
            }
        }
        BaseAdjacency base;
        base.matrix = {{0.0}};
        const TimeModulation no_modulation;
        const Trajectories single = simulate(solo, p, base, no_modulation, cfg);
        CHECK(single.values[0] == joint.values[node]);
    }
}

TEST_CASE("deterministic mean reversion converges onto the baseline") {
    ShowcaseInputs in;
    StructuredScenario s = single_node_scenario(0, 100.0, in.scenario);
    SdeParameters p;
    p.global_defaults.drift_type = Behavior::mean_reverting;
    p.global_defaults.kappa = 0.25;
    p.global_defaults.baseline = 100.0;
    p.global_defaults.lambda = 1.0;
    p.global_defaults.sigma = 0.0;
    p.global_defaults.diffusion_shape = DiffusionShape::constant;
    BaseAdjacency base;
    base.matrix = {{0.0}};
    SimulationConfig cfg;
    cfg.substeps = 10;
    cfg.initial_values[0] = 150.0;
    const Trajectories t = simulate(s, p, base, {}, cfg);
    CHECK(std::abs(t.values[0][47] - 100.0) < 1.0);
    // Monotone decay from above, never undershooting.
    for (std::int64_t step = 1; step < 48; ++step) {
        CHECK(t.values[0][step] <= t.values[0][step - 1] + 1e-12);
        CHECK(t.values[0][step] >= 100.0 - 1e-9);
    }
}

TEST_CASE("deterministic sinusoidal drift stays inside the envelope") {
    ShowcaseInputs in;
    StructuredScenario s = single_node_scenario(0, 100.0, in.scenario);
    s.drift_patterns.per_node[0].patterns[0].behavior = Behavior::sinusoidal;
    s.drift_patterns.per_node[0].patterns[0].amplitude = 300.0;
    s.drift_patterns.per_node[0].patterns[0].peak = 12;
    SdeParameters p;
    p.global_defaults.drift_type = Behavior::sinusoidal;
    p.global_defaults.kappa = 0.25;
    p.global_defaults.baseline = 100.0;
    p.global_defaults.A = 300.0;
    p.global_defaults.omega = 0.1309;
    p.global_defaults.phi = -1.7262;
    p.global_defaults.lambda = 1.0;
    p.global_defaults.sigma = 0.0;
    p.global_defaults.diffusion_shape = DiffusionShape::constant;
    BaseAdjacency base;
    base.matrix = {{0.0}};
    SimulationConfig cfg;
    cfg.clamp_nonnegative = false;
    const Trajectories t = simulate(s, p, base, {}, cfg);
    const double epsilon = 0.05 * 300.0;
    for (double v : t.values[0]) {
        CHECK(v >= 100.0 - 300.0 - epsilon);
        CHECK(v <= 100.0 + 300.0 + epsilon);
    }
}

TEST_CASE("impulse arrives downstream after the edge lag") {
    for (std::int64_t tau : {1, 2, 4}) {
        const ImpulseFixture f = impulse_fixture(tau);
        SimulationConfig cfg;
        const Trajectories t = simulate(f.scenario, f.params, f.base, f.modulation, cfg);
        const std::int64_t lag = xcorr_argmax(t.values[0], t.values[1], 12);
        CHECK(std::abs(lag - tau) <= 1);
    }
}

TEST_CASE("doubling the lag shifts the response by the same amount") {
    for (std::int64_t tau : {1, 2}) {
        const ImpulseFixture a = impulse_fixture(tau);
        const ImpulseFixture b = impulse_fixture(2 * tau);
        SimulationConfig cfg;
        const Trajectories ta = simulate(a.scenario, a.params, a.base, a.modulation, cfg);
        const Trajectories tb = simulate(b.scenario, b.params, b.base, b.modulation, cfg);
        const std::int64_t la = xcorr_argmax(ta.values[0], ta.values[1], 14);
        const std::int64_t lb = xcorr_argmax(tb.values[0], tb.values[1], 14);
        CHECK(std::abs((lb - la) - tau) <= 1);
    }
}

TEST_CASE("clamp keeps every sample non-negative") {
    ShowcaseInputs in;
    SdeParameters p = in.params;
    // Violent noise so the clamp is actually exercised.
    p.global_defaults.sigma = 40.0;
    for (auto& [name, group] : p.group_params) group.sigma = 40.0;
    for (auto& [id, ov] : p.node_overrides) {
        if (ov.drift_patterns) {
            for (auto& cfg : *ov.drift_patterns) cfg.params.sigma = 40.0;
        }
    }
    SimulationConfig cfg;
    cfg.seed = 1;
    const Trajectories t = simulate(in.scenario, p, *in.modulation.base_adjacency,
                                    in.modulation.modulation, cfg);
    double min_seen = 1e300;
    for (const auto& series : t.values) {
        for (double v : series) min_seen = std::min(min_seen, v);
    }
    CHECK(min_seen >= 0.0);
    CHECK(min_seen < 1.0);  // the clamp hit zero somewhere
}

TEST_CASE("divergent parameters raise a divergence error naming the node") {
    ShowcaseInputs in;
    SdeParameters p = in.params;
    // Constant drift exploding upward on node 0.
    auto& configs = *p.node_overrides.at(0).drift_patterns;
    for (auto& cfg : configs) {
        cfg.drift_type = Behavior::constant;
        cfg.params.drift_type = Behavior::constant;
        cfg.params.alpha_drift = 1e9;
    }
    SimulationConfig cfg;
    cfg.clamp_nonnegative = false;
    try {
        simulate(in.scenario, p, *in.modulation.base_adjacency,
                 in.modulation.modulation, cfg);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(e.node() == 0);
        CHECK(e.step() > 0.0);
    }
}

TEST_CASE("simulate rejects inputs that fail hard validation") {
    ShowcaseInputs in;
    StructuredScenario s = in.scenario;
    s.drift_patterns.per_node[1].patterns[0].amplitude = 50.0;  // TYPE-RULES breach
    SimulationConfig cfg;
    CHECK_THROWS_AS(simulate(s, in.params, *in.modulation.base_adjacency,
                             in.modulation.modulation, cfg),
                    ValidationError);
}

TEST_CASE("delayed state lookups") {
    SubstepHistory history(1, 10);
    history.resize(51);  // 5 steps of 10 sub-steps
    for (int idx = 0; idx <= 50; ++idx) history.set(0, idx, idx * 0.1);
    CHECK(history.delayed(0, 50, 0) == doctest::Approx(5.0));   // tau 0: current
    CHECK(history.delayed_state(0, 5.0, 2) == doctest::Approx(3.0));
    CHECK(history.delayed_state(0, 0.5, 2) == doctest::Approx(0.0));  // X(0)
    CHECK(history.delayed(0, 5, 2) == doctest::Approx(0.0));
}

TEST_CASE("gaussian streams are deterministic and independent") {
    SUBCASE("same key twice gives identical draws") {
        GaussianStream a(123, 4);
        GaussianStream b(123, 4);
        for (int i = 0; i < 1000; ++i) CHECK(a.next() == b.next());
    }
    SUBCASE("stream depends only on (seed, node)") {
        GaussianStream a(123, 2);
        double first = a.next();
        GaussianStream b(123, 2);
        CHECK(b.next() == first);
        GaussianStream c(124, 2);
        CHECK(c.next() != first);
    }
    SUBCASE("paired draws across nodes are uncorrelated") {
        GaussianStream a(2024, 0);
        GaussianStream b(2024, 1);
        const int n = 100000;
        double sum_ab = 0.0, sum_a = 0.0, sum_b = 0.0, sum_a2 = 0.0, sum_b2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = a.next();
            const double y = b.next();
            sum_ab += x * y;
            sum_a += x;
            sum_b += y;
            sum_a2 += x * x;
            sum_b2 += y * y;
        }
        const double cov = sum_ab / n - (sum_a / n) * (sum_b / n);
        const double var_a = sum_a2 / n - (sum_a / n) * (sum_a / n);
        const double var_b = sum_b2 / n - (sum_b / n) * (sum_b / n);
        CHECK(std::abs(cov / std::sqrt(var_a * var_b)) < 0.02);
    }
    SUBCASE("moments match the standard normal") {
        GaussianStream a(77, 3);
        const int n = 100000;
        double sum = 0.0, sum2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = a.next();
            sum += x;
            sum2 += x * x;
        }
        const double mean = sum / n;
        const double var = sum2 / n - mean * mean;
        CHECK(std::abs(mean) < 0.02);
        CHECK(std::abs(var - 1.0) < 0.05);
    }
}

TEST_CASE("csv export is one row per step with six significant digits") {
    ShowcaseInputs in;
    SimulationConfig cfg;
    const Trajectories t = simulate(in.scenario, in.params, *in.modulation.base_adjacency,
                                    in.modulation.modulation, cfg);
    const std::string csv = trajectories_to_csv(t);
    const auto lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == 49);  // header + 48 steps
    CHECK(csv.rfind("node_0,node_1,node_2\n", 0) == 0);
    const Trajectories back = trajectories_from_json(trajectories_to_json(t));
    CHECK(back == t);
}
