// Compares the OpenMP node-loop kernel against the serial reference on a
// synthetic chain network and checks they agree bit for bit.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "stsim/adjacency.hpp"
#include "stsim/params.hpp"
#include "stsim/scenario.hpp"
#include "stsim/simulator.hpp"

using namespace stsim;

namespace {

StructuredScenario chain_scenario(int n, std::int64_t seq_len) {
    StructuredScenario s;
    s.time_span = std::to_string(seq_len) + " hours";
    s.sampling_frequency = "1 hour";
    s.seq_len = seq_len;
    s.variable = "flow (units/hour)";
    for (int i = 0; i < n; ++i) {
        s.nodes.push_back({i,
                           i == 0 ? NodeType::demand_source : NodeType::propagation,
                           "node " + std::to_string(i),
                           ""});
        NodeDrift nd;
        nd.id = i;
        nd.patterns.push_back({{0, seq_len}, Behavior::mean_reverting, 100.0, 0.0, {}});
        s.drift_patterns.per_node.push_back(nd);
    }
    // Demand source carries the single peaked phase.
    s.drift_patterns.per_node[0].patterns = {
        {{0, seq_len / 4}, Behavior::mean_reverting, 100.0, 0.0, {}},
        {{seq_len / 4 + 1, seq_len / 2}, Behavior::sinusoidal, 100.0, 80.0, seq_len / 3},
        {{seq_len / 2 + 1, seq_len}, Behavior::mean_reverting, 100.0, 0.0, {}},
    };
    for (int i = 0; i + 1 < n; ++i) {
        s.edges.push_back({i, i + 1, "chain", 1});
    }
    return s;
}

SdeParameters chain_params() {
    SdeParameters p;
    p.global_defaults.drift_type = Behavior::mean_reverting;
    p.global_defaults.kappa = 0.25;
    p.global_defaults.baseline = 100.0;
    p.global_defaults.lambda = 1.0;
    p.global_defaults.sigma = 0.5;
    p.global_defaults.diffusion_shape = DiffusionShape::sqrt;
    return p;
}

double run_case(bool parallel, const StructuredScenario& s, const SdeParameters& p,
                const BaseAdjacency& b, const TimeModulation& m,
                const SimulationConfig& cfg, Trajectories& out) {
    const auto start = std::chrono::steady_clock::now();
    out = parallel ? simulate(s, p, b, m, cfg) : simulate_reference(s, p, b, m, cfg);
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start)
        .count();
}

}  // namespace

int main(int argc, char** argv) {
    int n = 256;
    std::int64_t seq_len = 1000;
    int substeps = 10;
    int repeats = 3;
    if (argc > 1) n = std::stoi(argv[1]);
    if (argc > 2) seq_len = std::stoll(argv[2]);
    if (argc > 3) substeps = std::stoi(argv[3]);

    const StructuredScenario s = chain_scenario(n, seq_len);
    const SdeParameters p = chain_params();
    const BaseAdjacency b = default_base_adjacency(s);
    const TimeModulation m;
    SimulationConfig cfg;
    cfg.seed = 20240901;
    cfg.substeps = substeps;

#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP: compiled out (serial build)\n");
#endif
    std::printf("network: %d-node chain, %lld steps, %d substeps\n", n,
                static_cast<long long>(seq_len), substeps);

    Trajectories serial_out, parallel_out;
    double serial_best = 1e300, parallel_best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        serial_best = std::min(serial_best, run_case(false, s, p, b, m, cfg, serial_out));
        parallel_best =
            std::min(parallel_best, run_case(true, s, p, b, m, cfg, parallel_out));
    }

    const bool identical = serial_out.values == parallel_out.values;
    std::printf("serial reference : %9.2f ms\n", serial_best);
    std::printf("openmp kernel    : %9.2f ms\n", parallel_best);
    std::printf("speedup          : %9.2fx\n", serial_best / parallel_best);
    std::printf("bitwise identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
