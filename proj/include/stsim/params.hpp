#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stsim/scenario.hpp"
#include "stsim/validation.hpp"

namespace stsim {

enum class DiffusionShape { constant, sqrt, linear };

std::string to_string(DiffusionShape s);
DiffusionShape diffusion_shape_from_string(const std::string& s);

/// One layer of the global -> group -> override -> pattern hierarchy.
/// The document key "alpha" is context-mapped: alpha_drift for constant
/// drift, diffusion_alpha for a linear diffusion shape.
struct ParamSet {
    std::optional<Behavior> drift_type;
    std::optional<NodeType> node_type;
    std::optional<double> kappa;
    std::optional<double> baseline;
    std::optional<double> lambda;
    std::optional<double> sigma;
    std::optional<DiffusionShape> diffusion_shape;
    std::optional<double> diffusion_alpha;
    std::optional<double> A;
    std::optional<double> omega;
    std::optional<double> phi;
    std::optional<double> alpha_drift;
    std::optional<double> r;

    bool empty() const;
    bool operator==(const ParamSet&) const = default;
};

struct DriftConfig {
    TimeRange time_range;
    Behavior drift_type = Behavior::mean_reverting;
    ParamSet params;  // fields supplied by this window

    bool operator==(const DriftConfig&) const = default;
};

struct NodeOverride {
    std::string group;
    std::optional<std::vector<DriftConfig>> drift_patterns;
    ParamSet extra;  // loose fields on the override itself
    std::string description;

    bool operator==(const NodeOverride&) const = default;
};

struct SdeParameters {
    ParamSet global_defaults;
    std::map<std::string, ParamSet> group_params;
    std::map<int, NodeOverride> node_overrides;

    bool operator==(const SdeParameters&) const = default;
};

/// Fully populated parameters for one node at one step. Fields that the
/// active drift type does not require default to 0 / constant shape.
struct ResolvedParams {
    Behavior drift_type = Behavior::mean_reverting;
    double kappa = 0.0;
    double baseline = 0.0;
    double lambda = 0.0;
    double sigma = 0.0;
    DiffusionShape diffusion_shape = DiffusionShape::constant;
    double diffusion_alpha = 0.0;
    double A = 0.0;
    double omega = 0.0;
    double phi = 0.0;
    double alpha_drift = 0.0;
    double r = 0.0;

    bool operator==(const ResolvedParams&) const = default;
};

SdeParameters parse_params(const nlohmann::json& doc);
SdeParameters parse_params_text(const std::string& text);
nlohmann::json serialize_params(const SdeParameters& p);

/// Materializes the hierarchy for `node` at step `t`: the pattern covering
/// t' (t modulo the repeat period when the drift program repeats) wins,
/// then the override's own fields, then its group, then global defaults.
/// Steps past the last pattern keep the nearest preceding pattern.
/// Throws ResolutionError when a field required by the active drift type
/// is absent at every layer.
ResolvedParams resolve_node_params(const SdeParameters& p,
                                   const StructuredScenario& scenario, int node,
                                   std::int64_t t);

/// Range and node-type rules from the parameter-generation contract.
/// Sigma plausibility and a large linear-diffusion slope surface as
/// warnings; everything else blocks approval.
ValidationReport validate_params(const SdeParameters& p,
                                 const StructuredScenario& scenario);

/// Layered lookup of one numeric field ("kappa", "baseline", "lambda",
/// "sigma", "A", "omega", "phi", "alpha_drift", "diffusion_alpha", "r")
/// without requiredness checks; nullopt when absent at every level.
std::optional<double> resolve_numeric_field(const SdeParameters& p,
                                            const StructuredScenario& scenario,
                                            int node, std::int64_t t,
                                            const std::string& field);

/// Same layered lookup for the diffusion shape.
std::optional<DiffusionShape> resolve_shape_field(const SdeParameters& p,
                                                  const StructuredScenario& scenario,
                                                  int node, std::int64_t t);

/// Drift f_i(x, t); t is continuous time measured in sampling steps.
double drift(const ResolvedParams& rp, double x, double t);

/// Diffusion shape g_i(x); the simulated noise term is sigma * g(x).
double diffusion(const ResolvedParams& rp, double x);

}  // namespace stsim
