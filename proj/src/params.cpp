#include "stsim/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stsim/errors.hpp"

namespace stsim {
namespace {

using nlohmann::json;

double get_number(const json& j, const char* key, const std::string& path) {
    if (!j.at(key).is_number()) {
        throw ParseError(path + "." + key, "TYPE", "expected a number");
    }
    return j.at(key).get<double>();
}

ParamSet parse_param_set(const json& j, const std::string& path) {
    ParamSet ps;
    if (j.contains("drift_type") && !j["drift_type"].is_null()) {
        try {
            ps.drift_type = behavior_from_string(j["drift_type"].get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError(path + ".drift_type", e.rule(), e.what());
        }
    }
    if (j.contains("node_type") && !j["node_type"].is_null()) {
        try {
            ps.node_type = node_type_from_string(j["node_type"].get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError(path + ".node_type", e.rule(), e.what());
        }
    }
    if (j.contains("diffusion_shape") && !j["diffusion_shape"].is_null()) {
        try {
            ps.diffusion_shape =
                diffusion_shape_from_string(j["diffusion_shape"].get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError(path + ".diffusion_shape", e.rule(), e.what());
        }
    }
    auto grab = [&](const char* key, std::optional<double>& slot) {
        if (j.contains(key) && !j[key].is_null()) slot = get_number(j, key, path);
    };
    grab("kappa", ps.kappa);
    grab("baseline", ps.baseline);
    grab("lambda", ps.lambda);
    grab("sigma", ps.sigma);
    grab("A", ps.A);
    grab("omega", ps.omega);
    grab("phi", ps.phi);
    grab("r", ps.r);
    grab("alpha_drift", ps.alpha_drift);
    grab("diffusion_alpha", ps.diffusion_alpha);
    if (j.contains("alpha") && !j["alpha"].is_null()) {
        // Context-mapped: the document uses one name for two parameters.
        const double value = get_number(j, "alpha", path);
        const bool linear_shape =
            ps.diffusion_shape && *ps.diffusion_shape == DiffusionShape::linear;
        const bool constant_drift = ps.drift_type && *ps.drift_type == Behavior::constant;
        if (constant_drift || !linear_shape) {
            if (!ps.alpha_drift) ps.alpha_drift = value;
        } else if (!ps.diffusion_alpha) {
            ps.diffusion_alpha = value;
        }
    }
    return ps;
}

json param_set_to_json(const ParamSet& ps) {
    json j = json::object();
    if (ps.drift_type) j["drift_type"] = to_string(*ps.drift_type);
    if (ps.node_type) j["node_type"] = to_string(*ps.node_type);
    if (ps.kappa) j["kappa"] = *ps.kappa;
    if (ps.baseline) j["baseline"] = *ps.baseline;
    if (ps.lambda) j["lambda"] = *ps.lambda;
    if (ps.sigma) j["sigma"] = *ps.sigma;
    if (ps.diffusion_shape) j["diffusion_shape"] = to_string(*ps.diffusion_shape);
    if (ps.diffusion_alpha) j["diffusion_alpha"] = *ps.diffusion_alpha;
    if (ps.A) j["A"] = *ps.A;
    if (ps.omega) j["omega"] = *ps.omega;
    if (ps.phi) j["phi"] = *ps.phi;
    if (ps.alpha_drift) j["alpha_drift"] = *ps.alpha_drift;
    if (ps.r) j["r"] = *ps.r;
    return j;
}

}  // namespace

std::string to_string(DiffusionShape s) {
    switch (s) {
        case DiffusionShape::constant: return "constant";
        case DiffusionShape::sqrt: return "sqrt";
        case DiffusionShape::linear: return "linear";
    }
    return "constant";
}

DiffusionShape diffusion_shape_from_string(const std::string& s) {
    if (s == "constant") return DiffusionShape::constant;
    if (s == "sqrt") return DiffusionShape::sqrt;
    if (s == "linear") return DiffusionShape::linear;
    throw ParseError("diffusion_shape", "DIFFUSION-SHAPE",
                     "unknown shape '" + s + "' (constant|sqrt|linear)");
}

bool ParamSet::empty() const { return *this == ParamSet{}; }

SdeParameters parse_params(const json& doc) {
    if (!doc.is_object()) {
        throw ParseError("document", "JSON", "parameter document must be an object");
    }
    SdeParameters p;
    if (doc.contains("global_defaults")) {
        p.global_defaults = parse_param_set(doc["global_defaults"], "global_defaults");
    }
    if (doc.contains("group_params")) {
        for (const auto& [name, body] : doc["group_params"].items()) {
            p.group_params[name] = parse_param_set(body, "group_params." + name);
        }
    }
    if (doc.contains("node_overrides")) {
        for (const auto& [key, body] : doc["node_overrides"].items()) {
            const std::string path = "node_overrides." + key;
            int id = 0;
            try {
                id = std::stoi(key);
            } catch (const std::exception&) {
                throw ParseError(path, "NODE-REF", "override key '" + key +
                                                       "' is not a node id");
            }
            NodeOverride ov;
            ov.group = body.value("group", std::string{});
            if (!ov.group.empty() && !p.group_params.count(ov.group)) {
                throw ParseError(path + ".group", "UNKNOWN-GROUP",
                                 "group '" + ov.group + "' is not in group_params");
            }
            ov.description = body.value("description", std::string{});
            if (body.contains("drift_patterns") && !body["drift_patterns"].is_null()) {
                std::vector<DriftConfig> configs;
                const json& patterns = body["drift_patterns"];
                for (std::size_t i = 0; i < patterns.size(); ++i) {
                    const std::string ppath =
                        path + ".drift_patterns[" + std::to_string(i) + "]";
                    const json& pj = patterns[i];
                    DriftConfig cfg;
                    if (!pj.contains("time_range")) {
                        throw ParseError(ppath, "MISSING-FIELD", "missing 'time_range'");
                    }
                    if (!pj["time_range"].is_array() || pj["time_range"].size() != 2) {
                        throw ParseError(ppath + ".time_range", "TIME-RANGE",
                                         "expected [start, end]");
                    }
                    cfg.time_range = {pj["time_range"][0].get<std::int64_t>(),
                                      pj["time_range"][1].get<std::int64_t>()};
                    if (cfg.time_range.start < 0 ||
                        cfg.time_range.end_raw < cfg.time_range.start) {
                        throw ParseError(ppath + ".time_range", "TIME-RANGE",
                                         "range is not ordered");
                    }
                    if (!pj.contains("drift_type")) {
                        throw ParseError(ppath, "MISSING-FIELD", "missing 'drift_type'");
                    }
                    cfg.params = parse_param_set(pj, ppath);
                    cfg.drift_type = *cfg.params.drift_type;
                    configs.push_back(std::move(cfg));
                }
                ov.drift_patterns = std::move(configs);
            }
            // Loose parameter fields on the override body itself.
            json loose = json::object();
            for (const auto& [k, v] : body.items()) {
                if (k == "group" || k == "drift_patterns" || k == "description") continue;
                loose[k] = v;
            }
            ov.extra = parse_param_set(loose, path);
            p.node_overrides[id] = std::move(ov);
        }
    }
    return p;
}

SdeParameters parse_params_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError("document", "JSON", e.what());
    }
    return parse_params(doc);
}

nlohmann::json serialize_params(const SdeParameters& p) {
    json doc;
    doc["global_defaults"] = param_set_to_json(p.global_defaults);
    json groups = json::object();
    for (const auto& [name, ps] : p.group_params) groups[name] = param_set_to_json(ps);
    doc["group_params"] = groups;
    json overrides = json::object();
    for (const auto& [id, ov] : p.node_overrides) {
        json body = param_set_to_json(ov.extra);
        if (!ov.group.empty()) body["group"] = ov.group;
        if (!ov.description.empty()) body["description"] = ov.description;
        if (ov.drift_patterns) {
            json patterns = json::array();
            for (const auto& cfg : ov.drift_patterns.value()) {
                json pj = param_set_to_json(cfg.params);
                pj["drift_type"] = to_string(cfg.drift_type);
                pj["time_range"] = {cfg.time_range.start, cfg.time_range.end_raw};
                patterns.push_back(std::move(pj));
            }
            body["drift_patterns"] = patterns;
        }
        overrides[std::to_string(id)] = std::move(body);
    }
    doc["node_overrides"] = overrides;
    return doc;
}

namespace {

// Layered lookup: first layer holding the field wins.
template <typename T>
std::optional<T> pick(const std::vector<const std::optional<T>*>& layers) {
    for (const auto* layer : layers) {
        if (layer && layer->has_value()) return **layer;
    }
    return std::nullopt;
}

struct LayerChain {
    const ParamSet* pattern = nullptr;
    const ParamSet* extra = nullptr;
    const ParamSet* group = nullptr;
    const ParamSet* global = nullptr;
    std::optional<Behavior> pattern_drift;

    template <typename T>
    std::optional<T> field(std::optional<T> ParamSet::*member) const {
        return pick<T>({pattern ? &(pattern->*member) : nullptr,
                        extra ? &(extra->*member) : nullptr,
                        group ? &(group->*member) : nullptr,
                        global ? &(global->*member) : nullptr});
    }
};

LayerChain build_chain(const SdeParameters& p, const StructuredScenario& scenario,
                       int node, std::int64_t t) {
    const std::int64_t limit = scenario.pattern_limit();
    const std::int64_t t_eff =
        scenario.drift_patterns.repeat && limit > 0 ? t % limit : t;

    LayerChain chain;
    chain.global = &p.global_defaults;
    if (auto it = p.node_overrides.find(node); it != p.node_overrides.end()) {
        const NodeOverride& ov = it->second;
        chain.extra = &ov.extra;
        if (!ov.group.empty()) {
            if (auto git = p.group_params.find(ov.group); git != p.group_params.end()) {
                chain.group = &git->second;
            }
        }
        if (ov.drift_patterns && !ov.drift_patterns->empty()) {
            const DriftConfig* active = nullptr;
            for (const auto& cfg : *ov.drift_patterns) {
                if (cfg.time_range.contains(t_eff, limit)) {
                    active = &cfg;
                    break;
                }
            }
            if (!active) {
                // Uncovered steps keep the nearest preceding pattern.
                for (const auto& cfg : *ov.drift_patterns) {
                    if (cfg.time_range.start <= t_eff &&
                        (!active || cfg.time_range.start > active->time_range.start)) {
                        active = &cfg;
                    }
                }
            }
            if (!active) active = &ov.drift_patterns->front();
            chain.pattern = &active->params;
            chain.pattern_drift = active->drift_type;
        }
    }
    return chain;
}

}  // namespace

ResolvedParams resolve_node_params(const SdeParameters& p,
                                   const StructuredScenario& scenario, int node,
                                   std::int64_t t) {
    if (!scenario.find_node(node)) {
        throw IndexError("unknown node id " + std::to_string(node));
    }
    if (t < 0) {
        throw ResolutionError("node " + std::to_string(node) +
                              ": step must be non-negative");
    }
    const LayerChain chain = build_chain(p, scenario, node, t);

    ResolvedParams rp;
    const auto drift_type = chain.pattern_drift
                                ? chain.pattern_drift
                                : chain.field<Behavior>(&ParamSet::drift_type);
    auto missing = [&](const char* field) -> ResolutionError {
        return ResolutionError("node " + std::to_string(node) + " at step " +
                               std::to_string(t) + ": no value for '" + field +
                               "' at any level");
    };
    if (!drift_type) throw missing("drift_type");
    rp.drift_type = *drift_type;

    auto require = [&](std::optional<double> ParamSet::*member,
                       const char* name) -> double {
        const auto v = chain.field<double>(member);
        if (!v) throw missing(name);
        return *v;
    };
    auto optional_or = [&](std::optional<double> ParamSet::*member, double fallback) {
        return chain.field<double>(member).value_or(fallback);
    };

    switch (rp.drift_type) {
        case Behavior::mean_reverting:
            rp.kappa = require(&ParamSet::kappa, "kappa");
            rp.baseline = require(&ParamSet::baseline, "baseline");
            break;
        case Behavior::sinusoidal:
            rp.kappa = require(&ParamSet::kappa, "kappa");
            rp.baseline = require(&ParamSet::baseline, "baseline");
            rp.A = require(&ParamSet::A, "A");
            rp.omega = require(&ParamSet::omega, "omega");
            rp.phi = require(&ParamSet::phi, "phi");
            break;
        case Behavior::constant:
            rp.alpha_drift = require(&ParamSet::alpha_drift, "alpha");
            break;
        case Behavior::logistic:
            rp.r = require(&ParamSet::r, "r");
            rp.baseline = require(&ParamSet::baseline, "baseline");
            break;
    }
    rp.sigma = require(&ParamSet::sigma, "sigma");
    rp.lambda = require(&ParamSet::lambda, "lambda");
    const auto shape = chain.field<DiffusionShape>(&ParamSet::diffusion_shape);
    if (!shape) throw missing("diffusion_shape");
    rp.diffusion_shape = *shape;
    if (rp.diffusion_shape == DiffusionShape::linear) {
        rp.diffusion_alpha = require(&ParamSet::diffusion_alpha, "diffusion_alpha");
    } else {
        rp.diffusion_alpha = optional_or(&ParamSet::diffusion_alpha, 0.0);
    }
    // Fill the remaining fields so ResolvedParams is fully populated.
    if (rp.drift_type != Behavior::mean_reverting &&
        rp.drift_type != Behavior::sinusoidal) {
        rp.kappa = optional_or(&ParamSet::kappa, 0.0);
    }
    if (rp.drift_type == Behavior::constant) {
        rp.baseline = optional_or(&ParamSet::baseline, 0.0);
    }
    if (rp.drift_type != Behavior::sinusoidal) {
        rp.A = optional_or(&ParamSet::A, 0.0);
        rp.omega = optional_or(&ParamSet::omega, 0.0);
        rp.phi = optional_or(&ParamSet::phi, 0.0);
    }
    if (rp.drift_type != Behavior::constant) {
        rp.alpha_drift = optional_or(&ParamSet::alpha_drift, 0.0);
    }
    if (rp.drift_type != Behavior::logistic) {
        rp.r = optional_or(&ParamSet::r, 0.0);
    }
    return rp;
}

std::optional<double> resolve_numeric_field(const SdeParameters& p,
                                            const StructuredScenario& scenario,
                                            int node, std::int64_t t,
                                            const std::string& field) {
    if (!scenario.find_node(node)) {
        throw IndexError("unknown node id " + std::to_string(node));
    }
    const LayerChain chain = build_chain(p, scenario, node, t);
    static const std::map<std::string, std::optional<double> ParamSet::*> fields = {
        {"kappa", &ParamSet::kappa},
        {"baseline", &ParamSet::baseline},
        {"lambda", &ParamSet::lambda},
        {"sigma", &ParamSet::sigma},
        {"A", &ParamSet::A},
        {"omega", &ParamSet::omega},
        {"phi", &ParamSet::phi},
        {"alpha_drift", &ParamSet::alpha_drift},
        {"diffusion_alpha", &ParamSet::diffusion_alpha},
        {"r", &ParamSet::r},
    };
    auto it = fields.find(field);
    if (it == fields.end()) {
        throw ResolutionError("unknown parameter field '" + field + "'");
    }
    return chain.field<double>(it->second);
}

std::optional<DiffusionShape> resolve_shape_field(const SdeParameters& p,
                                                  const StructuredScenario& scenario,
                                                  int node, std::int64_t t) {
    if (!scenario.find_node(node)) {
        throw IndexError("unknown node id " + std::to_string(node));
    }
    return build_chain(p, scenario, node, t).field<DiffusionShape>(
        &ParamSet::diffusion_shape);
}

namespace {

void check_param_set(const ParamSet& ps, const std::string& where,
                     ValidationReport& report) {
    if (ps.kappa && (*ps.kappa < 0.01 || *ps.kappa > 0.5)) {
        report.add("KAPPA-RANGE", where,
                   "kappa " + std::to_string(*ps.kappa) + " outside [0.01, 0.5]",
                   "choose a mean-reversion speed within the stable band");
    }
    if (ps.lambda && (*ps.lambda < 0.8 || *ps.lambda > 1.5)) {
        report.add("LAMBDA-RANGE", where,
                   "lambda " + std::to_string(*ps.lambda) + " outside [0.8, 1.5]",
                   "choose a coupling strength within the stated band");
    }
    if (ps.r && (*ps.r <= 0.0 || *ps.r > 0.1)) {
        report.add("R-RANGE", where,
                   "r " + std::to_string(*ps.r) + " outside (0, 0.1]",
                   "choose a logistic growth rate within the stated band");
    }
    if (ps.drift_type && *ps.drift_type == Behavior::sinusoidal) {
        if (ps.A && !(*ps.A > 0.0)) {
            report.add("SINUSOIDAL", where, "sinusoidal amplitude A must be > 0",
                       "set a positive amplitude");
        }
        if (ps.omega && !(*ps.omega > 0.0)) {
            report.add("SINUSOIDAL", where, "sinusoidal omega must be > 0",
                       "set a positive angular frequency");
        }
    }
    if (ps.sigma && *ps.sigma < 0.0) {
        report.add("SIGMA-RANGE", where, "sigma must be non-negative",
                   "use sigma >= 0");
    }
    if (ps.sigma && ps.baseline && *ps.baseline > 0.0 &&
        *ps.sigma >= 0.05 * *ps.baseline) {
        report.warn("SIGMA", where,
                    "sigma " + std::to_string(*ps.sigma) +
                        " is large relative to baseline " + std::to_string(*ps.baseline),
                    "consider sigma below 5% of the baseline");
    }
    if (ps.diffusion_alpha && *ps.diffusion_alpha < 0.0) {
        report.add("DIFFUSION-ALPHA", where, "diffusion_alpha must be >= 0",
                   "use a non-negative slope");
    } else if (ps.diffusion_alpha && *ps.diffusion_alpha > 1.0) {
        report.warn("DIFFUSION-ALPHA", where,
                    "diffusion_alpha above 1 amplifies noise strongly",
                    "consider a slope at or below 1");
    }
}

}  // namespace

ValidationReport validate_params(const SdeParameters& p,
                                 const StructuredScenario& scenario) {
    ValidationReport report;
    check_param_set(p.global_defaults, "global_defaults", report);
    for (const auto& [name, ps] : p.group_params) {
        check_param_set(ps, "group_params." + name, report);
    }
    for (const auto& [id, ov] : p.node_overrides) {
        const std::string where = "node_overrides." + std::to_string(id);
        if (!scenario.find_node(id)) {
            report.add("UNKNOWN-NODE", where,
                       "override names node " + std::to_string(id) +
                           " which is not in the scenario",
                       "drop the override or fix the node id");
            continue;
        }
        check_param_set(ov.extra, where, report);
        if (ov.drift_patterns) {
            for (std::size_t i = 0; i < ov.drift_patterns->size(); ++i) {
                check_param_set((*ov.drift_patterns)[i].params,
                                where + ".drift_patterns[" + std::to_string(i) + "]",
                                report);
            }
        }
    }

    // Propagation nodes may only carry mean-reverting or logistic drift.
    for (const auto& node : scenario.nodes) {
        if (node.node_type != NodeType::propagation) continue;
        const std::string where = "node " + std::to_string(node.id);
        auto flag = [&](Behavior b, const std::string& ctx) {
            if (b == Behavior::sinusoidal || b == Behavior::constant) {
                report.add("TYPE-DRIFT", where,
                           "propagation node assigned " + to_string(b) +
                               " drift (" + ctx + ")",
                           "use mean_reverting or logistic drift for relay nodes");
            }
        };
        auto it = p.node_overrides.find(node.id);
        if (it != p.node_overrides.end() && it->second.drift_patterns &&
            !it->second.drift_patterns->empty()) {
            for (const auto& cfg : *it->second.drift_patterns) {
                flag(cfg.drift_type, "pattern " + cfg.time_range.text());
            }
        } else {
            // Fall back to the layered default drift type.
            std::optional<Behavior> b;
            if (it != p.node_overrides.end()) {
                b = it->second.extra.drift_type;
                if (!b && !it->second.group.empty()) {
                    if (auto git = p.group_params.find(it->second.group);
                        git != p.group_params.end()) {
                        b = git->second.drift_type;
                    }
                }
            }
            if (!b) b = p.global_defaults.drift_type;
            if (b) flag(*b, "default drift");
        }
    }
    return report;
}

double drift(const ResolvedParams& rp, double x, double t) {
    switch (rp.drift_type) {
        case Behavior::mean_reverting:
            return rp.kappa * (rp.baseline - x);
        case Behavior::constant:
            return rp.alpha_drift;
        case Behavior::sinusoidal:
            return rp.kappa * (rp.baseline + rp.A * std::sin(rp.omega * t + rp.phi) - x);
        case Behavior::logistic:
            if (rp.baseline == 0.0) {
                throw ResolutionError("logistic drift with baseline 0 is singular");
            }
            return rp.r * x * (1.0 - x / rp.baseline);
    }
    return 0.0;
}

double diffusion(const ResolvedParams& rp, double x) {
    switch (rp.diffusion_shape) {
        case DiffusionShape::constant:
            return 1.0;
        case DiffusionShape::sqrt:
            return std::sqrt(std::abs(x) + 1e-6);
        case DiffusionShape::linear:
            return 1.0 + rp.diffusion_alpha * std::abs(x);
    }
    return 1.0;
}

}  // namespace stsim
