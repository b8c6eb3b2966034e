#include "doctest.h"

#include <cmath>

#include "stsim/errors.hpp"
#include "stsim/params.hpp"
#include "test_util.hpp"

using namespace stsim;
using nlohmann::json;

TEST_CASE("showcase parameters parse into the hierarchy") {
    const SdeParameters p = testutil::showcase_params();
    CHECK(p.global_defaults.kappa == 0.25);
    CHECK(p.global_defaults.diffusion_shape == DiffusionShape::sqrt);
    CHECK(p.group_params.at("demand_sources").lambda == 0.9);
    CHECK(p.group_params.at("propagation_nodes").sigma == 0.3);
    REQUIRE(p.node_overrides.count(0));
    REQUIRE(p.node_overrides.at(0).drift_patterns);
    CHECK(p.node_overrides.at(0).drift_patterns->size() == 3);
    CHECK(p.node_overrides.at(0).group == "demand_sources");
}

TEST_CASE("override group must exist") {
    json doc = testutil::fixture_json("listing2.json");
    doc["node_overrides"]["0"]["group"] = "no_such_group";
    CHECK_THROWS_AS(parse_params(doc), ParseError);
}

TEST_CASE("bare alpha maps by context") {
    SUBCASE("constant drift") {
        const json doc = {{"global_defaults",
                           {{"drift_type", "constant"}, {"alpha", 1.5}}}};
        const SdeParameters p = parse_params(doc);
        CHECK(p.global_defaults.alpha_drift == 1.5);
        CHECK_FALSE(p.global_defaults.diffusion_alpha);
    }
    SUBCASE("linear diffusion shape") {
        const json doc = {{"global_defaults",
                           {{"diffusion_shape", "linear"}, {"alpha", 0.02}}}};
        const SdeParameters p = parse_params(doc);
        CHECK(p.global_defaults.diffusion_alpha == 0.02);
        CHECK_FALSE(p.global_defaults.alpha_drift);
    }
}

TEST_CASE("resolution follows pattern, override, group, global precedence") {
    const StructuredScenario s = testutil::showcase_scenario();
    const SdeParameters p = testutil::showcase_params();

    SUBCASE("showcase node 0 at t=20 sits in the sinusoidal window") {
        const ResolvedParams rp = resolve_node_params(p, s, 0, 20);
        CHECK(rp.drift_type == Behavior::sinusoidal);
        CHECK(rp.A == 300.0);
        CHECK(rp.omega == doctest::Approx(0.1309));
        CHECK(rp.phi == doctest::Approx(-1.7262));
        CHECK(rp.kappa == 0.25);
        CHECK(rp.sigma == 0.8);
        CHECK(rp.lambda == 0.9);  // from the demand_sources group
        CHECK(rp.diffusion_shape == DiffusionShape::sqrt);  // global
    }
    SUBCASE("fallback chain with sentinels at each layer") {
        SdeParameters layered;
        layered.global_defaults.drift_type = Behavior::mean_reverting;
        layered.global_defaults.kappa = 0.11;
        layered.global_defaults.baseline = 1.0;
        layered.global_defaults.sigma = 0.1;
        layered.global_defaults.lambda = 1.0;
        layered.global_defaults.diffusion_shape = DiffusionShape::constant;
        ParamSet group;
        group.baseline = 2.0;
        group.sigma = 0.2;
        layered.group_params["g"] = group;
        NodeOverride ov;
        ov.group = "g";
        ov.extra.sigma = 0.3;
        layered.node_overrides[0] = ov;

        const ResolvedParams rp = resolve_node_params(layered, s, 0, 0);
        CHECK(rp.kappa == 0.11);      // global
        CHECK(rp.baseline == 2.0);    // group beats global
        CHECK(rp.sigma == 0.3);       // override beats group
    }
    SUBCASE("repeat wraps the pattern lookup") {
        const ResolvedParams rp = resolve_node_params(p, s, 0, 50);  // t' = 2
        CHECK(rp.drift_type == Behavior::mean_reverting);
        CHECK(rp.baseline == 100.0);
        CHECK(rp.sigma == 0.5);
    }
    SUBCASE("resolution is cycle-consistent") {
        for (std::int64_t t = 0; t < 48; ++t) {
            CHECK(resolve_node_params(p, s, 0, t) == resolve_node_params(p, s, 0, t + 48));
        }
    }
    SUBCASE("uncovered steps keep the nearest preceding pattern") {
        StructuredScenario plain = s;
        plain.drift_patterns.repeat = false;
        plain.drift_patterns.repeat_period.reset();
        SdeParameters q = testutil::showcase_params();
        auto& configs = *q.node_overrides.at(0).drift_patterns;
        configs.resize(2);  // last window now ends at step 34 (exclusive 35)
        const ResolvedParams rp = resolve_node_params(q, plain, 0, 40);
        CHECK(rp.drift_type == Behavior::sinusoidal);
        CHECK(rp.A == 300.0);
    }
    SUBCASE("missing required field names node, step and field") {
        SdeParameters bare;
        bare.global_defaults.drift_type = Behavior::sinusoidal;
        bare.global_defaults.kappa = 0.25;
        bare.global_defaults.baseline = 100.0;
        bare.global_defaults.sigma = 0.5;
        bare.global_defaults.lambda = 1.0;
        bare.global_defaults.diffusion_shape = DiffusionShape::constant;
        // A, omega, phi absent everywhere.
        try {
            resolve_node_params(bare, s, 1, 5);
            FAIL("expected ResolutionError");
        } catch (const ResolutionError& e) {
            const std::string what = e.what();
            CHECK(what.find("node 1") != std::string::npos);
            CHECK(what.find("step 5") != std::string::npos);
            CHECK(what.find("'A'") != std::string::npos);
        }
    }
}

TEST_CASE("showcase parameters are approved without warnings") {
    const ValidationReport report =
        validate_params(testutil::showcase_params(), testutil::showcase_scenario());
    CHECK(report.approved());
    CHECK(report.warnings.empty());
}

TEST_CASE("parameter rule violations") {
    const StructuredScenario s = testutil::showcase_scenario();
    SUBCASE("kappa outside the stable band") {
        SdeParameters p = testutil::showcase_params();
        p.group_params["demand_sources"].kappa = 0.9;
        const auto report = validate_params(p, s);
        REQUIRE_FALSE(report.approved());
        CHECK(report.violations.front().rule_id == "KAPPA-RANGE");
    }
    SUBCASE("lambda 0.8 is inside the band (the approved sample uses it)") {
        SdeParameters p = testutil::showcase_params();
        const auto report = validate_params(p, s);
        CHECK(report.approved());
        p.group_params["propagation_nodes"].lambda = 0.79;
        CHECK_FALSE(validate_params(p, s).approved());
    }
    SUBCASE("propagation node with sinusoidal drift") {
        SdeParameters p = testutil::showcase_params();
        auto& configs = *p.node_overrides.at(1).drift_patterns;
        configs[0].drift_type = Behavior::sinusoidal;
        configs[0].params.drift_type = Behavior::sinusoidal;
        configs[0].params.A = 10.0;
        configs[0].params.omega = 0.1;
        configs[0].params.phi = 0.0;
        const auto report = validate_params(p, s);
        bool fired = false;
        for (const auto& v : report.violations) fired |= v.rule_id == "TYPE-DRIFT";
        CHECK(fired);
    }
    SUBCASE("propagation node with constant default drift") {
        SdeParameters p = testutil::showcase_params();
        p.node_overrides.at(1).drift_patterns.reset();
        p.group_params["propagation_nodes"].drift_type = Behavior::constant;
        const auto report = validate_params(p, s);
        bool fired = false;
        for (const auto& v : report.violations) fired |= v.rule_id == "TYPE-DRIFT";
        CHECK(fired);
    }
    SUBCASE("logistic growth rate out of band") {
        SdeParameters p = testutil::showcase_params();
        p.global_defaults.r = 0.5;
        CHECK_FALSE(validate_params(p, s).approved());
    }
    SUBCASE("sigma plausibility is a warning, not a failure") {
        SdeParameters p = testutil::showcase_params();
        p.group_params["demand_sources"].sigma = 50.0;  // vs baseline 100
        const auto report = validate_params(p, s);
        CHECK(report.approved());
        CHECK_FALSE(report.warnings.empty());
        CHECK(report.warnings.front().rule_id == "SIGMA");
    }
    SUBCASE("override for a node outside the scenario") {
        SdeParameters p = testutil::showcase_params();
        p.node_overrides[7] = p.node_overrides.at(1);
        const auto report = validate_params(p, s);
        bool fired = false;
        for (const auto& v : report.violations) fired |= v.rule_id == "UNKNOWN-NODE";
        CHECK(fired);
    }
}

TEST_CASE("drift formulas") {
    ResolvedParams rp;
    SUBCASE("mean reverting") {
        rp.drift_type = Behavior::mean_reverting;
        rp.kappa = 0.25;
        rp.baseline = 100.0;
        CHECK(drift(rp, 100.0, 0.0) == 0.0);
        CHECK(drift(rp, 80.0, 0.0) == doctest::Approx(5.0));
    }
    SUBCASE("logistic carrying capacity is a fixed point") {
        rp.drift_type = Behavior::logistic;
        rp.r = 0.05;
        rp.baseline = 100.0;
        CHECK(drift(rp, 100.0, 0.0) == 0.0);
        CHECK(drift(rp, 50.0, 0.0) == doctest::Approx(0.05 * 50.0 * 0.5));
        rp.baseline = 0.0;
        CHECK_THROWS_AS(drift(rp, 1.0, 0.0), ResolutionError);
    }
    SUBCASE("constant") {
        rp.drift_type = Behavior::constant;
        rp.alpha_drift = -2.5;
        CHECK(drift(rp, 123.0, 9.0) == -2.5);
    }
    SUBCASE("sinusoidal tracks a bounded moving target") {
        rp.drift_type = Behavior::sinusoidal;
        rp.kappa = 0.25;
        rp.baseline = 100.0;
        rp.A = 300.0;
        rp.omega = 0.1309;
        rp.phi = -1.7262;
        for (double t = 0.0; t < 48.0; t += 0.25) {
            const double target = rp.baseline + rp.A * std::sin(rp.omega * t + rp.phi);
            CHECK(std::abs(target - rp.baseline) <= rp.A + 1e-12);
            for (double x : {-50.0, 0.0, 100.0, 450.0}) {
                // Drift pushes toward the instantaneous target.
                CHECK(drift(rp, x, t) * (target - x) >= 0.0);
            }
        }
    }
}

TEST_CASE("mean reversion sign holds for sampled states") {
    ResolvedParams rp;
    rp.drift_type = Behavior::mean_reverting;
    rp.kappa = 0.25;
    rp.baseline = 100.0;
    for (double x = -200.0; x <= 400.0; x += 7.0) {
        CHECK(drift(rp, x, 0.0) * (rp.baseline - x) >= 0.0);
    }
}

TEST_CASE("diffusion shapes") {
    ResolvedParams rp;
    SUBCASE("constant is one everywhere") {
        rp.diffusion_shape = DiffusionShape::constant;
        CHECK(diffusion(rp, -17.0) == 1.0);
        CHECK(diffusion(rp, 12345.0) == 1.0);
    }
    SUBCASE("sqrt shape at x = 4") {
        rp.diffusion_shape = DiffusionShape::sqrt;
        CHECK(diffusion(rp, 4.0) == doctest::Approx(2.00000025).epsilon(1e-12));
        CHECK(diffusion(rp, -4.0) == diffusion(rp, 4.0));
    }
    SUBCASE("linear shape at the origin") {
        rp.diffusion_shape = DiffusionShape::linear;
        rp.diffusion_alpha = 0.7;
        CHECK(diffusion(rp, 0.0) == 1.0);
        CHECK(diffusion(rp, 10.0) == doctest::Approx(8.0));
    }
    SUBCASE("positive under every shape") {
        for (auto shape : {DiffusionShape::constant, DiffusionShape::sqrt,
                           DiffusionShape::linear}) {
            rp.diffusion_shape = shape;
            rp.diffusion_alpha = 0.5;
            for (double x = -100.0; x <= 100.0; x += 9.0) {
                CHECK(diffusion(rp, x) > 0.0);
            }
        }
    }
}

TEST_CASE("linear shape requires its slope at resolution") {
    const StructuredScenario s = testutil::showcase_scenario();
    SdeParameters p;
    p.global_defaults.drift_type = Behavior::mean_reverting;
    p.global_defaults.kappa = 0.25;
    p.global_defaults.baseline = 100.0;
    p.global_defaults.sigma = 0.5;
    p.global_defaults.lambda = 1.0;
    p.global_defaults.diffusion_shape = DiffusionShape::linear;
    CHECK_THROWS_AS(resolve_node_params(p, s, 0, 0), ResolutionError);
    p.global_defaults.diffusion_alpha = 0.1;
    CHECK(resolve_node_params(p, s, 0, 0).diffusion_alpha == 0.1);
}

TEST_CASE("parse of serialize is the identity on parameters") {
    const SdeParameters p = testutil::showcase_params();
    CHECK(parse_params(serialize_params(p)) == p);
}
