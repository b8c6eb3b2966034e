#include "doctest.h"

#include "stsim/adjacency.hpp"
#include "stsim/errors.hpp"
#include "test_util.hpp"

using namespace stsim;
using nlohmann::json;

TEST_CASE("showcase modulation document parses with its base matrix") {
    const ModulationDocument doc = testutil::showcase_modulation();
    REQUIRE(doc.modulation.patterns.size() == 2);
    CHECK(doc.modulation.patterns[0].time_range == TimeRange{14, 19});
    CHECK(doc.modulation.patterns[0].edge_modulations.at("2->1").multiplier == 15.0);
    REQUIRE(doc.base_adjacency);
    CHECK(doc.base_adjacency->at(0, 1) == 0.1);
    CHECK(doc.base_adjacency->at(0, 2) == 0.0);
}

TEST_CASE("multiplier defaults to one outside every window") {
    const TimeModulation m = testutil::showcase_modulation().modulation;
    CHECK(multiplier_at(m, {0, 1}, 18) == 15.0);
    CHECK(multiplier_at(m, {0, 1}, 5) == 1.0);
    CHECK(multiplier_at(m, {0, 1}, 30) == 1.0);
    CHECK(multiplier_at(m, {2, 1}, 14) == 15.0);
}

TEST_CASE("overlapping windows intensify via the maximum") {
    TimeModulation m;
    ModulationPattern a;
    a.time_range = {10, 20};
    a.edge_modulations["0->1"] = {5.0, ""};
    ModulationPattern b;
    b.time_range = {15, 25};
    b.edge_modulations["0->1"] = {12.0, ""};
    m.patterns = {a, b};
    CHECK(multiplier_at(m, {0, 1}, 12) == 5.0);
    CHECK(multiplier_at(m, {0, 1}, 17) == 12.0);
    CHECK(multiplier_at(m, {0, 1}, 23) == 12.0);
}

TEST_CASE("effective weight is the base entry times the multiplier") {
    const ModulationDocument doc = testutil::showcase_modulation();
    const TimeModulation& m = doc.modulation;
    const BaseAdjacency& b = *doc.base_adjacency;
    CHECK(effective_weight(b, m, {2, 1}, 15) == doctest::Approx(1.5));
    CHECK(effective_weight(b, m, {2, 1}, 30) == doctest::Approx(0.1));
    CHECK(effective_weight(b, m, {0, 2}, 15) == 0.0);  // non-edge stays zero
    CHECK_THROWS_AS(effective_weight(b, m, {0, 9}, 0), IndexError);
}

TEST_CASE("effective weight equals the base outside every window") {
    const ModulationDocument doc = testutil::showcase_modulation();
    const StructuredScenario s = testutil::showcase_scenario();
    for (const auto& e : s.edges) {
        for (std::int64_t t = 0; t < s.seq_len; ++t) {
            const bool morning = t >= 14 && t <= 19 &&
                                 ((e.source == 2 && e.target == 1) ||
                                  (e.source == 1 && e.target == 0));
            const bool evening = t >= 17 && t <= 22 &&
                                 ((e.source == 0 && e.target == 1) ||
                                  (e.source == 1 && e.target == 2));
            const double w = effective_weight(*doc.base_adjacency, doc.modulation,
                                              {e.source, e.target}, t);
            if (morning || evening) {
                CHECK(w == doctest::Approx(1.5));
            } else {
                CHECK(w == doctest::Approx(0.1));
            }
        }
    }
}

TEST_CASE("effective weight scales linearly with the base entry") {
    ModulationDocument doc = testutil::showcase_modulation();
    const double c = 3.5;
    BaseAdjacency scaled = *doc.base_adjacency;
    for (auto& row : scaled.matrix) {
        for (double& v : row) v *= c;
    }
    for (std::int64_t t = 0; t < 48; ++t) {
        CHECK(effective_weight(scaled, doc.modulation, {0, 1}, t) ==
              doctest::Approx(c * effective_weight(*doc.base_adjacency, doc.modulation,
                                                   {0, 1}, t)));
    }
}

TEST_CASE("modulation validation against the scenario") {
    const StructuredScenario s = testutil::showcase_scenario();
    SUBCASE("showcase pair is approved") {
        const auto report =
            validate_modulation(testutil::showcase_modulation().modulation, s);
        CHECK(report.approved());
    }
    SUBCASE("strong band breach") {
        ModulationDocument doc = testutil::showcase_modulation();
        doc.modulation.patterns[0].edge_modulations.at("2->1").multiplier = 25.0;
        const auto report = validate_modulation(doc.modulation, s);
        REQUIRE_FALSE(report.approved());
        CHECK(report.violations.front().rule_id == "MULTIPLIER-BAND");
    }
    SUBCASE("unknown edge") {
        ModulationDocument doc = testutil::showcase_modulation();
        doc.modulation.patterns[0].edge_modulations["2->0"] = {15.0, ""};
        const auto report = validate_modulation(doc.modulation, s);
        bool fired = false;
        for (const auto& v : report.violations) fired |= v.rule_id == "UNKNOWN-EDGE";
        CHECK(fired);
    }
    SUBCASE("overlapping windows on one edge warn") {
        ModulationDocument doc = testutil::showcase_modulation();
        ModulationPattern extra;
        extra.time_range = {15, 18};
        extra.edge_modulations["2->1"] = {12.0, ""};
        doc.modulation.patterns.push_back(extra);
        const auto report = validate_modulation(doc.modulation, s);
        bool warned = false;
        for (const auto& w : report.warnings) warned |= w.rule_id == "OVERLAP";
        CHECK(warned);
    }
}

TEST_CASE("default base adjacency puts 0.1 on every edge") {
    const StructuredScenario s = testutil::showcase_scenario();
    const BaseAdjacency b = default_base_adjacency(s);
    CHECK(b == *testutil::showcase_modulation().base_adjacency);
}

TEST_CASE("base adjacency rules") {
    const StructuredScenario s = testutil::showcase_scenario();
    SUBCASE("diagonal must be zero") {
        BaseAdjacency b = default_base_adjacency(s);
        b.matrix[1][1] = 0.2;
        const auto report = validate_base_adjacency(b, s);
        REQUIRE_FALSE(report.approved());
        CHECK(report.violations.front().rule_id == "BASE-DIAGONAL");
    }
    SUBCASE("nonzero entries must sit exactly on edges") {
        BaseAdjacency b = default_base_adjacency(s);
        b.matrix[0][2] = 0.1;  // not an edge
        CHECK_FALSE(validate_base_adjacency(b, s).approved());
        b = default_base_adjacency(s);
        b.matrix[0][1] = 0.0;  // edge with zero weight
        CHECK_FALSE(validate_base_adjacency(b, s).approved());
    }
    SUBCASE("shape mismatch") {
        BaseAdjacency b;
        b.matrix = {{0.0, 0.1}, {0.1, 0.0}};
        CHECK_FALSE(validate_base_adjacency(b, s).approved());
    }
}

TEST_CASE("multiplier must be positive at parse") {
    json doc = testutil::fixture_json("listing3.json");
    doc["time_modulation"]["patterns"][0]["edge_modulations"]["2->1"]["multiplier"] = 0.0;
    CHECK_THROWS_AS(parse_modulation(doc), ParseError);
}

TEST_CASE("parse of serialize is the identity on modulation documents") {
    const ModulationDocument doc = testutil::showcase_modulation();
    CHECK(parse_modulation(serialize_modulation(doc)) == doc);
}
