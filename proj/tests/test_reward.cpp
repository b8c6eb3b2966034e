#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "stsim/reward.hpp"

using namespace stsim;

TEST_CASE("answer extraction enforces the strict schema") {
    SUBCASE("canonical response") {
        const ParsedResponse p = extract_answer("<think>x</think><answer>A</answer>");
        CHECK(p.well_formed);
        CHECK(p.think == "x");
        CHECK(p.answer == "A");
    }
    SUBCASE("missing think block") {
        const ParsedResponse p = extract_answer("<answer>A</answer>");
        CHECK_FALSE(p.well_formed);
        CHECK(p.answer == "A");
    }
    SUBCASE("trailing content") {
        const ParsedResponse p =
            extract_answer("<think>t</think><answer>B</answer> extra");
        CHECK_FALSE(p.well_formed);
        CHECK(p.answer == "B");
    }
    SUBCASE("surrounding whitespace is fine") {
        CHECK(extract_answer("  <think>t</think>\n<answer>B</answer>\n").well_formed);
    }
    SUBCASE("duplicated tags") {
        CHECK_FALSE(extract_answer("<think>a</think><think>b</think><answer>C</answer>")
                        .well_formed);
    }
    SUBCASE("tags out of order") {
        CHECK_FALSE(extract_answer("<answer>A</answer><think>t</think>").well_formed);
    }
}

TEST_CASE("format reward is the schema indicator") {
    CHECK(format_reward("<think>x</think><answer>A</answer>") == 1.0);
    CHECK(format_reward("<think>x</think>") == 0.0);
    CHECK(format_reward("<answer>A</answer><think>x</think>") == 0.0);
}

TEST_CASE("choice reward normalizes the decision only") {
    CHECK(choice_reward("A", "A") == 1.0);
    CHECK(choice_reward("B", "A") == 0.0);
    CHECK(choice_reward(" a.", "A") == 1.0);
    CHECK(choice_reward("Answer: C", "c") == 1.0);
    CHECK(choice_reward("answer:  d.", "D") == 1.0);
    CHECK(choice_reward("", "A") == 0.0);
}

TEST_CASE("number extraction keeps order and accepts scientific notation") {
    const auto nums = extract_numbers("[20, 10] then -3.5 and 1e-2, .5 last 2E+3");
    REQUIRE(nums.size() == 6);
    CHECK(nums[0] == 20.0);
    CHECK(nums[1] == 10.0);
    CHECK(nums[2] == -3.5);
    CHECK(nums[3] == 0.01);
    CHECK(nums[4] == 0.5);
    CHECK(nums[5] == 2000.0);
    CHECK(extract_numbers("no idea").empty());
}

TEST_CASE("forecast reward reproduces the hand-derived examples") {
    const RewardConfig cfg;
    SUBCASE("perfect forecast with length bonus saturates at one") {
        CHECK(forecast_reward("[10, 10]", {10.0, 10.0}, cfg) == 1.0);
    }
    SUBCASE("no numbers scores zero") {
        CHECK(forecast_reward("no idea", {5.0}, cfg) == 0.0);
    }
    SUBCASE("half-right two-step forecast") {
        CHECK(forecast_reward("[20, 10]", {10.0, 10.0}, cfg) ==
              doctest::Approx(0.6).epsilon(1e-9));
    }
    SUBCASE("short prediction pads with zero and loses the bonus") {
        // One number against two targets: step scores ~1 and 0, no bonus.
        CHECK(forecast_reward("10", {10.0, 10.0}, cfg) ==
              doctest::Approx(0.5).epsilon(1e-6));
    }
    SUBCASE("long prediction truncates and loses the bonus") {
        CHECK(forecast_reward("[10, 10, 10]", {10.0, 10.0}, cfg) ==
              doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("forecast reward stays in range and decays with error") {
    const RewardConfig cfg;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> value(-100.0, 100.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double gold = value(rng);
        const double base_err = std::abs(value(rng));
        double previous = 2.0;
        for (double scale : {0.0, 0.25, 0.5, 1.0, 2.0}) {
            const double prediction = gold + scale * base_err;
            const double r = forecast_reward(std::to_string(prediction), {gold}, cfg);
            CHECK(r >= 0.0);
            CHECK(r <= 1.0);
            CHECK(r <= previous + 1e-12);  // non-increasing in |error|
            previous = r;
        }
    }
}

TEST_CASE("combined reward weights task and format") {
    const RewardConfig cfg;  // lambda 0.5
    CHECK(combined_reward("<think>t</think><answer>A</answer>", Gold{std::string("A")},
                          cfg) == 1.0);
    CHECK(combined_reward("<think>t</think><answer>[20, 10]</answer>",
                          Gold{std::vector<double>{10.0, 10.0}}, cfg) ==
          doctest::Approx(0.8).epsilon(1e-9));
    // No answer tag: format 0 and the task path sees an empty answer.
    CHECK(combined_reward("<think>t</think> A", Gold{std::string("A")}, cfg) == 0.0);
    // Well-formed but empty answer: reward collapses to lambda * format.
    CHECK(combined_reward("<think>t</think><answer></answer>",
                          Gold{std::string("A")}, cfg) == doctest::Approx(0.5));
}

TEST_CASE("s-grpo piecewise bonus") {
    const RewardConfig cfg;  // alpha 0.1, beta 0.8
    GroupRollout g;
    g.with_spatial = {{"", 0.8}, {"", 0.3}, {"", 0.4}};
    g.without_spatial = {{"", 0.5}, {"", 0.5}, {"", 0.5}};
    const auto rewards = sgrpo_rewards(g, cfg);
    REQUIRE(rewards.size() == 3);
    CHECK(rewards[0] == doctest::Approx(0.9));  // 0.8 > 0.4 -> bonus
    CHECK(rewards[1] == doctest::Approx(0.3));  // 0.3 < 0.4 -> none
    CHECK(rewards[2] == doctest::Approx(0.4));  // 0.4 == 0.4 -> strict, none
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        const double delta = rewards[i] - g.with_spatial[i].reward;
        CHECK((delta == 0.0 || std::abs(delta - cfg.alpha) < 1e-15));
        CHECK(rewards[i] >= g.with_spatial[i].reward);
    }
}

TEST_CASE("s-grpo rejects mismatched group shapes") {
    GroupRollout g;
    g.with_spatial = {{"", 0.5}};
    g.without_spatial = {{"", 0.5}, {"", 0.6}};
    CHECK_THROWS_AS(sgrpo_rewards(g), std::invalid_argument);
}

TEST_CASE("group-mean pairing compares against the ns average") {
    RewardConfig cfg;
    GroupRollout g;
    g.with_spatial = {{"", 0.5}, {"", 0.3}};
    g.without_spatial = {{"", 0.0}, {"", 0.8}};  // mean 0.4, beta*mean 0.32
    const auto rewards = sgrpo_rewards(g, cfg, SgrpoPairing::group_mean);
    CHECK(rewards[0] == doctest::Approx(0.6));
    CHECK(rewards[1] == doctest::Approx(0.3));  // 0.3 < 0.32
}

TEST_CASE("group advantages standardize with the population std") {
    SUBCASE("degenerate group") {
        CHECK(group_advantages({1.0, 1.0, 1.0, 1.0}) ==
              std::vector<double>{0.0, 0.0, 0.0, 0.0});
    }
    SUBCASE("two-point group") {
        const auto a = group_advantages({0.0, 1.0});
        CHECK(a[0] == doctest::Approx(-1.0));
        CHECK(a[1] == doctest::Approx(1.0));
    }
    SUBCASE("zero mean and unit variance") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> value(0.0, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> rewards(8);
            for (double& r : rewards) r = value(rng);
            const auto a = group_advantages(rewards);
            double mean = 0.0, var = 0.0;
            for (double v : a) mean += v;
            mean /= a.size();
            for (double v : a) var += (v - mean) * (v - mean);
            var /= a.size();
            CHECK(std::abs(mean) < 1e-9);
            CHECK(std::abs(var - 1.0) < 1e-9);
        }
    }
    SUBCASE("affine reward changes keep the ordering") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> value(0.0, 1.0);
        std::vector<double> rewards(8);
        for (double& r : rewards) r = value(rng);
        const auto base = group_advantages(rewards);
        std::vector<double> scaled(8);
        for (int i = 0; i < 8; ++i) scaled[i] = 3.7 * rewards[i] + 11.0;
        const auto shifted = group_advantages(scaled);
        for (int i = 0; i < 8; ++i) {
            for (int j = 0; j < 8; ++j) {
                CHECK((base[i] < base[j]) == (shifted[i] < shifted[j]));
            }
        }
    }
    SUBCASE("empty group is an error") {
        CHECK_THROWS_AS(group_advantages({}), std::invalid_argument);
    }
}

TEST_CASE("score metrics aggregate accuracy and mae") {
    SUBCASE("choice accuracy") {
        std::vector<ScoreRecord> records = {
            {"A", Gold{std::string("A")}},
            {"B", Gold{std::string("B")}},
            {"C", Gold{std::string("A")}},
            {"a", Gold{std::string("A")}},
        };
        const Metrics m = score_metrics(records);
        CHECK(m.accuracy == doctest::Approx(0.75));
        CHECK(m.choice_count == 4);
    }
    SUBCASE("exact forecasts have zero mae") {
        std::vector<ScoreRecord> records = {
            {"[10, 20]", Gold{std::vector<double>{10.0, 20.0}}}};
        CHECK(score_metrics(records).mae == doctest::Approx(0.0));
    }
    SUBCASE("hand-computed mae") {
        std::vector<ScoreRecord> records = {
            {"[20, 10]", Gold{std::vector<double>{10.0, 10.0}}}};
        CHECK(score_metrics(records).mae == doctest::Approx(5.0));
    }
    SUBCASE("empty input is an error") {
        CHECK_THROWS_AS(score_metrics({}), std::invalid_argument);
    }
}
