#pragma once

#include <string>
#include <variant>
#include <vector>

namespace stsim {

struct ParsedResponse {
    std::string think;
    std::string answer;
    bool well_formed = false;

    bool operator==(const ParsedResponse&) const = default;
};

/// Defaults mirror the reward design exactly: lambda 0.5, epsilon 1e-9,
/// length bonus 0.1, spatial bonus alpha 0.1, tolerance beta 0.8.
struct RewardConfig {
    double lambda = 0.5;
    double epsilon = 1e-9;
    double length_bonus = 0.1;
    double alpha = 0.1;
    double beta = 0.8;
};

/// Single-label gold (multiple choice) or a numeric target sequence.
using Gold = std::variant<std::string, std::vector<double>>;

struct ScoredResponse {
    std::string response;
    double reward = 0.0;
};

/// Paired rollouts for one question: responses generated with and without
/// the spatial structure in the prompt, aligned by index.
struct GroupRollout {
    std::string question_id;
    std::vector<ScoredResponse> with_spatial;
    std::vector<ScoredResponse> without_spatial;
};

enum class SgrpoPairing {
    by_index,     // r_i^sp vs r_i^ns, as written
    group_mean,   // r_i^sp vs mean(r^ns); exploratory variant
};

/// Strict schema: exactly one <think> block followed by one <answer> block
/// with nothing but whitespace outside. Tag contents are still captured on
/// malformed input when the tags exist.
ParsedResponse extract_answer(const std::string& response);

/// 1 iff the response matches the strict schema.
double format_reward(const std::string& response);

/// 1 iff the normalized answer equals the normalized gold label (trimmed,
/// case-folded, trailing punctuation stripped, "Answer:" prefix accepted).
double choice_reward(const std::string& answer, const std::string& gold);

/// All real numbers in the text, in order of appearance (signed decimals
/// and scientific notation).
std::vector<double> extract_numbers(const std::string& text);

/// Mean over steps of 1 - min(1, (|y_hat - y| + eps) / (|y| + eps)), with
/// predictions padded with zeros or truncated to the gold length. No
/// numbers at all scores 0; an exact length match earns the bonus before
/// clipping to [0, 1].
double forecast_reward(const std::string& answer, const std::vector<double>& gold,
                       const RewardConfig& cfg = {});

/// (1 - lambda) * task + lambda * format; the task path reads only the
/// extracted answer field.
double combined_reward(const std::string& response, const Gold& gold,
                       const RewardConfig& cfg = {});

/// R_i = r_i_sp + alpha when r_i_sp > beta * r_i_ns (strict), else r_i_sp.
std::vector<double> sgrpo_rewards(const GroupRollout& g, const RewardConfig& cfg = {},
                                  SgrpoPairing pairing = SgrpoPairing::by_index);

/// (R_i - mean) / population std; all zeros when the std is degenerate.
std::vector<double> group_advantages(const std::vector<double>& rewards);

struct ScoreRecord {
    std::string answer;  // extracted answer field
    Gold gold;
};

struct Metrics {
    double accuracy = 0.0;
    double mae = 0.0;
    std::size_t choice_count = 0;
    std::size_t forecast_count = 0;
};

/// accuracy over choice records, MAE over all forecast steps.
Metrics score_metrics(const std::vector<ScoreRecord>& records);

}  // namespace stsim
