#include "stsim/reward.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>
#include <stdexcept>

namespace stsim {
namespace {

bool whitespace_only(const std::string& text, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end && i < text.size(); ++i) {
        if (!std::isspace(static_cast<unsigned char>(text[i]))) return false;
    }
    return true;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (auto pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size())) {
        ++count;
    }
    return count;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string normalize_choice(const std::string& raw) {
    std::string s = trim(raw);
    std::string lower = s;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower.rfind("answer", 0) == 0) {
        std::size_t pos = 6;
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos < s.size() && s[pos] == ':') {
            s = trim(s.substr(pos + 1));
        }
    }
    while (!s.empty()) {
        const char c = s.back();
        if (c == '.' || c == ',' || c == '!' || c == '?' || c == ':' || c == ';') {
            s.pop_back();
        } else {
            break;
        }
    }
    s = trim(s);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

ParsedResponse extract_answer(const std::string& response) {
    ParsedResponse out;
    const std::string think_open = "<think>";
    const std::string think_close = "</think>";
    const std::string answer_open = "<answer>";
    const std::string answer_close = "</answer>";

    const auto to_pos = response.find(think_open);
    const auto tc_pos = response.find(think_close);
    const auto ao_pos = response.find(answer_open);
    const auto ac_pos = response.find(answer_close);

    if (to_pos != std::string::npos && tc_pos != std::string::npos && tc_pos > to_pos) {
        out.think = response.substr(to_pos + think_open.size(),
                                    tc_pos - to_pos - think_open.size());
    }
    if (ao_pos != std::string::npos && ac_pos != std::string::npos && ac_pos > ao_pos) {
        out.answer = response.substr(ao_pos + answer_open.size(),
                                     ac_pos - ao_pos - answer_open.size());
    }

    out.well_formed =
        to_pos != std::string::npos && tc_pos != std::string::npos &&
        ao_pos != std::string::npos && ac_pos != std::string::npos &&
        to_pos < tc_pos && tc_pos < ao_pos && ao_pos < ac_pos &&
        count_occurrences(response, think_open) == 1 &&
        count_occurrences(response, think_close) == 1 &&
        count_occurrences(response, answer_open) == 1 &&
        count_occurrences(response, answer_close) == 1 &&
        whitespace_only(response, 0, to_pos) &&
        whitespace_only(response, tc_pos + think_close.size(), ao_pos) &&
        whitespace_only(response, ac_pos + answer_close.size(), response.size());
    return out;
}

double format_reward(const std::string& response) {
    return extract_answer(response).well_formed ? 1.0 : 0.0;
}

double choice_reward(const std::string& answer, const std::string& gold) {
    return normalize_choice(answer) == normalize_choice(gold) ? 1.0 : 0.0;
}

std::vector<double> extract_numbers(const std::string& text) {
    static const std::regex number_re(
        R"([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)");
    std::vector<double> out;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), number_re);
         it != std::sregex_iterator(); ++it) {
        out.push_back(std::stod(it->str()));
    }
    return out;
}

double forecast_reward(const std::string& answer, const std::vector<double>& gold,
                       const RewardConfig& cfg) {
    if (gold.empty()) {
        throw std::invalid_argument("forecast gold sequence must be non-empty");
    }
    std::vector<double> predicted = extract_numbers(answer);
    if (predicted.empty()) return 0.0;
    const bool exact_length = predicted.size() == gold.size();
    predicted.resize(gold.size(), 0.0);  // pad with zeros / truncate

    double total = 0.0;
    for (std::size_t t = 0; t < gold.size(); ++t) {
        const double rel = (std::abs(predicted[t] - gold[t]) + cfg.epsilon) /
                           (std::abs(gold[t]) + cfg.epsilon);
        total += 1.0 - std::min(1.0, rel);
    }
    double score = total / static_cast<double>(gold.size());
    if (exact_length) score += cfg.length_bonus;
    return std::clamp(score, 0.0, 1.0);
}

double combined_reward(const std::string& response, const Gold& gold,
                       const RewardConfig& cfg) {
    const ParsedResponse parsed = extract_answer(response);
    const double r_format = parsed.well_formed ? 1.0 : 0.0;
    double r_task = 0.0;
    if (std::holds_alternative<std::string>(gold)) {
        r_task = choice_reward(parsed.answer, std::get<std::string>(gold));
    } else {
        r_task = forecast_reward(parsed.answer, std::get<std::vector<double>>(gold), cfg);
    }
    return (1.0 - cfg.lambda) * r_task + cfg.lambda * r_format;
}

std::vector<double> sgrpo_rewards(const GroupRollout& g, const RewardConfig& cfg,
                                  SgrpoPairing pairing) {
    if (g.with_spatial.size() != g.without_spatial.size()) {
        throw std::invalid_argument(
            "group shapes differ: " + std::to_string(g.with_spatial.size()) +
            " with-spatial vs " + std::to_string(g.without_spatial.size()) +
            " without-spatial responses");
    }
    double ns_mean = 0.0;
    if (pairing == SgrpoPairing::group_mean && !g.without_spatial.empty()) {
        for (const auto& r : g.without_spatial) ns_mean += r.reward;
        ns_mean /= static_cast<double>(g.without_spatial.size());
    }
    std::vector<double> out;
    out.reserve(g.with_spatial.size());
    for (std::size_t i = 0; i < g.with_spatial.size(); ++i) {
        const double r_sp = g.with_spatial[i].reward;
        const double r_ns = pairing == SgrpoPairing::by_index
                                ? g.without_spatial[i].reward
                                : ns_mean;
        out.push_back(r_sp > cfg.beta * r_ns ? r_sp + cfg.alpha : r_sp);
    }
    return out;
}

std::vector<double> group_advantages(const std::vector<double>& rewards) {
    if (rewards.empty()) {
        throw std::invalid_argument("advantage group must be non-empty");
    }
    const double n = static_cast<double>(rewards.size());
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= n;
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    var /= n;  // population variance
    const double std_dev = std::sqrt(var);
    std::vector<double> out(rewards.size(), 0.0);
    if (std_dev < 1e-8) return out;
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        out[i] = (rewards[i] - mean) / std_dev;
    }
    return out;
}

Metrics score_metrics(const std::vector<ScoreRecord>& records) {
    if (records.empty()) {
        throw std::invalid_argument("score_metrics needs at least one record");
    }
    Metrics m;
    double correct = 0.0;
    double abs_error = 0.0;
    std::size_t forecast_steps = 0;
    for (const auto& rec : records) {
        if (std::holds_alternative<std::string>(rec.gold)) {
            correct += choice_reward(rec.answer, std::get<std::string>(rec.gold));
            ++m.choice_count;
        } else {
            const auto& gold = std::get<std::vector<double>>(rec.gold);
            std::vector<double> predicted = extract_numbers(rec.answer);
            predicted.resize(gold.size(), 0.0);
            for (std::size_t t = 0; t < gold.size(); ++t) {
                abs_error += std::abs(predicted[t] - gold[t]);
            }
            forecast_steps += gold.size();
            ++m.forecast_count;
        }
    }
    m.accuracy = m.choice_count ? correct / static_cast<double>(m.choice_count) : 0.0;
    m.mae = forecast_steps ? abs_error / static_cast<double>(forecast_steps) : 0.0;
    return m;
}

}  // namespace stsim
