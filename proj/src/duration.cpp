#include "stsim/duration.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "stsim/errors.hpp"

namespace stsim {
namespace {

double unit_minutes(const std::string& unit) {
    std::string u = unit;
    std::transform(u.begin(), u.end(), u.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (!u.empty() && u.back() == 's') u.pop_back();
    if (u == "minute") return 1.0;
    if (u == "hour") return 60.0;
    if (u == "day") return 1440.0;
    if (u == "week") return 10080.0;
    if (u == "month") return 43200.0;   // 30 days
    if (u == "year") return 525600.0;   // 365 days
    throw ParseError("duration", "UNIT", "unknown unit '" + unit + "'");
}

}  // namespace

double parse_duration_minutes(const std::string& text) {
    std::istringstream in(text);
    double value = 0.0;
    std::string unit;
    if (!(in >> value) || !(in >> unit)) {
        throw ParseError("duration", "FORMAT",
                         "expected '<number> <unit>', got '" + text + "'");
    }
    if (!(value > 0.0)) {
        throw ParseError("duration", "POSITIVE",
                         "duration must be positive: '" + text + "'");
    }
    return value * unit_minutes(unit);
}

std::int64_t infer_seq_len(const std::string& time_span,
                           const std::string& sampling_frequency) {
    const double span = parse_duration_minutes(time_span);
    const double freq = parse_duration_minutes(sampling_frequency);
    const auto steps = static_cast<std::int64_t>(std::floor(span / freq));
    if (steps < 1) {
        throw ParseError("duration", "SEQ-LEN",
                         "time span '" + time_span + "' is shorter than one '" +
                             sampling_frequency + "' interval");
    }
    return steps;
}

}  // namespace stsim
