#pragma once

#include <cstdint>
#include <string>

namespace stsim {

/// Parses "<number> <unit>" with unit in {minutes, hours, days, weeks,
/// months, years} (singular forms accepted; month = 30 days, year = 365
/// days). Returns the duration in minutes. Throws ParseError on unknown
/// unit, bad number, or non-positive value.
double parse_duration_minutes(const std::string& text);

/// seq_len = floor(time_span / sampling_frequency). Throws ParseError when
/// either text is malformed or the ratio is below one.
std::int64_t infer_seq_len(const std::string& time_span,
                           const std::string& sampling_frequency);

}  // namespace stsim
