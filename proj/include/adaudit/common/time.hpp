#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace adaudit {

/// UTC instant with millisecond resolution (the platform's timestamp grain).
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Date = std::chrono::sys_days;

/// Parses "YYYY-MM-DDTHH:MM:SS[.fff](Z|+00:00)". Returns nullopt on anything else.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Always emits "YYYY-MM-DDTHH:MM:SS.mmmZ" so parse/format round-trips.
std::string format_timestamp(Timestamp ts);

std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date d);

Date utc_day(Timestamp ts);

/// Parses durations such as "14d", "36h", "90m", "30s", "250ms".
std::optional<std::chrono::milliseconds> parse_duration(std::string_view text);
std::string format_duration(std::chrono::milliseconds d);

}  // namespace adaudit
