#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ledgermine {

// Seconds since the Unix epoch, UTC. Second resolution everywhere; DSL
// windows given in hours convert exactly (1h = 3600s).
using Instant = std::int64_t;

constexpr std::int64_t kSecondsPerHour = 3600;
constexpr std::int64_t kSecondsPerDay = 86400;

// Strict ISO-8601 UTC, e.g. "2018-10-08T07:30:00Z". No offsets, no
// fractional seconds.
std::optional<Instant> parse_instant(std::string_view iso);
std::string format_instant(Instant t);

// 0 = Sunday .. 6 = Saturday.
int day_of_week(Instant t);

// Quarter-day band: 0 = [00,06), 1 = [06,12), 2 = [12,18), 3 = [18,24).
int hour_band(Instant t);

}  // namespace ledgermine
