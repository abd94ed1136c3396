#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace decaymap {

// Shortest text form that parses back to the identical double.
std::string format_double(double v);
double parse_double(std::string_view s);
std::int64_t parse_int(std::string_view s);

// UTC calendar month index (year * 12 + month-1) of an epoch timestamp.
// Used for "number of active months" style bucketing.
std::int64_t month_index(std::int64_t epoch_seconds);

// FNV-1a 64-bit, used for workspace input digests.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ull);
std::string digest_hex(std::uint64_t digest);

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

constexpr double kMinutesPerDay = 1440.0;
constexpr std::int64_t kSecondsPerDay = 86400;

} // namespace decaymap
