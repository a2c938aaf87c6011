#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace depwatch {

std::string ascii_lower(std::string_view s);
std::string trim(std::string_view s);

/// Lowercase and collapse internal whitespace runs to single spaces.
std::string normalize_surface(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

bool starts_with(std::string_view s, std::string_view prefix);

/// Parses "YYYY-MM-DD" or "YYYY-MM-DDTHH:MM:SSZ" as UTC seconds since epoch.
std::optional<std::int64_t> parse_iso8601_utc(std::string_view s);
std::string format_iso8601_utc(std::int64_t epoch_seconds);

/// Current time, unless the DEPWATCH_NOW environment variable pins a fixed
/// ISO-8601 instant (used for reproducible runs).
std::int64_t now_utc();

/// 32-bit FNV-1a, the stable hash behind minted intelligence identifiers.
std::uint32_t fnv1a32(std::string_view s);

}  // namespace depwatch
