#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lanexit::csv {

/// Splits a CSV line on commas and trims surrounding whitespace. Quoting is
/// not supported; none of the formats read here need it.
std::vector<std::string_view> split(std::string_view line);

std::string_view trim(std::string_view s);

/// Locale-independent number parsing; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

/// Shortest round-trip decimal representation, independent of locale.
std::string format_number(double v);
std::string format_optional(const std::optional<double>& v);

}  // namespace lanexit::csv
