#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace boostkit::detail {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

/// Parses a finite decimal number; accepts a leading '+' and surrounding blanks.
std::optional<double> parse_finite(std::string_view text);

std::optional<long long> parse_integer(std::string_view text);

std::string_view trim(std::string_view text);

std::vector<std::string_view> split_fields(std::string_view line, char separator);

} // namespace boostkit::detail
