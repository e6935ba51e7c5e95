#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mlkfhe {

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

/// Fixed-point with `digits` decimals.
std::string format_fixed(double value, int digits);

/// Parses the whole of `text` (after trimming) as a double.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

std::string_view trim(std::string_view text);

/// Splits one CSV record, honouring double-quoted fields with "" escapes.
/// Returns std::nullopt on an unterminated quote.
std::optional<std::vector<std::string>> split_csv_record(std::string_view line, char sep = ',');

/// Quotes a field if it contains the separator, quotes or line breaks.
std::string csv_field(std::string_view text);

std::string join_csv(const std::vector<std::string>& fields);

}  // namespace mlkfhe
