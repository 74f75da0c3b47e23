#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace casc {

// Splits on a single-character delimiter. Empty fields are kept, so the
// result has exactly one more element than the number of delimiters.
std::vector<std::string_view> split_fields(std::string_view line, char delim);

// Shortest decimal string that strtod parses back to the identical double.
// NaN prints as "nan", infinities as "inf"/"-inf".
std::string fmt_double(double v);

bool parse_i64(std::string_view s, std::int64_t& out);
bool parse_u64(std::string_view s, std::uint64_t& out);
bool parse_double(std::string_view s, double& out);

}  // namespace casc
