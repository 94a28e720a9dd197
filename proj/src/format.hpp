#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace aaseq::detail {

/// Shortest representation that parses back to the same double.
std::string format_double(double value);
/// Throws InvalidParameter naming `op` on malformed input.
double parse_double(std::string_view text, const char* op);
long long parse_int(std::string_view text, const char* op);

/// Splits on '\n', dropping a trailing '\r' per line and a final empty line.
std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char sep);

}  // namespace aaseq::detail
