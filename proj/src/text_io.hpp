#pragma once

// Number formatting and line tokenizing shared by the plain-text formats.

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace pwca::detail {

/// 17 significant digits; parses back to the identical double.
std::string format_double(double v);

/// Whole-token parse, accepting inf/-inf. Throws Error(kParse).
double parse_double(std::string_view token);
long long parse_int(std::string_view token);

std::vector<std::string> split(std::string_view line, char sep);
std::vector<std::string> split_ws(std::string_view line);

/// Next line that is neither empty nor a '#' comment; false at EOF.
bool next_content_line(std::istream& in, std::string& line);

/// Reads the next content line and checks that it starts with `keyword`.
/// Returns the remaining whitespace-separated tokens.
std::vector<std::string> expect_keyword(std::istream& in,
                                        std::string_view keyword);

}  // namespace pwca::detail
