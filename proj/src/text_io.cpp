#include "text_io.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "pwca/error.hpp"

namespace pwca::detail {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view token) {
  const std::string s(token);
  if (s == "inf" || s == "+inf" || s == "infinity" || s == "+infinity") {
    return std::numeric_limits<double>::infinity();
  }
  if (s == "-inf" || s == "-infinity") {
    return -std::numeric_limits<double>::infinity();
  }
  if (s.empty()) throw Error(ErrorCode::kParse, "expected a number, got ''");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || std::isnan(v)) {
    throw Error(ErrorCode::kParse, "expected a number, got '" + s + "'");
  }
  return v;
}

long long parse_int(std::string_view token) {
  const std::string s(token);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw Error(ErrorCode::kParse, "expected an integer, got '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    std::string_view field = line.substr(start, pos - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
      field.remove_prefix(1);
    }
    while (!field.empty() &&
           (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
      field.remove_suffix(1);
    }
    out.emplace_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

std::vector<std::string> expect_keyword(std::istream& in,
                                        std::string_view keyword) {
  std::string line;
  if (!next_content_line(in, line)) {
    throw Error(ErrorCode::kParse,
                "unexpected end of input, expected '" + std::string(keyword) + "'");
  }
  auto tokens = split_ws(line);
  if (tokens.empty() || tokens.front() != keyword) {
    throw Error(ErrorCode::kParse, "expected '" + std::string(keyword) +
                                       "', got '" + line + "'");
  }
  tokens.erase(tokens.begin());
  return tokens;
}

}  // namespace pwca::detail
