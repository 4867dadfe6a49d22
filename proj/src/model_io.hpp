#pragma once

// Line parsers shared by the model file readers.

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "pwca/dataset.hpp"
#include "pwca/geometry.hpp"

namespace pwca::detail {

Domain parse_domain(const std::vector<std::string>& tokens, int n);
Hyperplane parse_plane(const std::vector<std::string>& tokens, int n);
int parse_version_header(std::istream& in, std::string_view header);
int parse_dimension(std::istream& in);

}  // namespace pwca::detail
