#include "pwca/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "pwca/error.hpp"
#include "text_io.hpp"

namespace pwca {

namespace {

void check_shapes(const Matrix& x, const Vector& y) {
  if (y.size() < 1) {
    throw Error(ErrorCode::kParameter, "dataset needs at least one point");
  }
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::kParameter, "dataset x/y row counts differ");
  }
  if (x.cols() < 1) {
    throw Error(ErrorCode::kInvalidDimension,
                "dataset needs at least one input dimension");
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw Error(ErrorCode::kParameter, "dataset contains non-finite values");
  }
}

Domain make_domain(const Matrix& x, const Vector& y, Vector lo, Vector hi) {
  for (int j = 0; j < lo.size(); ++j) {
    if (!(lo[j] < hi[j])) {
      throw Error(ErrorCode::kParameter,
                  "degenerate bounds for x" + std::to_string(j + 1));
    }
  }
  for (int m = 0; m < x.rows(); ++m) {
    for (int j = 0; j < x.cols(); ++j) {
      if (x(m, j) < lo[j] || x(m, j) > hi[j]) {
        throw Error(ErrorCode::kDomain,
                    "sample " + std::to_string(m) + " lies outside the bounds");
      }
    }
  }
  return Domain{std::move(lo), std::move(hi), y.minCoeff(), y.maxCoeff()};
}

}  // namespace

Box Domain::translation_box() const {
  const int d = input_dims();
  Box box{Vector(d + 1), Vector(d + 1)};
  box.lower.head(d) = x_lower;
  box.upper.head(d) = x_upper;
  double margin = 0.05 * y_range();
  if (!(margin > 0.0)) margin = 0.05 * std::max(1.0, std::abs(y_max));
  box.lower[d] = y_min - margin;
  box.upper[d] = y_max + margin;
  return box;
}

Dataset::Dataset(Matrix x, Vector y) : x_(std::move(x)), y_(std::move(y)) {
  check_shapes(x_, y_);
  domain_ = make_domain(x_, y_, x_.colwise().minCoeff().transpose(),
                        x_.colwise().maxCoeff().transpose());
}

Dataset::Dataset(Matrix x, Vector y, Vector x_lower, Vector x_upper)
    : x_(std::move(x)), y_(std::move(y)) {
  check_shapes(x_, y_);
  if (x_lower.size() != x_.cols() || x_upper.size() != x_.cols()) {
    throw Error(ErrorCode::kParameter, "bounds size does not match dataset");
  }
  domain_ = make_domain(x_, y_, std::move(x_lower), std::move(x_upper));
}

Dataset Dataset::negated() const {
  return Dataset(x_, -y_, domain_.x_lower, domain_.x_upper);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  for (int j = 0; j < data.input_dims(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (int m = 0; m < data.size(); ++m) {
    for (int j = 0; j < data.input_dims(); ++j) {
      out << detail::format_double(data.x()(m, j)) << ',';
    }
    out << detail::format_double(data.y()[m]) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed to write dataset");
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!detail::next_content_line(in, line)) {
    throw Error(ErrorCode::kParse, "dataset CSV is empty");
  }
  const auto header = detail::split(line, ',');
  const int cols = static_cast<int>(header.size());
  if (cols < 2 || header.back() != "y") {
    throw Error(ErrorCode::kParse, "dataset header must be x1,...,x{n-1},y");
  }
  for (int j = 0; j + 1 < cols; ++j) {
    if (header[static_cast<std::size_t>(j)] != "x" + std::to_string(j + 1)) {
      throw Error(ErrorCode::kParse, "dataset header must be x1,...,x{n-1},y");
    }
  }
  std::vector<double> values;
  int rows = 0;
  while (detail::next_content_line(in, line)) {
    const auto fields = detail::split(line, ',');
    if (static_cast<int>(fields.size()) != cols) {
      throw Error(ErrorCode::kParse, "dataset row " + std::to_string(rows + 1) +
                                         " has " + std::to_string(fields.size()) +
                                         " fields, expected " + std::to_string(cols));
    }
    for (const auto& f : fields) values.push_back(detail::parse_double(f));
    ++rows;
  }
  if (rows == 0) throw Error(ErrorCode::kParse, "dataset CSV has no rows");
  Matrix x(rows, cols - 1);
  Vector y(rows);
  for (int m = 0; m < rows; ++m) {
    for (int j = 0; j + 1 < cols; ++j) {
      x(m, j) = values[static_cast<std::size_t>(m * cols + j)];
    }
    y[m] = values[static_cast<std::size_t>(m * cols + cols - 1)];
  }
  return Dataset(std::move(x), std::move(y));
}

}  // namespace pwca
