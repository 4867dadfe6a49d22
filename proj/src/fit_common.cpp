#include "fit_common.hpp"

#include <cmath>

namespace pwca::detail {

std::vector<Vector> box_corners(const Vector& lower, const Vector& upper) {
  const int d = static_cast<int>(lower.size());
  std::vector<Vector> corners;
  corners.reserve(std::size_t{1} << d);
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    Vector c(d);
    for (int j = 0; j < d; ++j) c[j] = (mask >> j) & 1u ? upper[j] : lower[j];
    corners.push_back(std::move(c));
  }
  return corners;
}

NormalizedData::NormalizedData(const Dataset& data)
    : count(data.size()),
      dims(data.input_dims()),
      x_lower(data.domain().x_lower),
      x_width(data.domain().x_upper - data.domain().x_lower),
      y_min(data.domain().y_min) {
  const double yr = data.domain().y_range();
  y_scale = yr > 0.0 ? yr : 1.0;
  x.resize(static_cast<std::size_t>(count) * dims);
  y.resize(static_cast<std::size_t>(count));
  for (int m = 0; m < count; ++m) {
    for (int j = 0; j < dims; ++j) {
      x[static_cast<std::size_t>(m) * dims + j] =
          (data.x()(m, j) - x_lower[j]) / x_width[j];
    }
    y[static_cast<std::size_t>(m)] = (data.y()[m] - y_min) / y_scale;
  }
}

Vector least_squares_plane(const NormalizedData& data,
                           const std::vector<int>& subset) {
  const int rows = subset.empty() ? data.count : static_cast<int>(subset.size());
  Matrix a(rows, data.dims + 1);
  Vector b(rows);
  for (int r = 0; r < rows; ++r) {
    const int m = subset.empty() ? r : subset[static_cast<std::size_t>(r)];
    a(r, 0) = 1.0;
    for (int j = 0; j < data.dims; ++j) a(r, j + 1) = data.row(m)[j];
    b[r] = data.y[static_cast<std::size_t>(m)];
  }
  return a.completeOrthogonalDecomposition().solve(b);
}

}  // namespace pwca::detail
