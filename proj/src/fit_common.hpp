#pragma once

// Pieces shared by the convex and piecewise-convex fitters.

#include <cstdint>
#include <random>
#include <vector>

#include "pwca/dataset.hpp"

namespace pwca::detail {

/// Corner penalty weight applied to squared distances measured in units of
/// the data's y range. Not scaled with the sample count, so the penalty stays
/// well below the squared error at any data size.
inline constexpr double kPenaltyWeight = 1e-3;

/// Uniform double in [0, 1) from the top 53 bits; identical on every
/// standard library, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// All 2^d corners of the x box, ordered by the bits of the corner index.
std::vector<Vector> box_corners(const Vector& lower, const Vector& upper);

/// Data mapped to the unit box: x~ = (x - lo) / width, y~ = (y - y_min) / yr.
/// Stored row-major for tight evaluation loops.
struct NormalizedData {
  int count = 0;
  int dims = 0;
  std::vector<double> x;  // count * dims
  std::vector<double> y;
  Vector x_lower;
  Vector x_width;
  double y_min = 0.0;
  double y_scale = 1.0;

  explicit NormalizedData(const Dataset& data);
  const double* row(int m) const { return x.data() + static_cast<std::size_t>(m) * dims; }
};

/// Ordinary least-squares plane y = b0 + sum b_j x_j over the rows in
/// `subset` (all rows when empty), minimum-norm if rank deficient.
Vector least_squares_plane(const NormalizedData& data,
                           const std::vector<int>& subset = {});

}  // namespace pwca::detail
