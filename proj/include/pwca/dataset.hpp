#pragma once

#include <iosfwd>

#include "pwca/geometry.hpp"

namespace pwca {

/// Axis-aligned box over (x_1, ..., x_{n-1}, y); finite bounds are needed
/// wherever a model is turned into big-M constraints.
struct Box {
  Vector lower;
  Vector upper;

  int dimension() const { return static_cast<int>(lower.size()); }
  friend bool operator==(const Box&, const Box&) = default;
};

/// Bounds of the sampled function: x box plus the observed y range.
struct Domain {
  Vector x_lower;
  Vector x_upper;
  double y_min = 0.0;
  double y_max = 0.0;

  int input_dims() const { return static_cast<int>(x_lower.size()); }
  double y_range() const { return y_max - y_min; }
  /// Euclidean length of the x box diagonal.
  double diameter() const { return (x_upper - x_lower).norm(); }
  /// x bounds as given, y range widened by 5% on each side.
  Box translation_box() const;

  friend bool operator==(const Domain&, const Domain&) = default;
};

/// N samples (x, y) of an (n-1)-variate function.
class Dataset {
 public:
  /// Bounds are taken from the samples.
  Dataset(Matrix x, Vector y);
  /// Explicit x bounds; every sample must lie inside them.
  Dataset(Matrix x, Vector y, Vector x_lower, Vector x_upper);

  int size() const { return static_cast<int>(y_.size()); }
  int input_dims() const { return static_cast<int>(x_.cols()); }
  /// n, the dimension of the (x, y) space.
  int dimension() const { return input_dims() + 1; }

  const Matrix& x() const { return x_; }
  const Vector& y() const { return y_; }
  auto point(int m) const { return x_.row(m).transpose(); }
  const Domain& domain() const { return domain_; }

  /// Same x, y negated.
  Dataset negated() const;

 private:
  Matrix x_;
  Vector y_;
  Domain domain_;
};

/// CSV with header x1,...,x{n-1},y and full-precision decimals.
void write_dataset_csv(std::ostream& out, const Dataset& data);
Dataset read_dataset_csv(std::istream& in);

}  // namespace pwca
