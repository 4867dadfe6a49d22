#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "pwca/dataset.hpp"
#include "pwca/geometry.hpp"
#include "pwca/optimizer.hpp"

namespace pwca {

enum class Orientation {
  kConvex,   // max of planes
  kConcave,  // min of planes
};

std::string_view to_string(Orientation o);
Orientation parse_orientation(std::string_view s);

/// y of the plane at x: the root of [1, x, y] . a = 0.
/// Throws kVerticalPlane when a_n is zero.
double plane_value(const Hyperplane& plane, const Eigen::Ref<const Vector>& x);

/// Max (convex) or min (concave) of hyperplanes.
struct ConvexModel {
  std::vector<Hyperplane> planes;
  Orientation orientation = Orientation::kConvex;
  int dimension = 0;  // n
  Domain domain;      // bounds of the data the model was fitted to

  /// Throws kParameter / kVerticalPlane on a malformed model.
  void validate() const;
};

double evaluate_convex(const ConvexModel& model,
                       const Eigen::Ref<const Vector>& x);

struct ConvexFit {
  ConvexModel model;
  double rmse = 0.0;     // without the corner penalty
  double penalty = 0.0;  // corner penalty at the optimum
  bool converged = false;
  int refits = 0;        // re-runs triggered by dominated planes
};

/// Least-squares max-of-planes fit (min-of-planes for concave) with the
/// corner penalty that keeps planes from being dominated everywhere.
/// Requires N_data >= n_hyp * (n + 1).
ConvexFit fit_convex(const Dataset& data, int n_hyp, Orientation orientation,
                     const OptimizerOptions& options = {},
                     std::uint64_t seed = 0);

double rmse(const ConvexModel& model, const Dataset& data);

/// Indices of planes that are not the unique maximizer (minimizer for
/// concave models) at any vertex of a `per_dim`-per-dimension grid.
std::vector<int> dominated_planes(const ConvexModel& model, int per_dim = 50);

/// Negates a_0..a_{n-1} of every plane and flips the orientation; maps the
/// model of data d onto the model of -d.
ConvexModel mirrored(const ConvexModel& model);

void write_convex_model(std::ostream& out, const ConvexModel& model);
ConvexModel read_convex_model(std::istream& in);

}  // namespace pwca
