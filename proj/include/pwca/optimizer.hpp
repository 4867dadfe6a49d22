#pragma once

#include <functional>

#include "pwca/geometry.hpp"

namespace pwca {

struct OptimizerOptions {
  /// Iteration cap per simplex run; 0 selects 200 * (parameter count).
  int max_iterations = 0;
  double x_tolerance = 1e-6;
  double f_tolerance = 1e-9;
  /// Re-initializations of the simplex around the best point after the
  /// first run. Stops early once a run brings no improvement.
  int restarts = 1;

  /// Throws kParameter when a tolerance is not positive or a count is < 1.
  void validate() const;
};

struct MinimizeResult {
  Vector x;
  double f = 0.0;
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
};

using Objective = std::function<double(const Vector&)>;

/// Nelder-Mead simplex search with dimension-adaptive coefficients.
/// Non-finite objective values inside the search count as +infinity; a
/// non-finite value at x0 raises kInvalidStart.
MinimizeResult minimize(const Objective& objective, const Vector& x0,
                        const OptimizerOptions& options = {});

}  // namespace pwca
