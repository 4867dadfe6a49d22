#pragma once

#include <string>
#include <vector>

#include "pwca/problem.hpp"

namespace pwca {

enum class SolveStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kTimeLimit,
  kFailure,  // numerical breakdown or iteration limit; see message
};

std::string_view to_string(SolveStatus s);

struct LpSolution {
  SolveStatus status = SolveStatus::kFailure;
  double objective = 0.0;      // in the problem's own sense
  std::vector<double> values;  // per variable, declaration order
  int iterations = 0;
  std::string message;
};

/// LP relaxation (binaries in [0, 1]) by a bounded-variable revised primal
/// simplex; Dantzig pricing with a switch to Bland's rule on stalling.
LpSolution solve_lp(const MilpProblem& problem);

struct MilpOptions {
  double time_limit_seconds = kInfinity;
  /// Absolute gap between incumbent and best bound that counts as proven.
  double gap_tolerance = 1e-6;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::kFailure;
  double objective = 0.0;
  std::vector<double> values;  // binaries rounded to exactly 0 or 1
  bool has_incumbent = false;
  /// Best proven bound on the optimum, in the problem's own sense.
  double best_bound = 0.0;
  long node_count = 0;
  long lp_iterations = 0;
  double wall_seconds = 0.0;
  std::string message;
};

/// LP-based branch and bound: best-bound node selection with newest-first
/// tie breaking, most-fractional branching, no presolve and no cuts.
MilpSolution solve_milp(const MilpProblem& problem, const MilpOptions& options = {});

}  // namespace pwca
