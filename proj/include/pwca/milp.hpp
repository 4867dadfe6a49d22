#pragma once

#include <string>
#include <vector>

#include "pwca/convex_fit.hpp"
#include "pwca/dataset.hpp"
#include "pwca/problem.hpp"
#include "pwca/pwca.hpp"

namespace pwca {

/// Big-M coefficients of a PwCA block.
struct BigMSet {
  double m_t_plus = 0.0;   // >= 0, interface row active when t = 0
  double m_t_minus = 0.0;  // <= 0, interface row active when t = 1
  std::vector<double> m_i_minus;  // lower planes over the upper region, <= 0
  std::vector<double> m_i_plus;   // upper planes over the lower region, <= 0
  /// Concave models only: each plane over its own region, used when the
  /// pair selector is off. Empty for convex models.
  std::vector<double> select_minus;
  std::vector<double> select_plus;
};

/// Bounds of p = (x_1, ..., x_{n-1}, y) must be finite (kUnboundedBigM).
/// M_t come from the box corners; each M_i solves
/// min a_i . [1, p] over the box intersected with the opposite region.
/// Empty regions give 0.
BigMSet big_m_values(const PwcaModel& model, const Box& box);

/// Names used for the model's own variables.
struct BlockNames {
  std::vector<std::string> x;  // x1 .. x{n-1} when empty
  std::string y = "y";
};

/// A self-contained fragment: the model's x and y variables, its binaries
/// and rows, no objective.
struct ModelBlock {
  MilpProblem problem;
  std::vector<int> x_vars;
  int y_var = -1;
  /// Continuous variables other than x and y.
  int auxiliary_continuous() const {
    return problem.continuous_count() - static_cast<int>(x_vars.size()) - 1;
  }
};

/// MILP form of a PwCA for problems that minimize y (or anything
/// increasing in y). Convex models: binary t, rows ifc_lo, ifc_hi,
/// lo<i>, up<i> (N_hyp + 2 rows). Concave models add one selector b<i> per
/// pair and the row sel: sum b = 1.
ModelBlock translate_pwca(const PwcaModel& model, const Box& box,
                          const BlockNames& names = {});

/// Convex model in a minimization (concave in a maximization): one row per
/// plane. The other two combinations add a binary b<i> per plane with a
/// big-M row each and the row sel: sum b = 1.
ModelBlock translate_convex(const ConvexModel& model, Sense sense,
                            const Box& box, const BlockNames& names = {});

/// Default template for replicated names.
inline constexpr const char* kReplicaTemplate = "{name}_{index}";

/// `count` disjoint copies; names come from `name_template`, where {name}
/// is the original name and {index} the copy number starting at 1. Copy c
/// (zero based) of variable j has index c * V + j, and likewise for rows.
/// The block objective, if any, is summed over the copies.
MilpProblem replicate(const MilpProblem& block, int count,
                      const std::string& name_template = kReplicaTemplate);

}  // namespace pwca
