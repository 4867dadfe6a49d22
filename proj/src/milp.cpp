#include "pwca/milp.hpp"

#include <algorithm>
#include <cmath>

#include "pwca/error.hpp"
#include "pwca/solver.hpp"

namespace pwca {

namespace {

void check_box(const Box& box, int n) {
  if (box.dimension() != n || box.upper.size() != n) {
    throw Error(ErrorCode::kInvalidDimension, "box dimension does not match the model");
  }
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(box.lower[j]) || !std::isfinite(box.upper[j])) {
      throw Error(ErrorCode::kUnboundedBigM,
                  "big-M values need finite bounds on every variable");
    }
    if (box.lower[j] > box.upper[j]) throw Error(ErrorCode::kParameter, "box bounds out of order");
  }
}

// Extremes of a . [1, p] over the box; attained at a corner.
double box_min(const Hyperplane& a, const Box& box) {
  double v = a.offset();
  for (int j = 0; j < box.dimension(); ++j) {
    const double c = a.coef(j + 1);
    v += std::min(c * box.lower[j], c * box.upper[j]);
  }
  return v;
}

double box_max(const Hyperplane& a, const Box& box) {
  double v = a.offset();
  for (int j = 0; j < box.dimension(); ++j) {
    const double c = a.coef(j + 1);
    v += std::max(c * box.lower[j], c * box.upper[j]);
  }
  return v;
}

// min a . [1, p] over the box and the half-space sign * (ifc . [1, p]) >= 0.
double region_min(const Hyperplane& a, const Hyperplane& ifc, double sign, const Box& box) {
  const int n = box.dimension();
  MilpProblem lp;
  std::vector<Term> objective, row;
  for (int j = 0; j < n; ++j) {
    lp.add_continuous("p" + std::to_string(j + 1), box.lower[j], box.upper[j]);
    objective.push_back({j, a.coef(j + 1)});
    row.push_back({j, sign * ifc.coef(j + 1)});
  }
  lp.add_constraint(row, Relation::kGreaterEqual, -sign * ifc.offset());
  lp.set_objective(objective, Sense::kMinimize);
  const LpSolution s = solve_lp(lp);
  if (s.status == SolveStatus::kInfeasible) return 0.0;
  if (s.status != SolveStatus::kOptimal) {
    throw Error(ErrorCode::kUnboundedBigM, "big-M subproblem failed: " + s.message);
  }
  return a.offset() + s.objective;
}

std::vector<Term> plane_terms(const Hyperplane& a, const ModelBlock& block) {
  std::vector<Term> t;
  for (std::size_t j = 0; j < block.x_vars.size(); ++j) {
    t.push_back({block.x_vars[j], a.coef(static_cast<int>(j) + 1)});
  }
  t.push_back({block.y_var, a.y_coef()});
  return t;
}

ModelBlock declare_xy(int n, const Box& box, const BlockNames& names) {
  if (!names.x.empty() && static_cast<int>(names.x.size()) != n - 1) {
    throw Error(ErrorCode::kNaming, "expected one name per input variable");
  }
  ModelBlock block;
  for (int j = 0; j < n - 1; ++j) {
    const std::string name =
        names.x.empty() ? "x" + std::to_string(j + 1) : names.x[static_cast<std::size_t>(j)];
    block.x_vars.push_back(block.problem.add_continuous(name, box.lower[j], box.upper[j]));
  }
  block.y_var = block.problem.add_continuous(names.y, box.lower[n - 1], box.upper[n - 1]);
  return block;
}

}  // namespace

BigMSet big_m_values(const PwcaModel& model, const Box& box) {
  model.validate();
  check_box(box, model.dimension);
  const Hyperplane& ifc = model.interface_plane;
  BigMSet m;
  m.m_t_plus = std::max(0.0, box_max(ifc, box));
  m.m_t_minus = std::min(0.0, box_min(ifc, box));
  const bool concave = model.orientation == Orientation::kConcave;
  for (std::size_t i = 0; i < model.lower.size(); ++i) {
    // Lower planes are relaxed above the interface, upper planes below it.
    m.m_i_minus.push_back(std::min(0.0, region_min(model.lower[i], ifc, 1.0, box)));
    m.m_i_plus.push_back(std::min(0.0, region_min(model.upper[i], ifc, -1.0, box)));
    if (concave) {
      m.select_minus.push_back(std::min(0.0, region_min(model.lower[i], ifc, -1.0, box)));
      m.select_plus.push_back(std::min(0.0, region_min(model.upper[i], ifc, 1.0, box)));
    }
  }
  return m;
}

ModelBlock translate_pwca(const PwcaModel& model, const Box& box, const BlockNames& names) {
  const BigMSet m = big_m_values(model, box);
  const int n = model.dimension;
  ModelBlock block = declare_xy(n, box, names);
  MilpProblem& p = block.problem;
  const int t = p.add_binary("t");
  const bool concave = model.orientation == Orientation::kConcave;
  std::vector<int> select;
  if (concave) {
    for (std::size_t i = 0; i < model.lower.size(); ++i) {
      select.push_back(p.add_binary("b" + std::to_string(i + 1)));
    }
  }

  const Hyperplane& ifc = model.interface_plane;
  auto row = plane_terms(ifc, block);
  row.push_back({t, -m.m_t_plus});
  p.add_constraint(row, Relation::kLessEqual, -ifc.offset(), "ifc_lo");
  row = plane_terms(ifc, block);
  row.push_back({t, m.m_t_minus});
  p.add_constraint(row, Relation::kGreaterEqual, m.m_t_minus - ifc.offset(), "ifc_hi");

  // Lower plane i: a.p >= M t (+ S (1 - b_i) when concave).
  for (std::size_t i = 0; i < model.lower.size(); ++i) {
    const Hyperplane& a = model.lower[i];
    row = plane_terms(a, block);
    row.push_back({t, -m.m_i_minus[i]});
    double rhs = -a.offset();
    if (concave) {
      row.push_back({select[i], m.select_minus[i]});
      rhs += m.select_minus[i];
    }
    p.add_constraint(row, Relation::kGreaterEqual, rhs, "lo" + std::to_string(i + 1));
  }
  // Upper plane i: a.p >= M (1 - t) (+ S (1 - b_i) when concave).
  for (std::size_t i = 0; i < model.upper.size(); ++i) {
    const Hyperplane& a = model.upper[i];
    row = plane_terms(a, block);
    row.push_back({t, m.m_i_plus[i]});
    double rhs = m.m_i_plus[i] - a.offset();
    if (concave) {
      row.push_back({select[i], m.select_plus[i]});
      rhs += m.select_plus[i];
    }
    p.add_constraint(row, Relation::kGreaterEqual, rhs, "up" + std::to_string(i + 1));
  }
  if (concave) {
    std::vector<Term> sum;
    for (int b : select) sum.push_back({b, 1.0});
    p.add_constraint(sum, Relation::kEqual, 1.0, "sel");
  }
  return block;
}

ModelBlock translate_convex(const ConvexModel& model, Sense sense, const Box& box,
                            const BlockNames& names) {
  model.validate();
  const int n = model.dimension;
  check_box(box, n);
  ModelBlock block = declare_xy(n, box, names);
  MilpProblem& p = block.problem;
  const bool convex = model.orientation == Orientation::kConvex;
  const bool minimize = sense == Sense::kMinimize;
  // Planes have a_n > 0, so a.p >= 0 means y above the plane.
  const Relation toward = convex ? Relation::kGreaterEqual : Relation::kLessEqual;
  if (convex == minimize) {
    for (std::size_t i = 0; i < model.planes.size(); ++i) {
      const Hyperplane& a = model.planes[i];
      p.add_constraint(plane_terms(a, block), toward, -a.offset(), "h" + std::to_string(i + 1));
    }
    return block;
  }
  // y must touch one selected plane: y >= plane_i when b_i = 1 (concave,
  // minimized), y <= plane_i (convex, maximized).
  const Relation bound = convex ? Relation::kLessEqual : Relation::kGreaterEqual;
  std::vector<int> select;
  for (std::size_t i = 0; i < model.planes.size(); ++i) {
    select.push_back(p.add_binary("b" + std::to_string(i + 1)));
  }
  for (std::size_t i = 0; i < model.planes.size(); ++i) {
    const Hyperplane& a = model.planes[i];
    const double big = convex ? std::max(0.0, box_max(a, box)) : std::min(0.0, box_min(a, box));
    // a.p (<= or >=) big * (1 - b_i)
    auto row = plane_terms(a, block);
    row.push_back({select[i], big});
    p.add_constraint(row, bound, big - a.offset(), "h" + std::to_string(i + 1));
  }
  std::vector<Term> sum;
  for (int b : select) sum.push_back({b, 1.0});
  p.add_constraint(sum, Relation::kEqual, 1.0, "sel");
  return block;
}

namespace {

std::string expand(const std::string& pattern, const std::string& name, int index) {
  std::string out;
  for (std::size_t i = 0; i < pattern.size();) {
    if (pattern.compare(i, 6, "{name}") == 0) {
      out += name;
      i += 6;
    } else if (pattern.compare(i, 7, "{index}") == 0) {
      out += std::to_string(index);
      i += 7;
    } else {
      out += pattern[i++];
    }
  }
  return out;
}

}  // namespace

MilpProblem replicate(const MilpProblem& block, int count, const std::string& name_template) {
  if (count < 1) throw Error(ErrorCode::kParameter, "replica count must be at least 1");
  if (name_template.find("{name}") == std::string::npos) {
    throw Error(ErrorCode::kNaming, "name template must contain {name}");
  }
  const int vars = block.variable_count();
  MilpProblem out;
  std::vector<Term> objective;
  for (int c = 0; c < count; ++c) {
    for (const Variable& v : block.variables()) {
      Variable copy = v;
      copy.name = expand(name_template, v.name, c + 1);
      out.add_variable(std::move(copy));
    }
    for (const Constraint& row : block.constraints()) {
      std::vector<Term> terms = row.terms;
      for (Term& t : terms) t.var += c * vars;
      out.add_constraint(std::move(terms), row.relation, row.rhs,
                         expand(name_template, row.name, c + 1));
    }
    for (Term t : block.objective()) {
      t.var += c * vars;
      objective.push_back(t);
    }
  }
  out.set_objective(std::move(objective), block.sense());
  return out;
}

}  // namespace pwca
