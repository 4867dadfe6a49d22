#include "pwca/problem.hpp"

#include <algorithm>
#include <cmath>

#include "pwca/error.hpp"

namespace pwca {

int MilpProblem::add_variable(Variable v) {
  if (v.name.empty()) throw Error(ErrorCode::kNaming, "variable name is empty");
  if (v.name.find_first_of(" \t\r\n:") != std::string::npos) {
    throw Error(ErrorCode::kNaming, "variable name '" + v.name + "' contains a separator");
  }
  if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) {
    throw Error(ErrorCode::kParameter, "invalid bounds for variable '" + v.name + "'");
  }
  if (v.type == VarType::kBinary && (v.lower < 0.0 || v.upper > 1.0)) {
    throw Error(ErrorCode::kParameter, "binary '" + v.name + "' needs bounds within [0, 1]");
  }
  const int index = variable_count();
  if (!var_index_.emplace(v.name, index).second) {
    throw Error(ErrorCode::kNaming, "duplicate variable name '" + v.name + "'");
  }
  variables_.push_back(std::move(v));
  return index;
}

int MilpProblem::add_continuous(std::string name, double lower, double upper) {
  return add_variable({std::move(name), lower, upper, VarType::kContinuous});
}

int MilpProblem::add_binary(std::string name) {
  return add_variable({std::move(name), 0.0, 1.0, VarType::kBinary});
}

void MilpProblem::check_terms(const std::vector<Term>& terms) const {
  for (const Term& t : terms) {
    if (t.var < 0 || t.var >= variable_count()) {
      throw Error(ErrorCode::kParameter, "term references an undeclared variable");
    }
    if (!std::isfinite(t.coef)) {
      throw Error(ErrorCode::kParameter, "non-finite coefficient");
    }
  }
}

int MilpProblem::add_constraint(std::vector<Term> terms, Relation relation, double rhs,
                                std::string name) {
  check_terms(terms);
  if (!std::isfinite(rhs)) throw Error(ErrorCode::kParameter, "non-finite right-hand side");
  const int index = constraint_count();
  if (name.empty()) name = "c" + std::to_string(index + 1);
  if (name.find_first_of(" \t\r\n:") != std::string::npos) {
    throw Error(ErrorCode::kNaming, "row name '" + name + "' contains a separator");
  }
  if (!row_index_.emplace(name, index).second) {
    throw Error(ErrorCode::kNaming, "duplicate row name '" + name + "'");
  }
  constraints_.push_back({std::move(name), std::move(terms), relation, rhs});
  return index;
}

void MilpProblem::set_objective(std::vector<Term> terms, Sense sense) {
  check_terms(terms);
  objective_ = std::move(terms);
  sense_ = sense;
}

void MilpProblem::set_bounds(int var, double lower, double upper) {
  if (var < 0 || var >= variable_count() || !(lower <= upper)) {
    throw Error(ErrorCode::kParameter, "invalid bound change");
  }
  variables_[static_cast<std::size_t>(var)].lower = lower;
  variables_[static_cast<std::size_t>(var)].upper = upper;
}

int MilpProblem::binary_count() const {
  return static_cast<int>(std::count_if(variables_.begin(), variables_.end(), [](const Variable& v) {
    return v.type == VarType::kBinary;
  }));
}

int MilpProblem::find(const std::string& name) const {
  const auto it = var_index_.find(name);
  return it == var_index_.end() ? -1 : it->second;
}

int MilpProblem::index_of(const std::string& name) const {
  const int i = find(name);
  if (i < 0) throw Error(ErrorCode::kNaming, "unknown variable '" + name + "'");
  return i;
}

double max_violation(const MilpProblem& problem, const std::vector<double>& values) {
  double worst = 0.0;
  for (int j = 0; j < problem.variable_count(); ++j) {
    const Variable& v = problem.variable(j);
    const double x = values[static_cast<std::size_t>(j)];
    worst = std::max({worst, v.lower - x, x - v.upper});
  }
  for (const Constraint& c : problem.constraints()) {
    double lhs = 0.0;
    for (const Term& t : c.terms) lhs += t.coef * values[static_cast<std::size_t>(t.var)];
    switch (c.relation) {
      case Relation::kLessEqual: worst = std::max(worst, lhs - c.rhs); break;
      case Relation::kGreaterEqual: worst = std::max(worst, c.rhs - lhs); break;
      case Relation::kEqual: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
    }
  }
  return worst;
}

double objective_value(const MilpProblem& problem, const std::vector<double>& values) {
  double z = 0.0;
  for (const Term& t : problem.objective()) z += t.coef * values[static_cast<std::size_t>(t.var)];
  return z;
}

}  // namespace pwca
