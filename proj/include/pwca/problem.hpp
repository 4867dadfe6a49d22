#pragma once

#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace pwca {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarType { kContinuous, kBinary };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  VarType type = VarType::kContinuous;

  friend bool operator==(const Variable&, const Variable&) = default;
};

enum class Relation { kLessEqual, kGreaterEqual, kEqual };

struct Term {
  int var = 0;
  double coef = 0.0;

  friend bool operator==(const Term&, const Term&) = default;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

enum class Sense { kMinimize, kMaximize };

/// Mixed-binary linear program. Variables and rows keep declaration order;
/// names are unique within each kind.
class MilpProblem {
 public:
  /// Throws kNaming for empty or duplicate names, kParameter for lower > upper.
  int add_variable(Variable v);
  int add_continuous(std::string name, double lower, double upper);
  int add_binary(std::string name);

  /// An empty name becomes "c<k>" with k the 1-based row number.
  int add_constraint(std::vector<Term> terms, Relation relation, double rhs,
                     std::string name = {});

  void set_objective(std::vector<Term> terms, Sense sense);
  void set_bounds(int var, double lower, double upper);

  int variable_count() const { return static_cast<int>(variables_.size()); }
  int constraint_count() const { return static_cast<int>(constraints_.size()); }
  int binary_count() const;
  int continuous_count() const { return variable_count() - binary_count(); }

  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(int i) const { return variables_[static_cast<std::size_t>(i)]; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<Term>& objective() const { return objective_; }
  Sense sense() const { return sense_; }

  /// -1 when absent.
  int find(const std::string& name) const;
  /// Throws kNaming when absent.
  int index_of(const std::string& name) const;

  friend bool operator==(const MilpProblem& a, const MilpProblem& b) {
    return a.variables_ == b.variables_ && a.constraints_ == b.constraints_ &&
           a.objective_ == b.objective_ && a.sense_ == b.sense_;
  }

 private:
  void check_terms(const std::vector<Term>& terms) const;

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<Term> objective_;
  Sense sense_ = Sense::kMinimize;
  std::unordered_map<std::string, int> var_index_;
  std::unordered_map<std::string, int> row_index_;
};

/// Largest violation of any row or bound at `values` (0 when feasible).
double max_violation(const MilpProblem& problem, const std::vector<double>& values);

double objective_value(const MilpProblem& problem, const std::vector<double>& values);

}  // namespace pwca
