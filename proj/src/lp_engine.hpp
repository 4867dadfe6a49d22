#pragma once

// Bounded-variable revised primal simplex over a sparse column store.
//
// Every row i gets a logical s_i with a_i . x + s_i = 0, so row bounds turn
// into bounds on s_i and the all-logical basis is the identity. The basis
// inverse is kept in product form: a list of elementary (eta) matrices,
// rebuilt from scratch every so often.

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "pwca/problem.hpp"

namespace pwca::detail {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kTimeLimit, kFailure };

struct SparseColumn {
  std::vector<int> rows;
  std::vector<double> values;
};

/// Minimize c.x subject to row and variable bounds.
struct LpData {
  int rows = 0;
  std::vector<SparseColumn> columns;
  std::vector<double> cost;
  std::vector<double> col_lower, col_upper;
  std::vector<double> row_lower, row_upper;
};

/// Binaries relaxed to [0, 1]; maximization turned into minimization.
LpData lp_from_problem(const MilpProblem& problem);

enum class VarStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree };

struct Eta {
  int row;
  double pivot;
  std::vector<int> index;
  std::vector<double> value;
};

/// Basis plus its factorization, so restoring needs no refactoring.
struct BasisSnapshot {
  std::vector<VarStatus> status;  // structurals then logicals
  std::vector<int> head;          // variable basic in each row
  std::vector<Eta> etas;
  int etas_at_reinvert = 0;
};

class LpEngine {
 public:
  using Clock = std::chrono::steady_clock;

  explicit LpEngine(LpData data);

  /// Bound change for a structural; the basis is kept.
  void set_column_bounds(int col, double lower, double upper);
  double column_lower(int col) const { return lower_[static_cast<std::size_t>(col)]; }
  double column_upper(int col) const { return upper_[static_cast<std::size_t>(col)]; }

  LpStatus solve(Clock::time_point deadline = Clock::time_point::max());

  /// Objective of the current point (minimization form).
  double objective() const;
  /// Structural values.
  std::vector<double> values() const;
  int iterations() const { return iterations_; }
  const std::string& message() const { return message_; }

  BasisSnapshot snapshot() const;
  void restore(const BasisSnapshot& basis);

 private:
  int total() const { return n_ + m_; }
  bool is_logical(int j) const { return j >= n_; }
  double column_dot(int j, const std::vector<double>& y) const;
  void add_column(int j, double scale, std::vector<double>& dense) const;
  void ftran(std::vector<double>& v) const;
  void btran(std::vector<double>& v) const;
  void ftran_sparse(std::vector<double>& v, std::vector<int>& pattern,
                    std::vector<char>& mark) const;
  void push_eta(int row, const std::vector<double>& alpha);
  void reinvert();
  void place_nonbasic(int j);
  void compute_basics();
  double residual() const;
  /// Largest bound violation among the basics.
  double infeasibility() const;
  LpStatus iterate(Clock::time_point deadline);

  int m_ = 0;
  int n_ = 0;
  std::vector<SparseColumn> cols_;
  std::vector<double> cost_;
  std::vector<double> lower_, upper_;
  std::vector<double> x_;
  std::vector<VarStatus> status_;
  std::vector<int> head_;
  std::vector<Eta> etas_;
  int etas_at_reinvert_ = 0;
  int iterations_ = 0;
  std::string message_;

  // Work buffers.
  std::vector<double> y_, alpha_, rhs_;
};

}  // namespace pwca::detail
