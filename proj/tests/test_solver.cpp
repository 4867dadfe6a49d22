#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "pwca/error.hpp"
#include "pwca/solver.hpp"

using namespace pwca;

namespace {

// Brute-force LP oracle for tiny problems: every vertex of
// {x : rows, lo <= x <= hi} is the solution of some n active constraints.
double vertex_enumeration(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                          const Eigen::VectorXd& c) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(b.size());
  // Constraint k: rows a_i x <= b_i, then x_j >= lo_j, then x_j <= hi_j.
  const int total = m + 2 * n;
  Eigen::MatrixXd g(total, n);
  Eigen::VectorXd h(total);
  g.topRows(m) = a;
  h.head(m) = b;
  g.middleRows(m, n) = -Eigen::MatrixXd::Identity(n, n);
  h.segment(m, n) = -lo;
  g.bottomRows(n) = Eigen::MatrixXd::Identity(n, n);
  h.tail(n) = hi;
  double best = kInfinity;
  std::vector<int> pick(static_cast<std::size_t>(n));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Eigen::MatrixXd s(n, n);
      Eigen::VectorXd r(n);
      for (int i = 0; i < n; ++i) {
        s.row(i) = g.row(pick[static_cast<std::size_t>(i)]);
        r[i] = h[pick[static_cast<std::size_t>(i)]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
      if (lu.rank() < n) return;
      const Eigen::VectorXd x = lu.solve(r);
      if (((g * x - h).array() > 1e-9).any()) return;
      best = std::min(best, c.dot(x));
      return;
    }
    for (int k = start; k < total; ++k) {
      pick[static_cast<std::size_t>(depth)] = k;
      rec(k + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace

TEST(SolveLp, SingleBound) {
  MilpProblem p;
  const int y = p.add_continuous("y", -kInfinity, kInfinity);
  p.add_constraint({{y, 1.0}}, Relation::kGreaterEqual, 0.3);
  p.set_objective({{y, 1.0}}, Sense::kMinimize);
  const LpSolution s = solve_lp(p);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.values[0], 0.3, 1e-12);
}

TEST(SolveLp, TwoVariableVertex) {
  MilpProblem p;
  const int x = p.add_continuous("x", 0.0, kInfinity);
  const int y = p.add_continuous("y", 0.0, kInfinity);
  p.add_constraint({{x, 1.0}, {y, 2.0}}, Relation::kGreaterEqual, 2.0);
  p.add_constraint({{x, 2.0}, {y, 1.0}}, Relation::kGreaterEqual, 2.0);
  p.set_objective({{x, 1.0}, {y, 1.0}}, Sense::kMinimize);
  const LpSolution s = solve_lp(p);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.objective, 4.0 / 3.0, 1e-10);
  EXPECT_NEAR(s.values[0], 2.0 / 3.0, 1e-10);
  EXPECT_NEAR(s.values[1], 2.0 / 3.0, 1e-10);
  // Oracle: the same LP by vertex enumeration.
  Eigen::MatrixXd a(2, 2);
  a << -1, -2, -2, -1;
  const double oracle = vertex_enumeration(a, Eigen::Vector2d(-2, -2), Eigen::Vector2d(0, 0),
                                           Eigen::Vector2d(100, 100), Eigen::Vector2d(1, 1));
  EXPECT_NEAR(s.objective, oracle, 1e-10);
}

TEST(SolveLp, Infeasible) {
  MilpProblem p;
  const int y = p.add_continuous("y", -kInfinity, kInfinity);
  p.add_constraint({{y, 1.0}}, Relation::kGreaterEqual, 1.0);
  p.add_constraint({{y, 1.0}}, Relation::kLessEqual, 0.0);
  p.set_objective({{y, 1.0}}, Sense::kMinimize);
  EXPECT_EQ(solve_lp(p).status, SolveStatus::kInfeasible);
}

TEST(SolveLp, Unbounded) {
  MilpProblem p;
  const int x = p.add_continuous("x", 0.0, kInfinity);
  const int y = p.add_continuous("y", -kInfinity, kInfinity);
  p.add_constraint({{x, 1.0}, {y, -1.0}}, Relation::kGreaterEqual, 0.0);
  p.set_objective({{y, 1.0}}, Sense::kMinimize);
  EXPECT_EQ(solve_lp(p).status, SolveStatus::kUnbounded);
}

TEST(SolveLp, MaximizeAndEqualityRows) {
  MilpProblem p;
  const int a = p.add_continuous("a", 0.0, 4.0);
  const int b = p.add_continuous("b", 0.0, 4.0);
  p.add_constraint({{a, 1.0}, {b, 1.0}}, Relation::kEqual, 5.0);
  p.set_objective({{a, 2.0}, {b, 1.0}}, Sense::kMaximize);
  const LpSolution s = solve_lp(p);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_NEAR(s.objective, 9.0, 1e-10);
}

TEST(SolveLpProperty, MatchesVertexEnumerationOnRandomLps) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int compared = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 3;
    const int m = 1 + trial % 5;
    Eigen::MatrixXd a(m, n);
    Eigen::VectorXd b(m), c(n), lo(n), hi(n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = u(rng);
      b[i] = u(rng);
    }
    for (int j = 0; j < n; ++j) {
      c[j] = u(rng);
      lo[j] = -1.0 - std::abs(u(rng));
      hi[j] = 1.0 + std::abs(u(rng));
    }
    MilpProblem p;
    for (int j = 0; j < n; ++j) p.add_continuous("x" + std::to_string(j), lo[j], hi[j]);
    for (int i = 0; i < m; ++i) {
      std::vector<Term> t;
      for (int j = 0; j < n; ++j) t.push_back({j, a(i, j)});
      p.add_constraint(t, Relation::kLessEqual, b[i]);
    }
    std::vector<Term> obj;
    for (int j = 0; j < n; ++j) obj.push_back({j, c[j]});
    p.set_objective(obj, Sense::kMinimize);
    const double oracle = vertex_enumeration(a, b, lo, hi, c);
    const LpSolution s = solve_lp(p);
    if (!std::isfinite(oracle)) {
      EXPECT_EQ(s.status, SolveStatus::kInfeasible) << trial;
      continue;
    }
    ASSERT_EQ(s.status, SolveStatus::kOptimal) << trial;
    EXPECT_NEAR(s.objective, oracle, 1e-8) << trial;
    EXPECT_LT(max_violation(p, s.values), 1e-7);
    ++compared;
  }
  EXPECT_GT(compared, 100);
}

TEST(SolveMilp, Knapsack) {
  MilpProblem p;
  const int a = p.add_binary("a");
  const int b = p.add_binary("b");
  p.add_constraint({{a, 1.0}, {b, 1.0}}, Relation::kLessEqual, 1.0);
  p.set_objective({{a, 3.0}, {b, 2.0}}, Sense::kMaximize);
  const MilpSolution s = solve_milp(p);
  ASSERT_EQ(s.status, SolveStatus::kOptimal);
  EXPECT_EQ(s.objective, 3.0);
  EXPECT_EQ(s.values[0], 1.0);
  EXPECT_EQ(s.values[1], 0.0);
}

TEST(SolveMilp, PureLpMatchesSolveLp) {
  MilpProblem p;
  const int x = p.add_continuous("x", 0.0, 10.0);
  const int y = p.add_continuous("y", 0.0, 10.0);
  p.add_constraint({{x, 1.0}, {y, 3.0}}, Relation::kGreaterEqual, 3.0);
  p.add_constraint({{x, 2.0}, {y, 1.0}}, Relation::kGreaterEqual, 2.5);
  p.set_objective({{x, 1.0}, {y, 1.5}}, Sense::kMinimize);
  const MilpSolution m = solve_milp(p);
  const LpSolution l = solve_lp(p);
  ASSERT_EQ(m.status, SolveStatus::kOptimal);
  EXPECT_NEAR(m.objective, l.objective, 1e-12);
  EXPECT_EQ(m.node_count, 1);
}

TEST(SolveMilp, InfeasibleIntegerProblem) {
  MilpProblem p;
  const int a = p.add_binary("a");
  const int b = p.add_binary("b");
  p.add_constraint({{a, 2.0}, {b, 2.0}}, Relation::kEqual, 1.0);
  p.set_objective({{a, 1.0}}, Sense::kMinimize);
  EXPECT_EQ(solve_milp(p).status, SolveStatus::kInfeasible);
}

TEST(SolveMilpProperty, MatchesEnumerationOnRandomMixedProblems) {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int nb = 2 + trial % 4;
    const int nc = 1 + trial % 3;
    const int m = 2 + trial % 4;
    MilpProblem p;
    for (int j = 0; j < nb; ++j) p.add_binary("b" + std::to_string(j));
    for (int j = 0; j < nc; ++j) p.add_continuous("x" + std::to_string(j), -2.0, 2.0);
    for (int i = 0; i < m; ++i) {
      std::vector<Term> t;
      for (int j = 0; j < nb + nc; ++j) t.push_back({j, u(rng)});
      p.add_constraint(t, Relation::kLessEqual, 0.5 + std::abs(u(rng)));
    }
    std::vector<Term> obj;
    for (int j = 0; j < nb + nc; ++j) obj.push_back({j, u(rng)});
    p.set_objective(obj, Sense::kMinimize);

    double oracle = kInfinity;
    for (int mask = 0; mask < (1 << nb); ++mask) {
      MilpProblem fixed = p;
      for (int j = 0; j < nb; ++j) {
        const double v = (mask >> j) & 1;
        fixed.set_bounds(j, v, v);
      }
      const LpSolution s = solve_lp(fixed);
      if (s.status == SolveStatus::kOptimal) oracle = std::min(oracle, s.objective);
    }
    const MilpSolution s = solve_milp(p);
    if (!std::isfinite(oracle)) {
      EXPECT_EQ(s.status, SolveStatus::kInfeasible) << trial;
      continue;
    }
    ASSERT_EQ(s.status, SolveStatus::kOptimal) << trial;
    EXPECT_NEAR(s.objective, oracle, 1e-7) << trial;
    EXPECT_LE(s.best_bound, s.objective + 1e-9);
    EXPECT_LT(max_violation(p, s.values), 1e-6);
  }
}

TEST(SolveMilpProperty, DeterministicNodeCounts) {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MilpProblem p;
  for (int j = 0; j < 12; ++j) p.add_binary("b" + std::to_string(j));
  for (int i = 0; i < 6; ++i) {
    std::vector<Term> t;
    for (int j = 0; j < 12; ++j) t.push_back({j, u(rng)});
    p.add_constraint(t, Relation::kLessEqual, 1.0);
  }
  std::vector<Term> obj;
  for (int j = 0; j < 12; ++j) obj.push_back({j, u(rng)});
  p.set_objective(obj, Sense::kMinimize);
  const MilpSolution a = solve_milp(p);
  const MilpSolution b = solve_milp(p);
  EXPECT_EQ(a.node_count, b.node_count);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.objective, b.objective);
}

TEST(SolveMilp, TimeLimitReportsStatus) {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  MilpProblem p;
  const int count = 60;
  std::vector<Term> weight, value;
  for (int j = 0; j < count; ++j) {
    p.add_binary("b" + std::to_string(j));
    weight.push_back({j, u(rng)});
    value.push_back({j, u(rng)});
  }
  p.add_constraint(weight, Relation::kLessEqual, 7.3);
  p.set_objective(value, Sense::kMaximize);
  MilpOptions o;
  o.time_limit_seconds = 0.0;
  const MilpSolution s = solve_milp(p, o);
  EXPECT_EQ(s.status, SolveStatus::kTimeLimit);
}

TEST(MilpProblem, NamingErrors) {
  MilpProblem p;
  p.add_continuous("x", 0, 1);
  try {
    p.add_binary("x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNaming);
  }
  EXPECT_THROW(p.add_continuous("", 0, 1), Error);
  EXPECT_THROW(p.add_continuous("a b", 0, 1), Error);
  EXPECT_THROW(p.add_constraint({{5, 1.0}}, Relation::kEqual, 0.0), Error);
}
