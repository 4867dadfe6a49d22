#include "pwca/solver.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <queue>

#include "lp_engine.hpp"

namespace pwca {

namespace {

using detail::LpEngine;
using detail::LpStatus;

constexpr double kIntegralityTol = 1e-6;

SolveStatus convert(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return SolveStatus::kOptimal;
    case LpStatus::kInfeasible: return SolveStatus::kInfeasible;
    case LpStatus::kUnbounded: return SolveStatus::kUnbounded;
    case LpStatus::kTimeLimit: return SolveStatus::kTimeLimit;
    case LpStatus::kIterationLimit:
    case LpStatus::kFailure: return SolveStatus::kFailure;
  }
  return SolveStatus::kFailure;
}

struct BoundChange {
  int var;
  double lower;
  double upper;
};

struct Node {
  double bound;  // parent's relaxation value, minimization form
  long sequence;
  int depth;
  std::vector<BoundChange> changes;  // relative to the root
  std::shared_ptr<const detail::BasisSnapshot> basis;
  long parent;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.sequence < b.sequence;
  }
};

}  // namespace

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kTimeLimit: return "time-limit";
    case SolveStatus::kFailure: return "failure";
  }
  return "failure";
}

LpSolution solve_lp(const MilpProblem& problem) {
  LpEngine engine(detail::lp_from_problem(problem));
  const LpStatus s = engine.solve();
  LpSolution out;
  out.status = convert(s);
  out.iterations = engine.iterations();
  out.message = engine.message();
  if (s == LpStatus::kOptimal) {
    out.values = engine.values();
    out.objective = objective_value(problem, out.values);
  }
  return out;
}

MilpSolution solve_milp(const MilpProblem& problem, const MilpOptions& options) {
  using Clock = LpEngine::Clock;
  const auto start = Clock::now();
  const auto deadline =
      std::isfinite(options.time_limit_seconds)
          ? start + std::chrono::duration_cast<Clock::duration>(
                        std::chrono::duration<double>(options.time_limit_seconds))
          : Clock::time_point::max();
  const double sign = problem.sense() == Sense::kMinimize ? 1.0 : -1.0;

  std::vector<int> binaries;
  for (int j = 0; j < problem.variable_count(); ++j) {
    if (problem.variable(j).type == VarType::kBinary) binaries.push_back(j);
  }

  LpEngine engine(detail::lp_from_problem(problem));
  MilpSolution out;
  double incumbent = kInfinity;  // minimization form

  const auto finish = [&](SolveStatus status) {
    out.status = status;
    out.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    out.lp_iterations = engine.iterations();
    if (out.has_incumbent) out.objective = sign * incumbent;
    return out;
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long sequence = 0;
  open.push(Node{-kInfinity, sequence++, 0, {}, nullptr, -1});
  long last_solved = -1;
  std::vector<BoundChange> applied;  // changes currently set in the engine

  while (!open.empty()) {
    if (Clock::now() > deadline) {
      out.best_bound = sign * std::min(open.top().bound, incumbent);
      out.message = "time limit reached";
      return finish(SolveStatus::kTimeLimit);
    }
    Node node = open.top();
    open.pop();
    if (node.bound >= incumbent - options.gap_tolerance) continue;

    // Reset bounds changed for the previous node, then apply this node's.
    for (const BoundChange& c : applied) {
      const Variable& v = problem.variable(c.var);
      engine.set_column_bounds(c.var, v.lower, v.upper);
    }
    for (const BoundChange& c : node.changes) engine.set_column_bounds(c.var, c.lower, c.upper);
    applied = node.changes;
    // The engine already holds the parent's final basis while diving.
    if (node.basis && node.parent != last_solved) engine.restore(*node.basis);

    ++out.node_count;
    const long id = node.sequence;
    const LpStatus s = engine.solve(deadline);
    last_solved = id;
    if (s == LpStatus::kTimeLimit) {
      out.best_bound = sign * std::min(node.bound, incumbent);
      out.message = "time limit reached";
      return finish(SolveStatus::kTimeLimit);
    }
    if (s == LpStatus::kInfeasible) continue;
    if (s == LpStatus::kUnbounded) {
      out.message = "relaxation unbounded";
      return finish(SolveStatus::kUnbounded);
    }
    if (s != LpStatus::kOptimal) {
      out.message = engine.message();
      return finish(SolveStatus::kFailure);
    }
    const double value = engine.objective();
    if (value >= incumbent - options.gap_tolerance) continue;

    const std::vector<double> x = engine.values();
    int branch = -1;
    double most = 0.0;
    for (int j : binaries) {
      const double f = x[static_cast<std::size_t>(j)];
      const double frac = std::min(f - std::floor(f), std::ceil(f) - f);
      if (frac > kIntegralityTol && frac > most + 1e-12) {
        most = frac;
        branch = j;
      }
    }
    if (branch < 0) {
      incumbent = value;
      out.values = x;
      for (int j : binaries) {
        out.values[static_cast<std::size_t>(j)] = std::round(out.values[static_cast<std::size_t>(j)]);
      }
      out.has_incumbent = true;
      continue;
    }

    auto basis = std::make_shared<const detail::BasisSnapshot>(engine.snapshot());
    const double f = x[static_cast<std::size_t>(branch)];
    const bool near_up = f >= 0.5;
    // Pushed last is popped first among equal bounds: dive toward the
    // nearer integer.
    for (int pass = 0; pass < 2; ++pass) {
      const bool up = pass == 0 ? !near_up : near_up;
      Node child{value, sequence++, node.depth + 1, node.changes, basis, id};
      child.changes.push_back({branch, up ? 1.0 : 0.0, up ? 1.0 : 0.0});
      open.push(std::move(child));
    }
  }

  out.best_bound = sign * incumbent;
  if (!out.has_incumbent) {
    out.message = "no integer-feasible point";
    return finish(SolveStatus::kInfeasible);
  }
  return finish(SolveStatus::kOptimal);
}

}  // namespace pwca
