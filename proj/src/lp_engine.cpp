#include "lp_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pwca::detail {

namespace {

constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-14;
constexpr int kRefactorInterval = 100;
constexpr int kDegenerateBeforeBland = 50;

}  // namespace

LpData lp_from_problem(const MilpProblem& problem) {
  LpData d;
  const int n = problem.variable_count();
  d.rows = problem.constraint_count();
  d.columns.resize(static_cast<std::size_t>(n));
  d.cost.assign(static_cast<std::size_t>(n), 0.0);
  d.col_lower.resize(static_cast<std::size_t>(n));
  d.col_upper.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    d.col_lower[static_cast<std::size_t>(j)] = problem.variable(j).lower;
    d.col_upper[static_cast<std::size_t>(j)] = problem.variable(j).upper;
  }
  const double sign = problem.sense() == Sense::kMinimize ? 1.0 : -1.0;
  for (const Term& t : problem.objective()) d.cost[static_cast<std::size_t>(t.var)] += sign * t.coef;
  for (int i = 0; i < d.rows; ++i) {
    const Constraint& c = problem.constraints()[static_cast<std::size_t>(i)];
    for (const Term& t : c.terms) {
      if (t.coef == 0.0) continue;
      auto& col = d.columns[static_cast<std::size_t>(t.var)];
      if (!col.rows.empty() && col.rows.back() == i) {
        col.values.back() += t.coef;
      } else {
        col.rows.push_back(i);
        col.values.push_back(t.coef);
      }
    }
    double lo = -kInfinity, hi = kInfinity;
    if (c.relation != Relation::kLessEqual) lo = c.rhs;
    if (c.relation != Relation::kGreaterEqual) hi = c.rhs;
    d.row_lower.push_back(lo);
    d.row_upper.push_back(hi);
  }
  return d;
}

LpEngine::LpEngine(LpData data)
    : m_(data.rows), n_(static_cast<int>(data.columns.size())), cols_(std::move(data.columns)) {
  const auto t = static_cast<std::size_t>(total());
  cost_ = std::move(data.cost);
  cost_.resize(t, 0.0);
  lower_ = std::move(data.col_lower);
  upper_ = std::move(data.col_upper);
  lower_.resize(t);
  upper_.resize(t);
  // s = -a.x, so lo <= a.x <= hi becomes -hi <= s <= -lo.
  for (int i = 0; i < m_; ++i) {
    lower_[static_cast<std::size_t>(n_ + i)] = -data.row_upper[static_cast<std::size_t>(i)];
    upper_[static_cast<std::size_t>(n_ + i)] = -data.row_lower[static_cast<std::size_t>(i)];
  }
  x_.assign(t, 0.0);
  status_.assign(t, VarStatus::kAtLower);
  head_.resize(static_cast<std::size_t>(m_));
  for (int i = 0; i < m_; ++i) {
    head_[static_cast<std::size_t>(i)] = n_ + i;
    status_[static_cast<std::size_t>(n_ + i)] = VarStatus::kBasic;
  }
  for (int j = 0; j < n_; ++j) place_nonbasic(j);
  y_.resize(static_cast<std::size_t>(m_));
  alpha_.resize(static_cast<std::size_t>(m_));
  rhs_.resize(static_cast<std::size_t>(m_));
}

void LpEngine::place_nonbasic(int j) {
  const auto k = static_cast<std::size_t>(j);
  const bool has_lo = std::isfinite(lower_[k]);
  const bool has_hi = std::isfinite(upper_[k]);
  VarStatus s = status_[k];
  if (s == VarStatus::kAtUpper && !has_hi) s = VarStatus::kAtLower;
  if (s == VarStatus::kAtLower && !has_lo) s = has_hi ? VarStatus::kAtUpper : VarStatus::kFree;
  if (s == VarStatus::kFree && (has_lo || has_hi)) s = has_lo ? VarStatus::kAtLower : VarStatus::kAtUpper;
  status_[k] = s;
  x_[k] = s == VarStatus::kAtLower ? lower_[k] : s == VarStatus::kAtUpper ? upper_[k] : 0.0;
}

void LpEngine::set_column_bounds(int col, double lower, double upper) {
  const auto k = static_cast<std::size_t>(col);
  lower_[k] = lower;
  upper_[k] = upper;
  if (status_[k] != VarStatus::kBasic) place_nonbasic(col);
}

double LpEngine::column_dot(int j, const std::vector<double>& y) const {
  if (is_logical(j)) return y[static_cast<std::size_t>(j - n_)];
  const SparseColumn& c = cols_[static_cast<std::size_t>(j)];
  double s = 0.0;
  for (std::size_t p = 0; p < c.rows.size(); ++p) s += c.values[p] * y[static_cast<std::size_t>(c.rows[p])];
  return s;
}

void LpEngine::add_column(int j, double scale, std::vector<double>& dense) const {
  if (is_logical(j)) {
    dense[static_cast<std::size_t>(j - n_)] += scale;
    return;
  }
  const SparseColumn& c = cols_[static_cast<std::size_t>(j)];
  for (std::size_t p = 0; p < c.rows.size(); ++p) {
    dense[static_cast<std::size_t>(c.rows[p])] += scale * c.values[p];
  }
}

void LpEngine::ftran(std::vector<double>& v) const {
  for (const Eta& e : etas_) {
    const auto r = static_cast<std::size_t>(e.row);
    if (v[r] == 0.0) continue;
    const double xr = v[r] / e.pivot;
    v[r] = xr;
    for (std::size_t p = 0; p < e.index.size(); ++p) {
      v[static_cast<std::size_t>(e.index[p])] -= e.value[p] * xr;
    }
  }
}

void LpEngine::btran(std::vector<double>& v) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    const Eta& e = *it;
    double s = v[static_cast<std::size_t>(e.row)];
    for (std::size_t p = 0; p < e.index.size(); ++p) {
      s -= e.value[p] * v[static_cast<std::size_t>(e.index[p])];
    }
    v[static_cast<std::size_t>(e.row)] = s / e.pivot;
  }
}

void LpEngine::push_eta(int row, const std::vector<double>& alpha) {
  Eta e;
  e.row = row;
  e.pivot = alpha[static_cast<std::size_t>(row)];
  for (int i = 0; i < m_; ++i) {
    const double a = alpha[static_cast<std::size_t>(i)];
    if (i != row && std::abs(a) > kDropTol) {
      e.index.push_back(i);
      e.value.push_back(a);
    }
  }
  etas_.push_back(std::move(e));
}

// ftran that also records which entries of v are nonzero. `pattern` holds
// the initial nonzeros on entry; `mark` flags members and is left set.
void LpEngine::ftran_sparse(std::vector<double>& v, std::vector<int>& pattern,
                            std::vector<char>& mark) const {
  for (const Eta& e : etas_) {
    const auto r = static_cast<std::size_t>(e.row);
    if (v[r] == 0.0) continue;
    const double xr = v[r] / e.pivot;
    v[r] = xr;
    for (std::size_t p = 0; p < e.index.size(); ++p) {
      const auto k = static_cast<std::size_t>(e.index[p]);
      v[k] -= e.value[p] * xr;
      if (!mark[k]) {
        mark[k] = 1;
        pattern.push_back(e.index[p]);
      }
    }
  }
}

// Rebuilds the eta file for the current basis starting from the identity.
// Structural columns are brought in sparsest first; a column without an
// acceptable pivot is dropped and its row keeps the logical.
void LpEngine::reinvert() {
  etas_.clear();
  std::vector<int> wanted;
  std::vector<char> keep_logical(static_cast<std::size_t>(m_), 0);
  for (int i = 0; i < m_; ++i) {
    const int j = head_[static_cast<std::size_t>(i)];
    if (is_logical(j)) {
      keep_logical[static_cast<std::size_t>(j - n_)] = 1;
    } else {
      wanted.push_back(j);
    }
  }
  std::stable_sort(wanted.begin(), wanted.end(), [&](int a, int b) {
    return cols_[static_cast<std::size_t>(a)].rows.size() < cols_[static_cast<std::size_t>(b)].rows.size();
  });
  // Row i currently holds logical i until a structural takes it.
  std::vector<int> new_head(static_cast<std::size_t>(m_));
  std::iota(new_head.begin(), new_head.end(), n_);
  std::vector<char> taken(static_cast<std::size_t>(m_), 0);
  std::vector<char> mark(static_cast<std::size_t>(m_), 0);
  std::vector<int> pattern;
  std::fill(alpha_.begin(), alpha_.end(), 0.0);
  for (int j : wanted) {
    pattern.clear();
    const SparseColumn& col = cols_[static_cast<std::size_t>(j)];
    for (std::size_t p = 0; p < col.rows.size(); ++p) {
      const auto k = static_cast<std::size_t>(col.rows[p]);
      alpha_[k] += col.values[p];
      if (!mark[k]) {
        mark[k] = 1;
        pattern.push_back(col.rows[p]);
      }
    }
    ftran_sparse(alpha_, pattern, mark);
    std::sort(pattern.begin(), pattern.end());
    int best = -1;
    double best_abs = 0.0;
    for (int i : pattern) {
      const auto k = static_cast<std::size_t>(i);
      if (taken[k] || keep_logical[k]) continue;
      if (std::abs(alpha_[k]) > best_abs) {
        best_abs = std::abs(alpha_[k]);
        best = i;
      }
    }
    if (best < 0 || best_abs < 1e-7) {
      status_[static_cast<std::size_t>(j)] = VarStatus::kAtLower;
      place_nonbasic(j);
    } else {
      Eta e;
      e.row = best;
      e.pivot = alpha_[static_cast<std::size_t>(best)];
      for (int i : pattern) {
        const double a = alpha_[static_cast<std::size_t>(i)];
        if (i != best && std::abs(a) > kDropTol) {
          e.index.push_back(i);
          e.value.push_back(a);
        }
      }
      etas_.push_back(std::move(e));
      taken[static_cast<std::size_t>(best)] = 1;
      new_head[static_cast<std::size_t>(best)] = j;
    }
    for (int i : pattern) {
      alpha_[static_cast<std::size_t>(i)] = 0.0;
      mark[static_cast<std::size_t>(i)] = 0;
    }
  }
  // Rows whose structural was dropped keep their logical.
  for (int i = 0; i < m_; ++i) {
    status_[static_cast<std::size_t>(new_head[static_cast<std::size_t>(i)])] = VarStatus::kBasic;
  }
  head_ = std::move(new_head);
  etas_at_reinvert_ = static_cast<int>(etas_.size());
}

void LpEngine::compute_basics() {
  std::fill(rhs_.begin(), rhs_.end(), 0.0);
  for (int j = 0; j < total(); ++j) {
    const auto k = static_cast<std::size_t>(j);
    if (status_[k] != VarStatus::kBasic && x_[k] != 0.0) add_column(j, -x_[k], rhs_);
  }
  ftran(rhs_);
  for (int i = 0; i < m_; ++i) {
    x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(i)])] = rhs_[static_cast<std::size_t>(i)];
  }
}

LpStatus LpEngine::solve(Clock::time_point deadline) {
  message_.clear();
  compute_basics();
  LpStatus s = iterate(deadline);
  // A clear infeasibility is trusted; a borderline one, reached through
  // updates since the last refactoring, is checked again.
  const bool stale = static_cast<int>(etas_.size()) > etas_at_reinvert_;
  const bool borderline = s == LpStatus::kInfeasible && stale && infeasibility() < 1e-6;
  if ((s == LpStatus::kOptimal && residual() > 1e-9) || borderline) {
    // Confirm on a fresh factorization.
    reinvert();
    compute_basics();
    s = iterate(deadline);
  }
  return s;
}

double LpEngine::infeasibility() const {
  double worst = 0.0;
  for (int j : head_) {
    const auto k = static_cast<std::size_t>(j);
    worst = std::max({worst, lower_[k] - x_[k], x_[k] - upper_[k]});
  }
  return worst;
}

double LpEngine::residual() const {
  std::vector<double> r(static_cast<std::size_t>(m_), 0.0);
  for (int j = 0; j < total(); ++j) {
    const double v = x_[static_cast<std::size_t>(j)];
    if (v == 0.0) continue;
    if (is_logical(j)) {
      r[static_cast<std::size_t>(j - n_)] += v;
      continue;
    }
    const SparseColumn& c = cols_[static_cast<std::size_t>(j)];
    for (std::size_t p = 0; p < c.rows.size(); ++p) r[static_cast<std::size_t>(c.rows[p])] += v * c.values[p];
  }
  double worst = 0.0;
  for (double v : r) worst = std::max(worst, std::abs(v));
  return worst;
}

LpStatus LpEngine::iterate(Clock::time_point deadline) {
  const int limit = 50 * (m_ + n_) + 10000;
  int degenerate_run = 0;
  std::vector<double> cb(static_cast<std::size_t>(m_));
  for (int local = 0;; ++local) {
    if (local >= limit) {
      message_ = "iteration limit reached";
      return LpStatus::kIterationLimit;
    }
    if ((local & 63) == 63 && Clock::now() > deadline) return LpStatus::kTimeLimit;
    if (static_cast<int>(etas_.size()) - etas_at_reinvert_ >= kRefactorInterval) {
      reinvert();
      compute_basics();
    }

    // Phase selection: any infeasible basic puts us in phase 1.
    bool phase1 = false;
    for (int i = 0; i < m_; ++i) {
      const int j = head_[static_cast<std::size_t>(i)];
      const auto k = static_cast<std::size_t>(j);
      double c = 0.0;
      if (x_[k] < lower_[k] - kPrimalTol) {
        c = -1.0;
      } else if (x_[k] > upper_[k] + kPrimalTol) {
        c = 1.0;
      }
      if (c != 0.0) phase1 = true;
      cb[static_cast<std::size_t>(i)] = c;
    }
    if (!phase1) {
      for (int i = 0; i < m_; ++i) cb[static_cast<std::size_t>(i)] = cost_[static_cast<std::size_t>(head_[static_cast<std::size_t>(i)])];
    }
    y_ = cb;
    btran(y_);

    // Pricing.
    const bool bland = degenerate_run >= kDegenerateBeforeBland;
    int q = -1;
    double best = 0.0;
    double dq = 0.0;
    for (int j = 0; j < total(); ++j) {
      const auto k = static_cast<std::size_t>(j);
      const VarStatus s = status_[k];
      if (s == VarStatus::kBasic) continue;
      if (lower_[k] == upper_[k]) continue;
      const double d = (phase1 ? 0.0 : cost_[k]) - column_dot(j, y_);
      bool eligible = false;
      if (s == VarStatus::kAtLower) eligible = d < -kDualTol;
      else if (s == VarStatus::kAtUpper) eligible = d > kDualTol;
      else eligible = std::abs(d) > kDualTol;
      if (!eligible) continue;
      if (bland) {
        q = j;
        dq = d;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        q = j;
        dq = d;
      }
    }
    if (q < 0) {
      if (phase1) {
        message_ = "primal infeasible";
        return LpStatus::kInfeasible;
      }
      return LpStatus::kOptimal;
    }

    std::fill(alpha_.begin(), alpha_.end(), 0.0);
    add_column(q, 1.0, alpha_);
    ftran(alpha_);
    const double dir = dq < 0.0 ? 1.0 : -1.0;
    const auto kq = static_cast<std::size_t>(q);

    // Ratio test. rate = change of a basic per unit step of the entering
    // variable in direction dir.
    const auto limit_of = [&](int i, double tol, double* out, bool* to_upper) {
      const double rate = -dir * alpha_[static_cast<std::size_t>(i)];
      if (std::abs(rate) <= kPivotTol) return false;
      const auto k = static_cast<std::size_t>(head_[static_cast<std::size_t>(i)]);
      const double x = x_[k];
      const bool below = x < lower_[k] - kPrimalTol;
      const bool above = x > upper_[k] + kPrimalTol;
      if (rate > 0.0) {
        if (below) {
          *out = (lower_[k] - x) / rate;  // becomes feasible at its lower bound
          *to_upper = false;
          return true;
        }
        if (above || !std::isfinite(upper_[k])) return false;
        *out = (upper_[k] + tol - x) / rate;
        *to_upper = true;
        return true;
      }
      if (above) {
        *out = (x - upper_[k]) / -rate;
        *to_upper = true;
        return true;
      }
      if (below || !std::isfinite(lower_[k])) return false;
      *out = (x - lower_[k] + tol) / -rate;
      *to_upper = false;
      return true;
    };

    const double span = upper_[kq] - lower_[kq];
    double theta_max = std::isfinite(span) ? span : kInfinity;
    int r = -1;
    bool leave_upper = false;
    bool side = false;
    if (!bland) {
      // Harris: bound the step with relaxed bounds, then take the largest
      // pivot among the rows that block within it.
      double relaxed = kInfinity;
      for (int i = 0; i < m_; ++i) {
        double t;
        if (limit_of(i, kPrimalTol, &t, &side)) relaxed = std::min(relaxed, t);
      }
      if (relaxed < theta_max) {
        double best_pivot = 0.0;
        for (int i = 0; i < m_; ++i) {
          double t;
          if (!limit_of(i, 0.0, &t, &side) || t > relaxed) continue;
          const double a = std::abs(alpha_[static_cast<std::size_t>(i)]);
          if (a > best_pivot) {
            best_pivot = a;
            r = i;
            leave_upper = side;
            theta_max = std::max(t, 0.0);
          }
        }
      }
    } else {
      for (int i = 0; i < m_; ++i) {
        double t;
        if (!limit_of(i, 0.0, &t, &side)) continue;
        t = std::max(t, 0.0);
        if (t < theta_max || (r >= 0 && t == theta_max &&
                              head_[static_cast<std::size_t>(i)] < head_[static_cast<std::size_t>(r)])) {
          theta_max = t;
          r = i;
          leave_upper = side;
        }
      }
    }
    if (!std::isfinite(theta_max)) {
      if (phase1) {
        message_ = "unbounded ray in phase 1 (numerical trouble)";
        return LpStatus::kFailure;
      }
      message_ = "objective unbounded";
      return LpStatus::kUnbounded;
    }

    const double theta = theta_max;
    ++iterations_;
    degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;
    x_[kq] += dir * theta;
    for (int i = 0; i < m_; ++i) {
      const double a = alpha_[static_cast<std::size_t>(i)];
      if (a != 0.0) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(i)])] -= dir * theta * a;
    }
    if (r < 0) {
      // Bound flip of the entering variable.
      status_[kq] = dir > 0.0 ? VarStatus::kAtUpper : VarStatus::kAtLower;
      x_[kq] = dir > 0.0 ? upper_[kq] : lower_[kq];
      continue;
    }
    const int leaving = head_[static_cast<std::size_t>(r)];
    const auto kl = static_cast<std::size_t>(leaving);
    status_[kl] = leave_upper ? VarStatus::kAtUpper : VarStatus::kAtLower;
    x_[kl] = leave_upper ? upper_[kl] : lower_[kl];
    status_[kq] = VarStatus::kBasic;
    head_[static_cast<std::size_t>(r)] = q;
    push_eta(r, alpha_);
  }
}

double LpEngine::objective() const {
  double z = 0.0;
  for (int j = 0; j < n_; ++j) z += cost_[static_cast<std::size_t>(j)] * x_[static_cast<std::size_t>(j)];
  return z;
}

std::vector<double> LpEngine::values() const {
  return std::vector<double>(x_.begin(), x_.begin() + n_);
}

BasisSnapshot LpEngine::snapshot() const { return {status_, head_, etas_, etas_at_reinvert_}; }

void LpEngine::restore(const BasisSnapshot& basis) {
  status_ = basis.status;
  head_ = basis.head;
  etas_ = basis.etas;
  etas_at_reinvert_ = basis.etas_at_reinvert;
  for (int j = 0; j < total(); ++j) {
    if (status_[static_cast<std::size_t>(j)] != VarStatus::kBasic) place_nonbasic(j);
  }
}

}  // namespace pwca::detail
