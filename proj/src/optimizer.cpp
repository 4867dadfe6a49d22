#include "pwca/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "pwca/error.hpp"

namespace pwca {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Coefficients {
  double reflect;
  double expand;
  double contract;
  double shrink;
};

// Gao & Han adaptive coefficients; they degenerate for a single parameter.
Coefficients coefficients_for(int dim) {
  if (dim < 2) return {1.0, 2.0, 0.5, 0.5};
  const double d = dim;
  return {1.0, 1.0 + 2.0 / d, 0.75 - 1.0 / (2.0 * d), 1.0 - 1.0 / d};
}

class SimplexRun {
 public:
  SimplexRun(const Objective& objective, int max_iterations,
             const OptimizerOptions& options, int& evaluations)
      : objective_(objective),
        max_iterations_(max_iterations),
        options_(options),
        evaluations_(evaluations) {}

  MinimizeResult run(const Vector& start, double f_start) {
    const int d = static_cast<int>(start.size());
    const Coefficients k = coefficients_for(d);
    vertices_.assign(static_cast<std::size_t>(d + 1), start);
    values_.assign(static_cast<std::size_t>(d + 1), f_start);
    for (int i = 0; i < d; ++i) {
      Vector v = start;
      v[i] += v[i] != 0.0 ? 0.05 * v[i] : 0.05;
      vertices_[static_cast<std::size_t>(i + 1)] = v;
      values_[static_cast<std::size_t>(i + 1)] = eval(v);
    }

    MinimizeResult result;
    std::vector<int> order(static_cast<std::size_t>(d + 1));
    int iter = 0;
    for (;; ++iter) {
      sort(order);
      if (converged()) {
        result.converged = true;
        break;
      }
      if (iter >= max_iterations_) break;

      Vector centroid = Vector::Zero(d);
      for (int i = 0; i < d; ++i) centroid += vertices_[static_cast<std::size_t>(i)];
      centroid /= d;
      Vector& worst = vertices_.back();
      double& f_worst = values_.back();

      const Vector xr = centroid + k.reflect * (centroid - worst);
      const double fr = eval(xr);
      if (fr < values_.front()) {
        const Vector xe = centroid + k.expand * (xr - centroid);
        const double fe = eval(xe);
        if (fe < fr) {
          worst = xe;
          f_worst = fe;
        } else {
          worst = xr;
          f_worst = fr;
        }
        continue;
      }
      if (fr < values_[static_cast<std::size_t>(d - 1)]) {
        worst = xr;
        f_worst = fr;
        continue;
      }
      if (fr < f_worst) {
        const Vector xc = centroid + k.contract * (xr - centroid);
        const double fc = eval(xc);
        if (fc <= fr) {
          worst = xc;
          f_worst = fc;
          continue;
        }
      } else {
        const Vector xcc = centroid + k.contract * (worst - centroid);
        const double fcc = eval(xcc);
        if (fcc < f_worst) {
          worst = xcc;
          f_worst = fcc;
          continue;
        }
      }
      for (int i = 1; i <= d; ++i) {
        auto& v = vertices_[static_cast<std::size_t>(i)];
        v = vertices_.front() + k.shrink * (v - vertices_.front());
        values_[static_cast<std::size_t>(i)] = eval(v);
      }
    }
    sort(order);
    result.x = vertices_.front();
    result.f = values_.front();
    result.iterations = iter;
    return result;
  }

 private:
  double eval(const Vector& x) {
    ++evaluations_;
    const double f = objective_(x);
    return std::isfinite(f) ? f : kInf;
  }

  // Stable so ties keep their previous order (the start point stays first
  // on a flat objective).
  void sort(std::vector<int>& order) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return values_[static_cast<std::size_t>(a)] <
             values_[static_cast<std::size_t>(b)];
    });
    std::vector<Vector> v;
    std::vector<double> f;
    v.reserve(order.size());
    f.reserve(order.size());
    for (int i : order) {
      v.push_back(std::move(vertices_[static_cast<std::size_t>(i)]));
      f.push_back(values_[static_cast<std::size_t>(i)]);
    }
    vertices_ = std::move(v);
    values_ = std::move(f);
  }

  bool converged() const {
    double f_spread = 0.0;
    double x_spread = 0.0;
    for (std::size_t i = 1; i < values_.size(); ++i) {
      f_spread = std::max(f_spread, std::abs(values_[i] - values_.front()));
      x_spread = std::max(
          x_spread, (vertices_[i] - vertices_.front()).cwiseAbs().maxCoeff());
    }
    if (!(f_spread <= options_.f_tolerance)) return false;
    return x_spread <= options_.x_tolerance || f_spread == 0.0;
  }

  const Objective& objective_;
  int max_iterations_;
  const OptimizerOptions& options_;
  int& evaluations_;
  std::vector<Vector> vertices_;
  std::vector<double> values_;
};

}  // namespace

void OptimizerOptions::validate() const {
  if (!(x_tolerance > 0.0) || !(f_tolerance > 0.0)) {
    throw Error(ErrorCode::kParameter, "optimizer tolerances must be positive");
  }
  if (max_iterations < 0 || restarts < 1) {
    throw Error(ErrorCode::kParameter,
                "optimizer iteration and restart counts must be positive");
  }
}

MinimizeResult minimize(const Objective& objective, const Vector& x0,
                        const OptimizerOptions& options) {
  options.validate();
  if (x0.size() == 0) {
    throw Error(ErrorCode::kParameter, "minimize: empty parameter vector");
  }
  const double f0 = objective(x0);
  if (!std::isfinite(f0)) {
    throw Error(ErrorCode::kInvalidStart,
                "objective is not finite at the start point");
  }
  const int d = static_cast<int>(x0.size());
  const int max_iter =
      options.max_iterations > 0 ? options.max_iterations : 200 * d;

  int evaluations = 1;
  MinimizeResult best;
  best.x = x0;
  best.f = f0;
  int total_iterations = 0;
  for (int run = 0; run <= options.restarts; ++run) {
    SimplexRun simplex(objective, max_iter, options, evaluations);
    MinimizeResult r = simplex.run(best.x, best.f);
    total_iterations += r.iterations;
    const double improvement = best.f - r.f;
    if (r.f <= best.f) {
      best.x = std::move(r.x);
      best.f = r.f;
    }
    best.converged = r.converged;
    if (run > 0 && !(improvement > options.f_tolerance)) break;
  }
  best.iterations = total_iterations;
  best.evaluations = evaluations;
  return best;
}

}  // namespace pwca
