#include "pwca/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>
#include <random>

#include "pwca/convex_fit.hpp"
#include "pwca/error.hpp"
#include "pwca/pwca.hpp"
#include "pwca/solver.hpp"
#include "text_io.hpp"

namespace pwca {

Dataset generate_multiplication_dataset(int grid_size) {
  if (grid_size < 2) throw Error(ErrorCode::kParameter, "grid size must be at least 2");
  const int count = grid_size * grid_size;
  Matrix x(count, 2);
  Vector y(count);
  int m = 0;
  for (int i = 0; i < grid_size; ++i) {
    for (int j = 0; j < grid_size; ++j) {
      x(m, 0) = static_cast<double>(i) / (grid_size - 1);
      x(m, 1) = static_cast<double>(j) / (grid_size - 1);
      y[m] = x(m, 0) * x(m, 1);
      ++m;
    }
  }
  return Dataset(std::move(x), std::move(y), Vector::Zero(2), Vector::Ones(2));
}

std::string_view to_string(ModelKind k) { return k == ModelKind::kConvex ? "convex" : "pwca"; }

std::vector<AccuracyRecord> accuracy_sweep(const Dataset& data, const AccuracyConfig& config) {
  if (config.seeds.empty()) throw Error(ErrorCode::kParameter, "accuracy sweep needs at least one seed");
  std::vector<AccuracyRecord> out;
  auto run = [&](ModelKind kind, int planes) {
    AccuracyRecord rec;
    rec.kind = kind;
    rec.planes = planes;
    rec.rmse = std::numeric_limits<double>::quiet_NaN();
    for (std::uint64_t seed : config.seeds) {
      try {
        const double e = kind == ModelKind::kConvex
                             ? fit_convex(data, planes, Orientation::kConvex, config.options, seed).rmse
                             : fit_pwca_default(data, planes, Orientation::kConvex, config.options, seed).rmse;
        if (std::isnan(rec.rmse) || e < rec.rmse) {
          rec.rmse = e;
          rec.best_seed = seed;
        }
      } catch (const Error& err) {
        if (rec.status.empty()) rec.status = std::string(to_string(err.code())) + ": " + err.what();
      }
    }
    if (!std::isnan(rec.rmse)) rec.status = "ok";
    out.push_back(std::move(rec));
  };
  for (int p : config.convex_planes) run(ModelKind::kConvex, p);
  for (int p : config.pwca_planes) run(ModelKind::kPwca, p);
  return out;
}

void write_accuracy_csv(std::ostream& out, const std::vector<AccuracyRecord>& records) {
  out << "model,planes,rmse,best_seed,status\n";
  for (const AccuracyRecord& r : records) {
    out << to_string(r.kind) << ',' << r.planes << ','
        << (std::isnan(r.rmse) ? std::string() : detail::format_double(r.rmse)) << ',' << r.best_seed << ','
        << r.status << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed to write accuracy CSV");
}

std::vector<Vector> query_points(const Box& x_box, int n, std::uint64_t seed) {
  // Independent stream per N; the same for every model.
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(n)};
  std::mt19937_64 rng(seq);
  std::vector<Vector> points;
  for (int c = 0; c < n; ++c) {
    Vector x(x_box.dimension());
    for (int j = 0; j < x_box.dimension(); ++j) {
      x[j] = std::uniform_real_distribution<double>(x_box.lower[j], x_box.upper[j])(rng);
    }
    points.push_back(std::move(x));
  }
  return points;
}

MilpProblem fixed_point_problem(const ModelBlock& block, const std::vector<Vector>& points) {
  const int count = static_cast<int>(points.size());
  MilpProblem p = replicate(block.problem, count);
  const int vars = block.problem.variable_count();
  std::vector<Term> objective;
  for (int c = 0; c < count; ++c) {
    const Vector& x = points[static_cast<std::size_t>(c)];
    for (std::size_t j = 0; j < block.x_vars.size(); ++j) {
      const int var = c * vars + block.x_vars[j];
      p.add_constraint({{var, 1.0}}, Relation::kEqual, x[static_cast<int>(j)], "fix_" + p.variable(var).name);
    }
    objective.push_back({c * vars + block.y_var, 1.0});
  }
  p.set_objective(std::move(objective), Sense::kMinimize);
  return p;
}

BenchModel pwca_bench_model(const PwcaModel& model, const Dataset& data) {
  return {"pwca", "big-M", translate_pwca(model, model.domain.translation_box()), rmse(model, data),
          [model](const Vector& x) { return evaluate_pwca(model, x).y; }};
}

BenchModel convex_bench_model(const ConvexModel& model, const Dataset& data) {
  // Minimizing y keeps the convex epigraph rows binary-free.
  return {"convex", "linear", translate_convex(model, Sense::kMinimize, model.domain.translation_box()),
          rmse(model, data), [model](const Vector& x) { return evaluate_convex(model, x); }};
}

BenchModel simplex_bench_model(const Triangulation& tri, SimplexFormulation formulation, const Dataset& data) {
  return {"simplex", std::string(to_string(formulation)), translate_simplex(tri, formulation), rmse(tri, data),
          [tri](const Vector& x) { return evaluate_simplex(tri, x); }};
}

namespace {

BenchmarkRecord run_one(const BenchModel& model, const Box& x_box, int n, const PerformanceConfig& config) {
  BenchmarkRecord rec;
  rec.model = model.name;
  rec.formulation = model.formulation;
  rec.n = n;
  rec.repeats = config.repeats;
  rec.rmse = model.rmse;
  rec.seed = config.seed;
  const std::vector<Vector> points = query_points(x_box, n, config.seed);
  const MilpProblem problem = fixed_point_problem(model.block, points);
  rec.binaries = problem.binary_count();
  rec.constraints = problem.constraint_count();
  MilpOptions options;
  options.time_limit_seconds = config.time_limit_seconds;
  std::vector<double> times;
  MilpSolution last;
  for (int r = 0; r < config.repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    last = solve_milp(problem, options);
    times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(times.begin(), times.end());
  const std::size_t mid = times.size() / 2;
  rec.median_ms = times.size() % 2 == 1 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
  rec.status = std::string(to_string(last.status));
  if (last.has_incumbent) {
    rec.objective = last.objective;
    const int vars = model.block.problem.variable_count();
    for (int c = 0; c < n; ++c) {
      const double y = last.values[static_cast<std::size_t>(c * vars + model.block.y_var)];
      rec.max_error = std::max(rec.max_error, std::abs(y - model.evaluate(points[static_cast<std::size_t>(c)])));
    }
  } else {
    rec.objective = std::numeric_limits<double>::quiet_NaN();
    rec.max_error = std::numeric_limits<double>::quiet_NaN();
  }
  return rec;
}

}  // namespace

std::vector<BenchmarkRecord> performance_benchmark(const std::vector<BenchModel>& models, const Box& x_box,
                                                   const PerformanceConfig& config) {
  if (config.repeats < 1) throw Error(ErrorCode::kParameter, "repeats must be at least 1");
  if (!std::is_sorted(config.n_values.begin(), config.n_values.end()) ||
      (!config.n_values.empty() && config.n_values.front() < 1)) {
    throw Error(ErrorCode::kParameter, "N values must be positive and ascending");
  }
  std::vector<BenchmarkRecord> out;
  if (config.parallel) {
    std::vector<std::future<std::vector<BenchmarkRecord>>> jobs;
    for (int n : config.n_values) {
      jobs.push_back(std::async(std::launch::async, [&, n] {
        std::vector<BenchmarkRecord> rows;
        for (const BenchModel& m : models) rows.push_back(run_one(m, x_box, n, config));
        return rows;
      }));
    }
    std::vector<std::vector<BenchmarkRecord>> by_n;
    for (auto& j : jobs) by_n.push_back(j.get());
    for (std::size_t mi = 0; mi < models.size(); ++mi) {
      for (const auto& rows : by_n) out.push_back(rows[mi]);
    }
    return out;
  }
  for (const BenchModel& m : models) {
    bool over_budget = false;
    for (int n : config.n_values) {
      if (over_budget) {
        BenchmarkRecord skipped;
        skipped.model = m.name;
        skipped.formulation = m.formulation;
        skipped.n = n;
        skipped.repeats = 0;
        skipped.rmse = m.rmse;
        skipped.seed = config.seed;
        skipped.status = "skipped";
        skipped.objective = std::numeric_limits<double>::quiet_NaN();
        skipped.max_error = std::numeric_limits<double>::quiet_NaN();
        out.push_back(std::move(skipped));
        continue;
      }
      out.push_back(run_one(m, x_box, n, config));
      over_budget = out.back().median_ms > 1000.0 * config.budget_seconds;
    }
  }
  return out;
}

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records, bool timing) {
  auto num = [](double v) { return std::isnan(v) ? std::string() : detail::format_double(v); };
  out << "model,formulation,N,median_ms,repeats,rmse,binaries,constraints,seed,status,objective,max_error\n";
  for (const BenchmarkRecord& r : records) {
    out << r.model << ',' << r.formulation << ',' << r.n << ',' << (timing ? num(r.median_ms) : std::string())
        << ',' << r.repeats << ',' << num(r.rmse) << ',' << r.binaries << ',' << r.constraints << ',' << r.seed
        << ',' << r.status << ',' << num(r.objective) << ',' << num(r.max_error) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed to write benchmark CSV");
}

}  // namespace pwca
