#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pwca/dataset.hpp"
#include "pwca/milp.hpp"
#include "pwca/optimizer.hpp"
#include "pwca/pwca.hpp"
#include "pwca/simplex.hpp"

namespace pwca {

/// y = x1 * x2 on a grid_size x grid_size grid over [0, 1]^2, endpoints
/// included, first input as the outer loop.
Dataset generate_multiplication_dataset(int grid_size);

enum class ModelKind { kConvex, kPwca };
std::string_view to_string(ModelKind k);

struct AccuracyRecord {
  ModelKind kind = ModelKind::kConvex;
  int planes = 0;
  double rmse = 0.0;      // best over seeds; NaN when every seed failed
  std::uint64_t best_seed = 0;
  std::string status;     // "ok" or the first error
};

struct AccuracyConfig {
  std::vector<int> convex_planes;
  std::vector<int> pwca_planes;
  std::vector<std::uint64_t> seeds{1};
  OptimizerOptions options;
};

/// Fits every (kind, plane count) cell once per seed and keeps the lowest
/// RMSE. Fit errors mark the cell instead of stopping the sweep.
std::vector<AccuracyRecord> accuracy_sweep(const Dataset& data, const AccuracyConfig& config);

/// Header model,planes,rmse,best_seed,status.
void write_accuracy_csv(std::ostream& out, const std::vector<AccuracyRecord>& records);

/// One model in the performance comparison.
struct BenchModel {
  std::string name;         // "pwca", "simplex", ...
  std::string formulation;  // "big-M", "CC", "MC", "Log"
  ModelBlock block;
  double rmse = 0.0;
  std::function<double(const Vector&)> evaluate;
};

/// Benchmark entries for the fitted models; rmse is measured on `data`.
BenchModel pwca_bench_model(const PwcaModel& model, const Dataset& data);
BenchModel convex_bench_model(const ConvexModel& model, const Dataset& data);
BenchModel simplex_bench_model(const Triangulation& tri, SimplexFormulation formulation,
                               const Dataset& data);

struct BenchmarkRecord {
  std::string model;
  std::string formulation;
  int n = 0;                 // replications
  double median_ms = 0.0;
  int repeats = 0;
  double rmse = 0.0;
  int binaries = 0;
  int constraints = 0;
  std::uint64_t seed = 0;
  std::string status;        // solver status of the last repeat
  double objective = 0.0;
  double max_error = 0.0;    // worst |y_m - model(x_m)| over the copies
};

struct PerformanceConfig {
  std::vector<int> n_values{1, 10, 30, 100, 300};
  int repeats = 10;
  std::uint64_t seed = 1;
  double time_limit_seconds = 60.0;  // per solve
  /// Skip larger N for a model once one row's median exceeds this.
  double budget_seconds = 600.0;
  bool parallel = false;             // across N values only
};

/// For every N, draws N query points in the model box from a generator
/// seeded by (seed, N), so all models see the same points. Each model's
/// block is replicated N times with x fixed by equality rows and the sum of
/// the y copies minimized; only solve_milp is timed.
std::vector<BenchmarkRecord> performance_benchmark(const std::vector<BenchModel>& models,
                                                   const Box& x_box,
                                                   const PerformanceConfig& config);

/// Query points used for a given N.
std::vector<Vector> query_points(const Box& x_box, int n, std::uint64_t seed);

/// Replicated problem with x fixed at `points`, objective min sum y.
MilpProblem fixed_point_problem(const ModelBlock& block, const std::vector<Vector>& points);

/// Header model,formulation,N,median_ms,repeats,rmse,binaries,constraints,
/// seed,status,objective,max_error. With `timing` false the median_ms
/// column is left empty, which makes reruns byte-comparable.
void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records,
                         bool timing = true);

}  // namespace pwca
