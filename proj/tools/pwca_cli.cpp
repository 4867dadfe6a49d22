// pwca: dataset generation, model fitting, MILP translation, solving and
// the benchmark sweeps. Exit status 0 on success, 2 for usage errors, 3 for
// malformed or unusable input data, 1 for anything else.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pwca/bench.hpp"
#include "pwca/convex_fit.hpp"
#include "pwca/error.hpp"
#include "pwca/lp_format.hpp"
#include "pwca/milp.hpp"
#include "pwca/pwca.hpp"
#include "pwca/simplex.hpp"
#include "pwca/solver.hpp"

namespace {

using namespace pwca;

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParameter:
    case ErrorCode::kFormulation:
      return kExitUsage;
    case ErrorCode::kParse:
    case ErrorCode::kIo:
    case ErrorCode::kInvalidDimension:
    case ErrorCode::kDomain:
    case ErrorCode::kExtrapolation:
    case ErrorCode::kUnderdetermined:
    case ErrorCode::kNaming:
      return kExitData;
    default:
      return kExitOther;
  }
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  return in;
}

// Writes through a buffer so a failed command never leaves a partial file.
template <typename F>
void write_file(const std::string& path, F&& body) {
  std::ostringstream buf;
  body(buf);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out << buf.str();
  if (!out.flush()) throw Error(ErrorCode::kIo, "failed writing '" + path + "'");
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in = open_in(path);
  return read_dataset_csv(in);
}

enum class ModelFile { kConvex, kPwca, kTriangulation };

ModelFile detect_model(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::string first;
    if (!(words >> first) || first[0] == '#') continue;
    if (first == "pwca-convex-model") return ModelFile::kConvex;
    if (first == "pwca-piecewise-model") return ModelFile::kPwca;
    if (first == "pwca-triangulation") return ModelFile::kTriangulation;
    break;
  }
  throw Error(ErrorCode::kParse, "unrecognized model file");
}

std::string read_all(const std::string& path) {
  std::ifstream in = open_in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Box box_of(const Domain& d) { return Box{d.x_lower, d.x_upper}; }

struct Options {
  std::uint64_t seed = 1;
  std::string data, out, model, lp;
  int grid = 100;
  int planes = 2;
  std::string orientation = "convex";
  std::vector<int> segments{2};
  std::string scheme = "diagonal";
  std::string fit_mode = "least-squares";
  int replicate = 1;
  int fix_points = 0;
  std::string formulation = "Log";
  std::string sense = "min";
  double time_limit = kInfinity;
  std::string values_out;
  std::vector<int> convex_planes{1, 2, 3, 4, 6, 10};
  std::vector<int> pwca_planes{2, 4, 6};
  int seed_count = 5;
  std::vector<int> n_values{1, 10, 30, 100, 300};
  int repeats = 10;
  std::vector<std::string> formulations{"CC", "MC", "Log"};
  double budget = 600.0;
  bool parallel = false;
  bool no_timing = false;
};

void cmd_gen_data(const Options& o) {
  const Dataset d = generate_multiplication_dataset(o.grid);
  write_file(o.out, [&](std::ostream& out) { write_dataset_csv(out, d); });
  std::cout << "wrote " << d.size() << " points to " << o.out << '\n';
}

void cmd_fit_convex(const Options& o) {
  const Dataset d = load_dataset(o.data);
  const ConvexFit fit = fit_convex(d, o.planes, parse_orientation(o.orientation), {}, o.seed);
  write_file(o.out, [&](std::ostream& out) { write_convex_model(out, fit.model); });
  std::cout << "rmse " << fit.rmse << (fit.converged ? "" : " (not converged)") << '\n';
}

void cmd_fit_pwca(const Options& o) {
  const Dataset d = load_dataset(o.data);
  const PwcaFit fit = fit_pwca_default(d, o.planes, parse_orientation(o.orientation), {}, o.seed);
  write_file(o.out, [&](std::ostream& out) { write_pwca_model(out, fit.model); });
  std::cout << "rmse " << fit.rmse << (fit.converged ? "" : " (not converged)") << '\n';
}

void cmd_fit_simplex(const Options& o) {
  const Dataset d = load_dataset(o.data);
  std::vector<int> segs = o.segments;
  if (segs.size() == 1) segs.assign(static_cast<std::size_t>(d.input_dims()), segs[0]);
  if (static_cast<int>(segs.size()) != d.input_dims()) {
    throw Error(ErrorCode::kParameter, "--segments needs one value or one per input");
  }
  if (o.fit_mode != "interpolate" && o.fit_mode != "least-squares") {
    throw Error(ErrorCode::kParameter, "--mode must be interpolate or least-squares");
  }
  const Triangulation grid =
      build_grid_triangulation(d.domain().x_lower, d.domain().x_upper, segs, parse_scheme(o.scheme));
  const Triangulation tri = fit_vertex_values(
      grid, d, o.fit_mode == "interpolate" ? VertexFit::kInterpolate : VertexFit::kLeastSquares);
  write_file(o.out, [&](std::ostream& out) { write_triangulation(out, tri); });
  std::cout << "rmse " << rmse(tri, d) << ", " << tri.simplex_count() << " simplices\n";
}

void cmd_translate(const Options& o) {
  if (o.sense != "min" && o.sense != "max") throw Error(ErrorCode::kParameter, "--sense must be min or max");
  const Sense sense = o.sense == "min" ? Sense::kMinimize : Sense::kMaximize;
  const std::string text = read_all(o.model);
  std::istringstream in(text);
  ModelBlock block;
  Box x_box;
  switch (detect_model(text)) {
    case ModelFile::kConvex: {
      const ConvexModel m = read_convex_model(in);
      block = translate_convex(m, sense, m.domain.translation_box());
      x_box = box_of(m.domain);
      break;
    }
    case ModelFile::kPwca: {
      const PwcaModel m = read_pwca_model(in);
      block = translate_pwca(m, m.domain.translation_box());
      x_box = box_of(m.domain);
      break;
    }
    case ModelFile::kTriangulation: {
      const Triangulation t = read_triangulation(in);
      block = translate_simplex(t, parse_formulation(o.formulation));
      x_box = Box{t.lower, t.upper};
      break;
    }
  }
  MilpProblem problem;
  if (o.fix_points > 0) {
    if (sense != Sense::kMinimize) throw Error(ErrorCode::kParameter, "--fix-points minimizes the y sum");
    problem = fixed_point_problem(block, query_points(x_box, o.fix_points, o.seed));
  } else {
    problem = replicate(block.problem, o.replicate);
    std::vector<Term> objective;
    const int vars = block.problem.variable_count();
    for (int c = 0; c < o.replicate; ++c) objective.push_back({c * vars + block.y_var, 1.0});
    problem.set_objective(std::move(objective), sense);
  }
  write_file(o.out, [&](std::ostream& out) { export_lp(out, problem); });
  std::cout << problem.variable_count() << " variables, " << problem.binary_count() << " binaries, "
            << problem.constraint_count() << " constraints\n";
}

void cmd_solve(const Options& o) {
  std::ifstream in = open_in(o.lp);
  const MilpProblem problem = read_lp(in);
  MilpOptions options;
  options.time_limit_seconds = o.time_limit;
  const MilpSolution s = solve_milp(problem, options);
  std::cout << "status " << to_string(s.status) << '\n';
  std::cout.precision(17);
  if (s.has_incumbent) std::cout << "objective " << s.objective << '\n';
  std::cout << "nodes " << s.node_count << '\n';
  if (!s.message.empty()) std::cout << "message " << s.message << '\n';
  if (!o.values_out.empty() && s.has_incumbent) {
    write_file(o.values_out, [&](std::ostream& out) {
      out.precision(17);
      out << "name,value\n";
      for (int j = 0; j < problem.variable_count(); ++j) {
        out << problem.variable(j).name << ',' << s.values[static_cast<std::size_t>(j)] << '\n';
      }
    });
  }
}

std::vector<std::uint64_t> seed_list(const Options& o) {
  if (o.seed_count < 1) throw Error(ErrorCode::kParameter, "--seeds must be at least 1");
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < o.seed_count; ++i) seeds.push_back(o.seed + static_cast<std::uint64_t>(i));
  return seeds;
}

void cmd_bench_accuracy(const Options& o) {
  const Dataset d = o.data.empty() ? generate_multiplication_dataset(o.grid) : load_dataset(o.data);
  AccuracyConfig config;
  config.convex_planes = o.convex_planes;
  config.pwca_planes = o.pwca_planes;
  config.seeds = seed_list(o);
  const auto rows = accuracy_sweep(d, config);
  write_file(o.out, [&](std::ostream& out) { write_accuracy_csv(out, rows); });
  std::cout << rows.size() << " rows written to " << o.out << '\n';
}

void cmd_bench_perf(const Options& o) {
  const Dataset d = o.data.empty() ? generate_multiplication_dataset(o.grid) : load_dataset(o.data);
  std::vector<BenchModel> models;
  if (o.planes > 0) {
    models.push_back(pwca_bench_model(fit_pwca_default(d, o.planes, Orientation::kConvex, {}, o.seed).model, d));
  }
  if (!o.formulations.empty()) {
    std::vector<int> segs = o.segments;
    if (segs.size() == 1) segs.assign(static_cast<std::size_t>(d.input_dims()), segs[0]);
    const Triangulation tri = fit_vertex_values(
        build_grid_triangulation(d.domain().x_lower, d.domain().x_upper, segs, parse_scheme(o.scheme)), d,
        VertexFit::kLeastSquares);
    for (const std::string& f : o.formulations) models.push_back(simplex_bench_model(tri, parse_formulation(f), d));
  }
  PerformanceConfig config;
  config.n_values = o.n_values;
  config.repeats = o.repeats;
  config.seed = o.seed;
  config.time_limit_seconds = o.time_limit;
  config.budget_seconds = o.budget;
  config.parallel = o.parallel;
  const auto rows = performance_benchmark(models, box_of(d.domain()), config);
  write_file(o.out, [&](std::ostream& out) { write_benchmark_csv(out, rows, !o.no_timing); });
  std::cout << rows.size() << " rows written to " << o.out << '\n';
}

int run(int argc, char** argv) {
  CLI::App app{"Piecewise-convex approximation toolkit"};
  app.require_subcommand(1);
  Options o;

  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Random seed")->envname("PWCA_SEED")->capture_default_str();
  };

  auto* gen = app.add_subcommand("gen-data", "Write the y = x1*x2 grid dataset");
  gen->add_option("--grid", o.grid, "Points per axis")->capture_default_str();
  gen->add_option("--out", o.out, "Output CSV")->required();
  add_seed(gen);

  auto* fc = app.add_subcommand("fit-convex", "Fit a max- or min-of-planes model");
  fc->add_option("--data", o.data, "Dataset CSV")->required();
  fc->add_option("--planes", o.planes, "Number of planes")->required();
  fc->add_option("--orientation", o.orientation, "convex or concave")->capture_default_str();
  fc->add_option("--out", o.out, "Output model file")->required();
  add_seed(fc);

  auto* fp = app.add_subcommand("fit-pwca", "Fit a piecewise-convex model");
  fp->add_option("--data", o.data, "Dataset CSV")->required();
  fp->add_option("--planes", o.planes, "Even number of planes")->required();
  fp->add_option("--orientation", o.orientation, "convex or concave")->capture_default_str();
  fp->add_option("--out", o.out, "Output model file")->required();
  add_seed(fp);

  auto* fs = app.add_subcommand("fit-simplex", "Fit a triangulated interpolant");
  fs->add_option("--data", o.data, "Dataset CSV")->required();
  fs->add_option("--segments", o.segments, "Segments per input (one value or one per input)")->delimiter(',');
  fs->add_option("--scheme", o.scheme, "diagonal or union-jack")->capture_default_str();
  fs->add_option("--mode", o.fit_mode, "interpolate or least-squares")->capture_default_str();
  fs->add_option("--out", o.out, "Output triangulation file")->required();

  auto* tr = app.add_subcommand("translate", "Write the MILP of a model as an LP file");
  tr->add_option("--model", o.model, "Model file from a fit command")->required();
  tr->add_option("--out", o.out, "Output LP file")->required();
  tr->add_option("--replicate", o.replicate, "Independent copies of the block")->capture_default_str();
  tr->add_option("--fix-points", o.fix_points, "Copies with x fixed at random points, minimizing the y sum");
  tr->add_option("--formulation", o.formulation, "CC, MC or Log (triangulations)")->capture_default_str();
  tr->add_option("--sense", o.sense, "Objective on the y sum: min or max")->capture_default_str();
  add_seed(tr);

  auto* so = app.add_subcommand("solve", "Solve an LP file with the built-in branch and bound");
  so->add_option("--lp", o.lp, "LP file")->required();
  so->add_option("--time-limit", o.time_limit, "Seconds");
  so->add_option("--values", o.values_out, "Write name,value CSV of the solution");

  auto* ba = app.add_subcommand("bench-accuracy", "RMSE by plane count for convex and piecewise-convex fits");
  ba->add_option("--data", o.data, "Dataset CSV (default: multiplication grid)");
  ba->add_option("--grid", o.grid, "Grid size when no dataset is given")->capture_default_str();
  ba->add_option("--convex-planes", o.convex_planes, "Plane counts")->delimiter(',');
  ba->add_option("--pwca-planes", o.pwca_planes, "Plane counts")->delimiter(',');
  ba->add_option("--seeds", o.seed_count, "Seeds per cell, starting at --seed")->capture_default_str();
  ba->add_option("--out", o.out, "Output CSV")->required();
  add_seed(ba);

  auto* bp = app.add_subcommand("bench-perf", "Solve-time comparison on replicated fixed-point problems");
  bp->add_option("--data", o.data, "Dataset CSV (default: multiplication grid)");
  bp->add_option("--grid", o.grid, "Grid size when no dataset is given")->capture_default_str();
  bp->add_option("--planes", o.planes, "Piecewise-convex plane count (0 to skip)");
  bp->add_option("--segments", o.segments, "Simplex grid segments per input")->delimiter(',');
  bp->add_option("--scheme", o.scheme, "diagonal or union-jack")->capture_default_str();
  bp->add_option("--formulations", o.formulations, "Simplex formulations")->delimiter(',');
  bp->add_option("--n", o.n_values, "Replication counts, ascending")->delimiter(',');
  bp->add_option("--repeats", o.repeats, "Solves per row")->capture_default_str();
  bp->add_option("--time-limit", o.time_limit, "Seconds per solve");
  bp->add_option("--budget", o.budget, "Skip larger N once a median exceeds this many seconds")
      ->capture_default_str();
  bp->add_flag("--parallel", o.parallel, "Run N values concurrently");
  bp->add_flag("--no-timing", o.no_timing, "Leave the median_ms column empty");
  bp->add_option("--out", o.out, "Output CSV")->required();
  add_seed(bp);
  o.planes = 4;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (gen->parsed()) cmd_gen_data(o);
  else if (fc->parsed()) cmd_fit_convex(o);
  else if (fp->parsed()) cmd_fit_pwca(o);
  else if (fs->parsed()) cmd_fit_simplex(o);
  else if (tr->parsed()) cmd_translate(o);
  else if (so->parsed()) cmd_solve(o);
  else if (ba->parsed()) cmd_bench_accuracy(o);
  else if (bp->parsed()) cmd_bench_perf(o);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pwca::Error& e) {
    std::cerr << "error (" << pwca::to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
}
