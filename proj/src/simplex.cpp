#include "pwca/simplex.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "model_io.hpp"
#include "pwca/error.hpp"
#include "text_io.hpp"

namespace pwca {

namespace {

constexpr const char* kHeader = "pwca-triangulation";

// Barycentric coordinates of x in simplex s.
Vector barycentric(const Triangulation& tri, int s, const Eigen::Ref<const Vector>& x) {
  const auto& idx = tri.simplices[static_cast<std::size_t>(s)];
  const int d = tri.input_dims();
  Matrix m(d, d);
  const Vector v0 = tri.vertices.row(idx[0]).transpose();
  for (int k = 0; k < d; ++k) m.col(k) = tri.vertices.row(idx[static_cast<std::size_t>(k + 1)]).transpose() - v0;
  const Vector mu = m.partialPivLu().solve(x - v0);
  Vector w(d + 1);
  w[0] = 1.0 - mu.sum();
  w.tail(d) = mu;
  return w;
}

struct Location {
  int simplex = -1;
  Vector weights;
};

bool inside_box(const Triangulation& tri, const Eigen::Ref<const Vector>& x) {
  for (int j = 0; j < tri.input_dims(); ++j) {
    const double slack = 1e-12 * std::max(1.0, tri.upper[j] - tri.lower[j]);
    if (!(x[j] >= tri.lower[j] - slack && x[j] <= tri.upper[j] + slack)) return false;
  }
  return true;
}

Location locate(const Triangulation& tri, const Eigen::Ref<const Vector>& x) {
  if (x.size() != tri.input_dims()) {
    throw Error(ErrorCode::kInvalidDimension, "point dimension does not match the triangulation");
  }
  if (!inside_box(tri, x)) throw Error(ErrorCode::kDomain, "point outside the triangulated box");
  int cell = 0;
  for (int j = 0; j < tri.input_dims(); ++j) {
    const int k = tri.segments[static_cast<std::size_t>(j)];
    const double h = (tri.upper[j] - tri.lower[j]) / k;
    const int c = std::clamp(static_cast<int>(std::floor((x[j] - tri.lower[j]) / h)), 0, k - 1);
    cell = cell * k + c;
  }
  const int per_cell = tri.simplex_count() /
                       std::accumulate(tri.segments.begin(), tri.segments.end(), 1, std::multiplies<>());
  Location best;
  double best_min = -kInfinity;
  for (int s = cell * per_cell; s < (cell + 1) * per_cell; ++s) {
    Vector w = barycentric(tri, s, x);
    const double lowest = w.minCoeff();
    if (lowest > best_min) {
      best_min = lowest;
      best.simplex = s;
      best.weights = std::move(w);
    }
  }
  return best;
}

int grid_index(int i, int j, int k1) { return i * (k1 + 1) + j; }

int bit_count(int segments) {
  int b = 0;
  while ((1 << b) < segments) ++b;
  return b;
}

}  // namespace

std::string_view to_string(TriangulationScheme s) {
  return s == TriangulationScheme::kDiagonal ? "diagonal" : "union-jack";
}

TriangulationScheme parse_scheme(std::string_view s) {
  if (s == "diagonal") return TriangulationScheme::kDiagonal;
  if (s == "union-jack") return TriangulationScheme::kUnionJack;
  throw Error(ErrorCode::kParameter, "unknown triangulation scheme '" + std::string(s) + "'");
}

std::string_view to_string(SimplexFormulation f) {
  switch (f) {
    case SimplexFormulation::kCC: return "CC";
    case SimplexFormulation::kMC: return "MC";
    case SimplexFormulation::kLog: return "Log";
  }
  return "CC";
}

SimplexFormulation parse_formulation(std::string_view s) {
  std::string u(s);
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::toupper(c); });
  if (u == "CC") return SimplexFormulation::kCC;
  if (u == "MC") return SimplexFormulation::kMC;
  if (u == "LOG") return SimplexFormulation::kLog;
  throw Error(ErrorCode::kParameter, "unknown formulation '" + std::string(s) + "'");
}

void Triangulation::validate() const {
  const int d = input_dims();
  if (d < 1 || upper.size() != d || static_cast<int>(segments.size()) != d || vertices.cols() != d ||
      values.size() != vertices.rows()) {
    throw Error(ErrorCode::kParameter, "triangulation sizes are inconsistent");
  }
  if (!values.allFinite()) throw Error(ErrorCode::kParameter, "vertex values must be finite");
  for (int s = 0; s < simplex_count(); ++s) {
    const auto& idx = simplices[static_cast<std::size_t>(s)];
    if (static_cast<int>(idx.size()) != d + 1) throw Error(ErrorCode::kParameter, "simplex size mismatch");
    for (int v : idx) {
      if (v < 0 || v >= vertex_count()) throw Error(ErrorCode::kParameter, "simplex vertex out of range");
    }
    Matrix m(d, d);
    for (int k = 0; k < d; ++k) {
      m.col(k) = (vertices.row(idx[static_cast<std::size_t>(k + 1)]) - vertices.row(idx[0])).transpose();
    }
    if (std::abs(m.determinant()) < 1e-300) throw Error(ErrorCode::kParameter, "degenerate simplex");
  }
}

Triangulation build_grid_triangulation(const Vector& lower, const Vector& upper,
                                       const std::vector<int>& segments, TriangulationScheme scheme) {
  const int d = static_cast<int>(lower.size());
  if (d < 1 || d > 2) throw Error(ErrorCode::kInvalidDimension, "grids support one or two inputs");
  if (upper.size() != d || static_cast<int>(segments.size()) != d) {
    throw Error(ErrorCode::kInvalidDimension, "bounds and segment counts disagree");
  }
  if (scheme == TriangulationScheme::kUnionJack && d != 2) {
    throw Error(ErrorCode::kInvalidDimension, "union-jack grids need two inputs");
  }
  for (int j = 0; j < d; ++j) {
    if (!(lower[j] < upper[j]) || !std::isfinite(lower[j]) || !std::isfinite(upper[j])) {
      throw Error(ErrorCode::kParameter, "grid box must be finite and non-empty");
    }
    if (segments[static_cast<std::size_t>(j)] < 1) throw Error(ErrorCode::kParameter, "segments must be >= 1");
  }
  Triangulation tri;
  tri.scheme = scheme;
  tri.lower = lower;
  tri.upper = upper;
  tri.segments = segments;
  auto coord = [&](int j, int i) {
    return lower[j] + (upper[j] - lower[j]) * i / segments[static_cast<std::size_t>(j)];
  };

  if (d == 1) {
    const int k = segments[0];
    tri.vertices.resize(k + 1, 1);
    for (int i = 0; i <= k; ++i) tri.vertices(i, 0) = coord(0, i);
    for (int i = 0; i < k; ++i) tri.simplices.push_back({i, i + 1});
    tri.values = Vector::Zero(k + 1);
    return tri;
  }

  const int k0 = segments[0];
  const int k1 = segments[1];
  const int grid = (k0 + 1) * (k1 + 1);
  const int centers = scheme == TriangulationScheme::kUnionJack ? k0 * k1 : 0;
  tri.vertices.resize(grid + centers, 2);
  for (int i = 0; i <= k0; ++i) {
    for (int j = 0; j <= k1; ++j) {
      tri.vertices(grid_index(i, j, k1), 0) = coord(0, i);
      tri.vertices(grid_index(i, j, k1), 1) = coord(1, j);
    }
  }
  for (int i = 0; i < k0; ++i) {
    for (int j = 0; j < k1; ++j) {
      const int a = grid_index(i, j, k1);
      const int b = grid_index(i + 1, j, k1);
      const int c = grid_index(i, j + 1, k1);
      const int e = grid_index(i + 1, j + 1, k1);
      if (scheme == TriangulationScheme::kDiagonal) {
        if ((i + j) % 2 == 0) {
          tri.simplices.push_back({a, b, e});
          tri.simplices.push_back({a, c, e});
        } else {
          tri.simplices.push_back({a, b, c});
          tri.simplices.push_back({b, e, c});
        }
      } else {
        const int m = grid + i * k1 + j;
        tri.vertices(m, 0) = 0.5 * (coord(0, i) + coord(0, i + 1));
        tri.vertices(m, 1) = 0.5 * (coord(1, j) + coord(1, j + 1));
        tri.simplices.push_back({a, b, m});
        tri.simplices.push_back({b, e, m});
        tri.simplices.push_back({e, c, m});
        tri.simplices.push_back({c, a, m});
      }
    }
  }
  tri.values = Vector::Zero(grid + centers);
  return tri;
}

double evaluate_simplex(const Triangulation& tri, const Eigen::Ref<const Vector>& x) {
  const Location loc = locate(tri, x);
  const auto& idx = tri.simplices[static_cast<std::size_t>(loc.simplex)];
  double y = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) y += loc.weights[static_cast<int>(k)] * tri.values[idx[k]];
  return y;
}

double rmse(const Triangulation& tri, const Dataset& data) {
  double sse = 0.0;
  for (int m = 0; m < data.size(); ++m) {
    const double r = evaluate_simplex(tri, data.point(m)) - data.y()[m];
    sse += r * r;
  }
  return std::sqrt(sse / data.size());
}

namespace {

Vector interpolate_values(const Triangulation& tri, const Dataset& data) {
  const int d = tri.input_dims();
  const Domain& dom = data.domain();
  const double diameter = std::max(dom.diameter(), 1e-300);
  Vector out(tri.vertex_count());
  std::vector<int> order(static_cast<std::size_t>(data.size()));
  std::vector<double> dist(static_cast<std::size_t>(data.size()));
  for (int v = 0; v < tri.vertex_count(); ++v) {
    const Vector p = tri.vertices.row(v).transpose();
    for (int j = 0; j < d; ++j) {
      const double slack = 1e-12 * diameter;
      if (p[j] < dom.x_lower[j] - slack || p[j] > dom.x_upper[j] + slack) {
        throw Error(ErrorCode::kExtrapolation, "vertex " + std::to_string(v) + " lies outside the samples");
      }
    }
    for (int m = 0; m < data.size(); ++m) {
      dist[static_cast<std::size_t>(m)] = (data.point(m) - p).squaredNorm();
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)];
    });
    if (std::sqrt(dist[static_cast<std::size_t>(order[0])]) <= 1e-12 * diameter) {
      out[v] = data.y()[order[0]];
      continue;
    }
    // Local plane through the nearest samples, widened until it is determined.
    int k = std::min(data.size(), d == 1 ? 3 : 9);
    for (;;) {
      Matrix a(k, d + 1);
      Vector b(k);
      for (int r = 0; r < k; ++r) {
        const int m = order[static_cast<std::size_t>(r)];
        a(r, 0) = 1.0;
        a.row(r).tail(d) = (data.point(m) - p).transpose();
        b[r] = data.y()[m];
      }
      Eigen::ColPivHouseholderQR<Matrix> qr(a);
      if (qr.rank() == d + 1) {
        out[v] = qr.solve(b)[0];
        break;
      }
      if (k == data.size()) {
        throw Error(ErrorCode::kUnderdetermined, "samples do not determine a local plane");
      }
      k = std::min(data.size(), 2 * k);
    }
  }
  return out;
}

Vector least_squares_values(const Triangulation& tri, const Dataset& data) {
  using Sparse = Eigen::SparseMatrix<double>;
  std::vector<Eigen::Triplet<double>> entries;
  for (int m = 0; m < data.size(); ++m) {
    Location loc;
    try {
      loc = locate(tri, data.point(m));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDomain) throw;
      throw Error(ErrorCode::kExtrapolation, "sample " + std::to_string(m) + " lies outside the grid");
    }
    const auto& idx = tri.simplices[static_cast<std::size_t>(loc.simplex)];
    for (std::size_t k = 0; k < idx.size(); ++k) {
      entries.emplace_back(m, idx[k], loc.weights[static_cast<int>(k)]);
    }
  }
  Sparse a(data.size(), tri.vertex_count());
  a.setFromTriplets(entries.begin(), entries.end());
  const Sparse normal = (a.transpose() * a).pruned();
  const Vector rhs = a.transpose() * data.y();
  for (int v = 0; v < tri.vertex_count(); ++v) {
    if (!(normal.coeff(v, v) > 0.0)) {
      throw Error(ErrorCode::kUnderdetermined, "vertex " + std::to_string(v) + " has no samples nearby");
    }
  }
  Eigen::SimplicialLDLT<Sparse> solver(normal);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kUnderdetermined, "vertex values are not determined by the samples");
  }
  Vector values = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !values.allFinite()) {
    throw Error(ErrorCode::kUnderdetermined, "vertex values are not determined by the samples");
  }
  return values;
}

}  // namespace

Triangulation fit_vertex_values(const Triangulation& tri, const Dataset& data, VertexFit mode) {
  tri.validate();
  if (data.input_dims() != tri.input_dims()) {
    throw Error(ErrorCode::kInvalidDimension, "dataset and triangulation dimensions differ");
  }
  Triangulation out = tri;
  out.values = mode == VertexFit::kInterpolate ? interpolate_values(tri, data)
                                               : least_squares_values(tri, data);
  return out;
}

namespace {

struct SimplexBuilder {
  const Triangulation& tri;
  ModelBlock block;

  SimplexBuilder(const Triangulation& t, const BlockNames& names) : tri(t) {
    const int d = tri.input_dims();
    if (!names.x.empty() && static_cast<int>(names.x.size()) != d) {
      throw Error(ErrorCode::kNaming, "expected one name per input variable");
    }
    MilpProblem& p = block.problem;
    for (int j = 0; j < d; ++j) {
      const std::string name = names.x.empty() ? "x" + std::to_string(j + 1) : names.x[static_cast<std::size_t>(j)];
      block.x_vars.push_back(p.add_continuous(name, tri.lower[j], tri.upper[j]));
    }
    block.y_var = p.add_continuous(names.y, tri.values.minCoeff(), tri.values.maxCoeff());
  }

  std::vector<int> add_lambdas() {
    std::vector<int> lambda;
    for (int v = 0; v < tri.vertex_count(); ++v) {
      lambda.push_back(block.problem.add_continuous("l" + std::to_string(v + 1), 0.0, 1.0));
    }
    return lambda;
  }

  // sum lambda = 1, x = sum lambda v, y >= sum lambda f.
  void add_lambda_links(const std::vector<int>& lambda) {
    MilpProblem& p = block.problem;
    std::vector<Term> sum;
    for (int l : lambda) sum.push_back({l, 1.0});
    p.add_constraint(sum, Relation::kEqual, 1.0, "convex");
    for (int j = 0; j < tri.input_dims(); ++j) {
      std::vector<Term> row{{block.x_vars[static_cast<std::size_t>(j)], 1.0}};
      for (int v = 0; v < tri.vertex_count(); ++v) {
        row.push_back({lambda[static_cast<std::size_t>(v)], -tri.vertices(v, j)});
      }
      p.add_constraint(row, Relation::kEqual, 0.0, "link_x" + std::to_string(j + 1));
    }
    std::vector<Term> row{{block.y_var, 1.0}};
    for (int v = 0; v < tri.vertex_count(); ++v) row.push_back({lambda[static_cast<std::size_t>(v)], -tri.values[v]});
    p.add_constraint(row, Relation::kGreaterEqual, 0.0, "link_y");
  }

  std::vector<int> add_selectors() {
    std::vector<int> sel;
    for (int s = 0; s < tri.simplex_count(); ++s) sel.push_back(block.problem.add_binary("s" + std::to_string(s + 1)));
    return sel;
  }

  void add_select_one(const std::vector<int>& sel) {
    std::vector<Term> sum;
    for (int s : sel) sum.push_back({s, 1.0});
    block.problem.add_constraint(sum, Relation::kEqual, 1.0, "select");
  }

  void convex_combination() {
    const std::vector<int> lambda = add_lambdas();
    const std::vector<int> sel = add_selectors();
    add_lambda_links(lambda);
    add_select_one(sel);
    std::vector<std::vector<int>> owners(static_cast<std::size_t>(tri.vertex_count()));
    for (int s = 0; s < tri.simplex_count(); ++s) {
      for (int v : tri.simplices[static_cast<std::size_t>(s)]) owners[static_cast<std::size_t>(v)].push_back(s);
    }
    for (int v = 0; v < tri.vertex_count(); ++v) {
      const auto& own = owners[static_cast<std::size_t>(v)];
      if (static_cast<int>(own.size()) == tri.simplex_count()) continue;  // implied by select
      std::vector<Term> row{{lambda[static_cast<std::size_t>(v)], 1.0}};
      for (int s : own) row.push_back({sel[static_cast<std::size_t>(s)], -1.0});
      block.problem.add_constraint(row, Relation::kLessEqual, 0.0, "v" + std::to_string(v + 1));
    }
  }

  void multiple_choice() {
    const int d = tri.input_dims();
    MilpProblem& p = block.problem;
    const std::vector<int> sel = add_selectors();
    std::vector<std::vector<int>> w(static_cast<std::size_t>(tri.simplex_count()));
    for (int s = 0; s < tri.simplex_count(); ++s) {
      for (int j = 0; j < d; ++j) {
        w[static_cast<std::size_t>(s)].push_back(
            p.add_continuous("w" + std::to_string(s + 1) + "_" + std::to_string(j + 1),
                             std::min(0.0, tri.lower[j]), std::max(0.0, tri.upper[j])));
      }
    }
    for (int j = 0; j < d; ++j) {
      std::vector<Term> row{{block.x_vars[static_cast<std::size_t>(j)], 1.0}};
      for (int s = 0; s < tri.simplex_count(); ++s) row.push_back({w[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)], -1.0});
      p.add_constraint(row, Relation::kEqual, 0.0, "link_x" + std::to_string(j + 1));
    }
    // Per simplex, [1 v_k^T] rows; its inverse gives the barycentric
    // coordinates as affine functions of x.
    std::vector<Matrix> inverse;
    for (int s = 0; s < tri.simplex_count(); ++s) {
      const auto& idx = tri.simplices[static_cast<std::size_t>(s)];
      Matrix m(d + 1, d + 1);
      for (int k = 0; k <= d; ++k) {
        m(0, k) = 1.0;
        m.col(k).tail(d) = tri.vertices.row(idx[static_cast<std::size_t>(k)]).transpose();
      }
      inverse.push_back(m.inverse());  // lambda = inverse * [1; x]
    }
    std::vector<Term> link{{block.y_var, 1.0}};
    for (int s = 0; s < tri.simplex_count(); ++s) {
      const auto& idx = tri.simplices[static_cast<std::size_t>(s)];
      Vector f(d + 1);
      for (int k = 0; k <= d; ++k) f[k] = tri.values[idx[static_cast<std::size_t>(k)]];
      const Vector affine = inverse[static_cast<std::size_t>(s)].transpose() * f;  // [c; g]
      link.push_back({sel[static_cast<std::size_t>(s)], -affine[0]});
      for (int j = 0; j < d; ++j) link.push_back({w[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)], -affine[j + 1]});
    }
    p.add_constraint(link, Relation::kGreaterEqual, 0.0, "link_y");
    add_select_one(sel);
    for (int s = 0; s < tri.simplex_count(); ++s) {
      const Matrix& inv = inverse[static_cast<std::size_t>(s)];
      for (int k = 0; k <= d; ++k) {
        // lambda_k(w, s) = inv(k,0) s + inv(k,1:) w >= 0
        std::vector<Term> row{{sel[static_cast<std::size_t>(s)], inv(k, 0)}};
        for (int j = 0; j < d; ++j) row.push_back({w[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)], inv(k, j + 1)});
        p.add_constraint(row, Relation::kGreaterEqual, 0.0,
                         "t" + std::to_string(s + 1) + "_f" + std::to_string(k + 1));
      }
    }
  }

  // z = 1 forbids the `down` set, z = 0 the `up` set.
  void add_branching(const std::vector<int>& lambda, const std::vector<bool>& up,
                     const std::vector<bool>& down, int index) {
    MilpProblem& p = block.problem;
    const int z = p.add_binary("z" + std::to_string(index));
    std::vector<Term> a, b;
    for (int v = 0; v < tri.vertex_count(); ++v) {
      if (up[static_cast<std::size_t>(v)]) a.push_back({lambda[static_cast<std::size_t>(v)], 1.0});
      if (down[static_cast<std::size_t>(v)]) b.push_back({lambda[static_cast<std::size_t>(v)], 1.0});
    }
    a.push_back({z, -1.0});
    b.push_back({z, 1.0});
    p.add_constraint(a, Relation::kLessEqual, 0.0, "z" + std::to_string(index) + "_up");
    p.add_constraint(b, Relation::kLessEqual, 1.0, "z" + std::to_string(index) + "_dn");
  }

  void logarithmic() {
    if (tri.scheme != TriangulationScheme::kDiagonal) {
      throw Error(ErrorCode::kFormulation, "Log needs the diagonal (J1) grid triangulation");
    }
    const int d = tri.input_dims();
    const std::vector<int> lambda = add_lambdas();
    add_lambda_links(lambda);
    const int k1 = d == 2 ? tri.segments[1] : 0;
    auto grid_coord = [&](int v, int j) {
      if (d == 1) return v;
      return j == 0 ? v / (k1 + 1) : v % (k1 + 1);
    };
    int index = 1;
    // Per input: a Gray code over its segments; breakpoint s touches
    // segments s - 1 and s.
    for (int j = 0; j < d; ++j) {
      const int k = tri.segments[static_cast<std::size_t>(j)];
      for (int bit = 0; bit < bit_count(k); ++bit) {
        std::vector<bool> up(static_cast<std::size_t>(tri.vertex_count())), down(up.size());
        for (int v = 0; v < tri.vertex_count(); ++v) {
          const int s = grid_coord(v, j);
          bool all_one = true, all_zero = true;
          for (int seg : {s - 1, s}) {
            if (seg < 0 || seg >= k) continue;
            const bool set = (((seg ^ (seg >> 1)) >> bit) & 1) != 0;
            all_one = all_one && set;
            all_zero = all_zero && !set;
          }
          up[static_cast<std::size_t>(v)] = all_one;
          down[static_cast<std::size_t>(v)] = all_zero;
        }
        add_branching(lambda, up, down, index++);
      }
    }
    if (d == 2) {
      // Within a cell the off-diagonal corners have mixed parity; one
      // binary picks which of the two may be used.
      std::vector<bool> even_odd(static_cast<std::size_t>(tri.vertex_count())), odd_even(even_odd.size());
      for (int v = 0; v < tri.vertex_count(); ++v) {
        const int i = grid_coord(v, 0);
        const int jj = grid_coord(v, 1);
        even_odd[static_cast<std::size_t>(v)] = i % 2 == 0 && jj % 2 == 1;
        odd_even[static_cast<std::size_t>(v)] = i % 2 == 1 && jj % 2 == 0;
      }
      add_branching(lambda, even_odd, odd_even, index);
    }
  }
};

}  // namespace

ModelBlock translate_simplex(const Triangulation& tri, SimplexFormulation formulation,
                             const BlockNames& names) {
  tri.validate();
  SimplexBuilder builder(tri, names);
  switch (formulation) {
    case SimplexFormulation::kCC: builder.convex_combination(); break;
    case SimplexFormulation::kMC: builder.multiple_choice(); break;
    case SimplexFormulation::kLog: builder.logarithmic(); break;
  }
  return std::move(builder.block);
}

void write_triangulation(std::ostream& out, const Triangulation& tri) {
  using detail::format_double;
  tri.validate();
  const int d = tri.input_dims();
  out << kHeader << " 1\n";
  out << "inputs " << d << '\n';
  out << "scheme " << to_string(tri.scheme) << '\n';
  out << "grid";
  for (int j = 0; j < d; ++j) out << ' ' << format_double(tri.lower[j]);
  for (int j = 0; j < d; ++j) out << ' ' << format_double(tri.upper[j]);
  for (int k : tri.segments) out << ' ' << k;
  out << '\n';
  out << "vertices " << tri.vertex_count() << '\n';
  for (int v = 0; v < tri.vertex_count(); ++v) {
    out << "vertex";
    for (int j = 0; j < d; ++j) out << ' ' << format_double(tri.vertices(v, j));
    out << ' ' << format_double(tri.values[v]) << '\n';
  }
  out << "simplices " << tri.simplex_count() << '\n';
  for (const auto& s : tri.simplices) {
    out << "simplex";
    for (int v : s) out << ' ' << v;
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed to write triangulation");
}

Triangulation read_triangulation(std::istream& in) {
  using detail::expect_keyword;
  using detail::parse_double;
  using detail::parse_int;
  detail::parse_version_header(in, kHeader);
  auto tokens = expect_keyword(in, "inputs");
  if (tokens.size() != 1) throw Error(ErrorCode::kParse, "malformed inputs line");
  const long long d = parse_int(tokens[0]);
  if (d < 1 || d > 2) throw Error(ErrorCode::kParse, "unsupported input count");
  tokens = expect_keyword(in, "scheme");
  if (tokens.size() != 1) throw Error(ErrorCode::kParse, "malformed scheme line");
  TriangulationScheme scheme;
  try {
    scheme = parse_scheme(tokens[0]);
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  tokens = expect_keyword(in, "grid");
  if (static_cast<long long>(tokens.size()) != 3 * d) throw Error(ErrorCode::kParse, "malformed grid line");
  Vector lower(d), upper(d);
  std::vector<int> segments;
  for (int j = 0; j < d; ++j) {
    lower[j] = parse_double(tokens[static_cast<std::size_t>(j)]);
    upper[j] = parse_double(tokens[static_cast<std::size_t>(d + j)]);
    const long long k = parse_int(tokens[static_cast<std::size_t>(2 * d + j)]);
    if (k < 1 || k > 1000000) throw Error(ErrorCode::kParse, "invalid segment count");
    segments.push_back(static_cast<int>(k));
  }
  Triangulation tri;
  try {
    tri = build_grid_triangulation(lower, upper, segments, scheme);
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  tokens = expect_keyword(in, "vertices");
  if (tokens.size() != 1 || parse_int(tokens[0]) != tri.vertex_count()) {
    throw Error(ErrorCode::kParse, "vertex count does not match the grid");
  }
  for (int v = 0; v < tri.vertex_count(); ++v) {
    tokens = expect_keyword(in, "vertex");
    if (static_cast<long long>(tokens.size()) != d + 1) throw Error(ErrorCode::kParse, "malformed vertex line");
    for (int j = 0; j < d; ++j) {
      if (parse_double(tokens[static_cast<std::size_t>(j)]) != tri.vertices(v, j)) {
        throw Error(ErrorCode::kParse, "vertex " + std::to_string(v) + " does not match the grid");
      }
    }
    tri.values[v] = parse_double(tokens[static_cast<std::size_t>(d)]);
    if (!std::isfinite(tri.values[v])) throw Error(ErrorCode::kParse, "vertex values must be finite");
  }
  tokens = expect_keyword(in, "simplices");
  if (tokens.size() != 1 || parse_int(tokens[0]) != tri.simplex_count()) {
    throw Error(ErrorCode::kParse, "simplex count does not match the grid");
  }
  for (int s = 0; s < tri.simplex_count(); ++s) {
    tokens = expect_keyword(in, "simplex");
    std::vector<int> idx;
    for (const auto& t : tokens) idx.push_back(static_cast<int>(parse_int(t)));
    if (idx != tri.simplices[static_cast<std::size_t>(s)]) {
      throw Error(ErrorCode::kParse, "simplex " + std::to_string(s) + " does not match the grid");
    }
  }
  return tri;
}

}  // namespace pwca
