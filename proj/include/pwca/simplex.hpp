#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include "pwca/dataset.hpp"
#include "pwca/milp.hpp"

namespace pwca {

// Piecewise-linear interpolation on a triangulated grid, the usual
// baseline for piecewise-convex models.
//
// Grids cover a box in one or two inputs. With k_d segments per dimension
// the grid vertices come first, numbered row-major with the first input as
// the outer index; union-jack centers follow. Simplices are listed cell by
// cell in the same order.
//
//   diagonal    two triangles per cell, the diagonal alternating so that it
//               always joins the corners whose coordinates are both even or
//               both odd (the J1 triangulation). In one input, segments.
//   union-jack  four triangles per cell around an added center vertex.
//
// MILP sizes for a k x k diagonal grid, V = (k+1)^2 vertices, T = 2k^2:
//
//   CC   T binaries, V continuous, 5 + V - c rows (c = vertices shared by
//        every triangle, whose selection row is redundant: 2 for k = 1,
//        1 for k = 2, else 0)
//   MC   T binaries, 2T continuous, 4 + 3T rows
//   Log  2 ceil(log2 k) + 1 binaries, V continuous, 4 + 2 * binaries rows
//
// For k = 2 these are 8/9/13, 8/16/28 and 3/9/10.

enum class TriangulationScheme { kDiagonal, kUnionJack };
std::string_view to_string(TriangulationScheme s);
TriangulationScheme parse_scheme(std::string_view s);

struct Triangulation {
  TriangulationScheme scheme = TriangulationScheme::kDiagonal;
  Vector lower;               // x box
  Vector upper;
  std::vector<int> segments;  // per input
  Matrix vertices;            // one row per vertex
  Vector values;              // y at each vertex
  std::vector<std::vector<int>> simplices;

  int input_dims() const { return static_cast<int>(lower.size()); }
  int vertex_count() const { return static_cast<int>(vertices.rows()); }
  int simplex_count() const { return static_cast<int>(simplices.size()); }
  /// Throws kParameter on inconsistent sizes, degenerate simplices or
  /// non-finite values.
  void validate() const;
};

/// Values start at zero. Throws kInvalidDimension for more than two inputs
/// or union-jack in one input, kParameter for empty boxes or zero segments.
Triangulation build_grid_triangulation(const Vector& lower, const Vector& upper,
                                       const std::vector<int>& segments,
                                       TriangulationScheme scheme = TriangulationScheme::kDiagonal);

enum class VertexFit {
  kInterpolate,   // local linear fit of the samples nearest to each vertex
  kLeastSquares,  // minimum SSE of the interpolant over all samples
};

/// kExtrapolation when a vertex lies outside the samples' x box
/// (interpolate) or a sample lies outside the grid; kUnderdetermined when
/// some vertex has no sample in its simplices (least squares).
Triangulation fit_vertex_values(const Triangulation& tri, const Dataset& data, VertexFit mode);

/// Barycentric interpolation in the simplex containing x; kDomain outside
/// the box (1e-12 relative slack).
double evaluate_simplex(const Triangulation& tri, const Eigen::Ref<const Vector>& x);

double rmse(const Triangulation& tri, const Dataset& data);

enum class SimplexFormulation { kCC, kMC, kLog };
std::string_view to_string(SimplexFormulation f);
SimplexFormulation parse_formulation(std::string_view s);

/// Rows tie y to the interpolant from above (y >= sum lambda_v f_v), the
/// epigraph form used for minimization like the piecewise-convex block.
/// Log requires a diagonal grid (kFormulation otherwise).
ModelBlock translate_simplex(const Triangulation& tri, SimplexFormulation formulation,
                             const BlockNames& names = {});

void write_triangulation(std::ostream& out, const Triangulation& tri);
Triangulation read_triangulation(std::istream& in);

}  // namespace pwca
