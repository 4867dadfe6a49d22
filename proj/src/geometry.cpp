#include "pwca/geometry.hpp"

#include <cmath>
#include <string>

#include "pwca/error.hpp"

namespace pwca {

namespace {

void require_dimension(int n) {
  if (n < 2) {
    throw Error(ErrorCode::kInvalidDimension,
                "dimension must be at least 2, got " + std::to_string(n));
  }
}

// Hyperspherical inverse. Finds angles t_1..t_m for which
//   coords = sign * (c_m...c_1, ..., s_k c_m...c_{k+1}, ..., s_m)
// with coords[0] the "carrier" axis and coords[k] the axis rotated in at
// step k. Returns t_1..t_m in carrier-to-outer order.
std::vector<double> spherical_angles(const std::vector<double>& coords,
                                     double sign) {
  const int m = static_cast<int>(coords.size()) - 1;
  std::vector<double> angles(m, 0.0);
  double rest = 0.0;
  for (int k = m; k >= 1; --k) {
    if (k == 1) {
      angles[0] = std::atan2(sign * coords[1], coords[0]);
      break;
    }
    rest = 0.0;
    for (int i = 0; i < k; ++i) rest += coords[i] * coords[i];
    angles[k - 1] = std::atan2(sign * coords[k], std::sqrt(rest));
  }
  return angles;
}

}  // namespace

std::vector<RotationPlane> basic_rotation_planes(int n) {
  require_dimension(n);
  std::vector<RotationPlane> planes;
  planes.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) planes.push_back({j, k});
  }
  return planes;
}

std::vector<RotationPlane> intersection_rotation_planes(int n) {
  require_dimension(n);
  std::vector<RotationPlane> planes;
  for (int j = 1; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) planes.push_back({j, k});
  }
  return planes;
}

Matrix basic_rotation(int n, RotationPlane plane, double angle) {
  if (plane.first < 0 || plane.second >= n || plane.first >= plane.second) {
    throw Error(ErrorCode::kParameter, "invalid rotation plane");
  }
  Matrix r = Matrix::Identity(n, n);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  r(plane.first, plane.first) = c;
  r(plane.second, plane.second) = c;
  r(plane.first, plane.second) = -s;
  r(plane.second, plane.first) = s;
  return r;
}

Basis Basis::identity(int n) {
  require_dimension(n);
  return Basis{Matrix::Identity(n, n), Vector::Zero(n)};
}

Basis rotate(const Basis& basis, std::span<const double> angles,
             std::span<const RotationPlane> planes) {
  if (angles.size() != planes.size()) {
    throw Error(ErrorCode::kParameter,
                "rotate: " + std::to_string(angles.size()) + " angles for " +
                    std::to_string(planes.size()) + " planes");
  }
  const int n = basis.dimension();
  Basis out = basis;
  // Right-multiplying by a basic rotation only mixes two columns.
  for (std::size_t i = 0; i < planes.size(); ++i) {
    const RotationPlane p = planes[i];
    if (p.first < 0 || p.second >= n || p.first >= p.second) {
      throw Error(ErrorCode::kParameter, "invalid rotation plane");
    }
    const double c = std::cos(angles[i]);
    const double s = std::sin(angles[i]);
    const Vector a = out.vectors.col(p.first);
    const Vector b = out.vectors.col(p.second);
    out.vectors.col(p.first) = c * a + s * b;
    out.vectors.col(p.second) = c * b - s * a;
  }
  return out;
}

Hyperplane::Hyperplane(Vector coefs) : coefs_(std::move(coefs)) {
  if (coefs_.size() < 3) {
    throw Error(ErrorCode::kInvalidDimension,
                "hyperplane needs at least 3 coefficients");
  }
}

double Hyperplane::residual(const Eigen::Ref<const Vector>& point) const {
  return coefs_[0] + normal().dot(point);
}

Hyperplane plane_coefficients(const Vector& normal, const Vector& origin,
                              PlaneRole role) {
  const double norm = normal.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::kDegeneratePlane, "plane normal is zero");
  }
  const int n = static_cast<int>(normal.size());
  Vector a(n + 1);
  a[0] = -origin.dot(normal);
  a.tail(n) = normal;
  a /= norm;
  if (role == PlaneRole::kModel) {
    if (std::abs(a[n]) <= kVerticalTolerance) {
      throw Error(ErrorCode::kDegeneratePlane,
                  "model plane is vertical (y coefficient is zero)");
    }
    if (a[n] < 0.0) a = -a;
  }
  return Hyperplane(std::move(a));
}

RotationParams RotationParams::zeros(int n, int pair_count) {
  require_dimension(n);
  RotationParams p;
  p.r1.assign(static_cast<std::size_t>(n * (n - 1) / 2), 0.0);
  p.pairs.resize(static_cast<std::size_t>(pair_count));
  for (auto& pair : p.pairs) {
    pair.r2.assign(static_cast<std::size_t>((n - 1) * (n - 2) / 2), 0.0);
  }
  return p;
}

void RotationParams::validate(int n) const {
  require_dimension(n);
  const auto r1_size = static_cast<std::size_t>(n * (n - 1) / 2);
  const auto r2_size = static_cast<std::size_t>((n - 1) * (n - 2) / 2);
  if (r1.size() != r1_size) {
    throw Error(ErrorCode::kParameter,
                "r1 has " + std::to_string(r1.size()) + " angles, expected " +
                    std::to_string(r1_size));
  }
  if (pairs.empty()) {
    throw Error(ErrorCode::kParameter, "at least one plane pair is required");
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].r2.size() != r2_size) {
      throw Error(ErrorCode::kParameter,
                  "pair " + std::to_string(i) + " has " +
                      std::to_string(pairs[i].r2.size()) +
                      " r2 angles, expected " + std::to_string(r2_size));
    }
  }
}

Basis interface_basis(const RotationParams& params, int n) {
  params.validate(n);
  const auto planes = basic_rotation_planes(n);
  Basis b = rotate(Basis::identity(n), params.r1, planes);
  b.origin += b.vectors.col(0) * params.s1;
  return b;
}

PlaneSet params_to_hyperplanes(const RotationParams& params, int n) {
  const Basis base = interface_basis(params, n);
  PlaneSet out;
  out.interface_plane =
      plane_coefficients(base.vectors.col(0), base.origin, PlaneRole::kInterface);

  const auto pair_planes = intersection_rotation_planes(n);
  const RotationPlane tilt{0, n - 1};
  const int y = n - 1;
  out.lower.reserve(params.pairs.size());
  out.upper.reserve(params.pairs.size());
  out.hyperlines.reserve(params.pairs.size());
  for (std::size_t i = 0; i < params.pairs.size(); ++i) {
    const PairParams& pp = params.pairs[i];
    Basis bi = rotate(base, pp.r2, pair_planes);
    bi.origin = base.origin + bi.vectors.col(y) * pp.s2;

    IntersectionHyperline line{bi.origin, bi.vectors.middleCols(1, n - 2)};

    const double minus[] = {pp.r3_minus};
    const double plus[] = {pp.r3_plus};
    const std::span<const RotationPlane> tilt_span(&tilt, 1);
    try {
      const Basis lo = rotate(bi, minus, tilt_span);
      out.lower.push_back(plane_coefficients(lo.vectors.col(y), bi.origin));
      const Basis up = rotate(bi, plus, tilt_span);
      out.upper.push_back(plane_coefficients(up.vectors.col(y), bi.origin));
    } catch (const Error& e) {
      throw Error(e.code(),
                  std::string(e.what()) + " (pair " + std::to_string(i) + ")");
    }
    out.hyperlines.push_back(std::move(line));
  }
  return out;
}

std::vector<double> interface_angles(const Vector& normal) {
  const int n = static_cast<int>(normal.size());
  require_dimension(n);
  const double norm = normal.norm();
  if (!(norm > 0.0)) {
    throw Error(ErrorCode::kDegeneratePlane, "interface normal is zero");
  }
  std::vector<double> coords(normal.data(), normal.data() + n);
  for (double& c : coords) c /= norm;
  // Column 0 after R(0,1)...R(0,n-1) is
  //   (c_{n-1}..c_1, c_{n-1}..c_2 s_1, ..., s_{n-1}).
  const std::vector<double> t = spherical_angles(coords, 1.0);
  std::vector<double> r1(static_cast<std::size_t>(n * (n - 1) / 2), 0.0);
  // Planes (0, k) occupy the first n-1 slots of the lexicographic list.
  for (int k = 1; k < n; ++k) r1[static_cast<std::size_t>(k - 1)] = t[k - 1];
  return r1;
}

std::vector<double> intersection_angles(const Basis& basis,
                                        const Vector& direction) {
  const int n = basis.dimension();
  require_dimension(n);
  std::vector<double> r2(static_cast<std::size_t>((n - 1) * (n - 2) / 2), 0.0);
  if (n == 2) return r2;

  // Coordinates of the direction in the sub-basis x_2..x_{n-1}, y. The y
  // vector plays the carrier role; rotating in (j, y) moves it toward -x_j.
  const Vector c = basis.vectors.transpose() * direction;
  std::vector<double> coords;
  coords.reserve(static_cast<std::size_t>(n - 1));
  coords.push_back(c[n - 1]);
  for (int j = 1; j < n - 1; ++j) coords.push_back(c[j]);
  const std::vector<double> t = spherical_angles(coords, -1.0);

  // Lexicographic position of plane (j, n-1) among planes over 1..n-1.
  const auto planes = intersection_rotation_planes(n);
  for (std::size_t p = 0; p < planes.size(); ++p) {
    if (planes[p].second == n - 1) {
      r2[p] = t[static_cast<std::size_t>(planes[p].first - 1)];
    }
  }
  return r2;
}

}  // namespace pwca
