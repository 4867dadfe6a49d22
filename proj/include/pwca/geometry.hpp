#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pwca {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Two basis-vector indices (first < second) spanning one basic rotation.
/// Indices are zero based: 0..n-2 address x_1..x_{n-1}, n-1 addresses y.
struct RotationPlane {
  int first = 0;
  int second = 1;

  friend bool operator==(const RotationPlane&, const RotationPlane&) = default;
};

/// All C(n,2) basic rotation planes in lexicographic order.
std::vector<RotationPlane> basic_rotation_planes(int n);

/// The C(n-1,2) planes among {x_2, ..., x_{n-1}, y}, lexicographic. These
/// rotate the basis without moving x_1 (the interface normal).
std::vector<RotationPlane> intersection_rotation_planes(int n);

/// n x n rotation by `angle` in `plane`. Right-multiplying a basis by it
/// maps column `first` to cos*first + sin*second.
Matrix basic_rotation(int n, RotationPlane plane, double angle);

struct Basis {
  Matrix vectors;  // columns x_1, ..., x_{n-1}, y
  Vector origin;

  static Basis identity(int n);
  int dimension() const { return static_cast<int>(vectors.cols()); }
};

/// Right-multiplies the basis vectors by the basic rotations in list order.
Basis rotate(const Basis& basis, std::span<const double> angles,
             std::span<const RotationPlane> planes);

/// Coefficient vector a = (a_0, a_1, ..., a_n) of the hyperplane
/// {p : a_0 + a_1 p_1 + ... + a_n p_n = 0}, p = (x_1, ..., x_{n-1}, y).
class Hyperplane {
 public:
  Hyperplane() = default;
  explicit Hyperplane(Vector coefs);

  const Vector& coefs() const { return coefs_; }
  double coef(int i) const { return coefs_[i]; }
  int dimension() const { return static_cast<int>(coefs_.size()) - 1; }
  double offset() const { return coefs_[0]; }
  double y_coef() const { return coefs_[coefs_.size() - 1]; }
  auto normal() const { return coefs_.tail(coefs_.size() - 1); }

  /// [1, point] . a for a point in n-space.
  double residual(const Eigen::Ref<const Vector>& point) const;

  friend bool operator==(const Hyperplane& a, const Hyperplane& b) {
    return a.coefs_ == b.coefs_;
  }

 private:
  Vector coefs_;
};

enum class PlaneRole {
  kModel,      // sign normalized so the y coefficient is positive
  kInterface,  // sign kept as produced by the construction
};

/// Model planes whose y coefficient magnitude falls below this are rejected
/// as vertical.
inline constexpr double kVerticalTolerance = 1e-12;

/// Plane through `origin` with normal `normal`, scaled so the normal part
/// has unit length.
Hyperplane plane_coefficients(const Vector& normal, const Vector& origin,
                              PlaneRole role = PlaneRole::kModel);

struct PairParams {
  std::vector<double> r2;  // C(n-1,2) angles
  double s2 = 0.0;
  double r3_minus = 0.0;
  double r3_plus = 0.0;

  friend bool operator==(const PairParams&, const PairParams&) = default;
};

/// Rotation angles (radians) and shift distances that generate a
/// piecewise-convex model.
struct RotationParams {
  std::vector<double> r1;  // C(n,2) angles
  double s1 = 0.0;
  std::vector<PairParams> pairs;

  static RotationParams zeros(int n, int pair_count);
  /// Throws kParameter when vector sizes do not match dimension n.
  void validate(int n) const;

  friend bool operator==(const RotationParams&, const RotationParams&) = default;
};

/// The (n-2)-dimensional set where a lower/upper pair meets, inside the
/// interface: origin + span * u.
struct IntersectionHyperline {
  Vector origin;
  Matrix span;  // n x (n-2)
};

struct PlaneSet {
  std::vector<Hyperplane> lower;
  std::vector<Hyperplane> upper;
  Hyperplane interface_plane;
  std::vector<IntersectionHyperline> hyperlines;
};

/// Builds the interface and one lower/upper plane pair per entry of
/// params.pairs from the rotation parameters (three transformations of the
/// identity basis; see README for the construction).
PlaneSet params_to_hyperplanes(const RotationParams& params, int n);

/// Basis after the interface transformation: rotated by r1 and shifted by
/// s1 along the rotated x_1.
Basis interface_basis(const RotationParams& params, int n);

/// Angles r1 (size C(n,2)) whose rotation maps x_1 onto normal/|normal|.
/// Only the planes (0, k) receive nonzero angles.
std::vector<double> interface_angles(const Vector& normal);

/// Angles r2 (size C(n-1,2)) such that rotating `basis` in the intersection
/// planes maps its y vector onto `direction` projected into the span of
/// x_2..x_{n-1}, y.
std::vector<double> intersection_angles(const Basis& basis,
                                        const Vector& direction);

}  // namespace pwca
