#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pwca/convex_fit.hpp"
#include "pwca/dataset.hpp"
#include "pwca/geometry.hpp"
#include "pwca/optimizer.hpp"

namespace pwca {

// Piecewise-convex approximation: one interface hyperplane splits the
// domain; below it y is the max of the lower planes, above it the max of
// the upper planes (min for concave models). Plane i of each side meets its
// partner on the interface, which makes the model continuous.

enum class Side { kLower, kUpper };

struct PwcaModel {
  std::vector<Hyperplane> lower;
  std::vector<Hyperplane> upper;
  Hyperplane interface_plane;
  /// Generator of the planes. For concave models the parameters describe
  /// the convex model of the negated data, and the planes are its mirror.
  RotationParams params;
  int dimension = 0;
  Orientation orientation = Orientation::kConvex;
  Domain domain;

  int plane_count() const { return 2 * static_cast<int>(lower.size()); }
  /// Throws kParameter / kVerticalPlane on malformed models.
  void validate() const;
};

/// Builds the planes from `params`; kDegenerateModel names the offending
/// pair when a model plane comes out vertical.
PwcaModel make_pwca_model(const RotationParams& params, int n,
                          Orientation orientation, const Domain& domain);

struct PwcaValue {
  double y = 0.0;
  Side side = Side::kLower;
};

/// Both candidates are computed. A candidate is consistent when its own
/// point (x, y) lies in its region: [1,x,y].a_ifc <= 0 for the lower side,
/// > 0 for the upper side. With exactly one consistent candidate it wins;
/// with two, the one closer to the interface; with none, the smaller
/// violation. Ties go to the lower side.
PwcaValue evaluate_pwca(const PwcaModel& model, const Eigen::Ref<const Vector>& x);

/// max (min) over one side's planes at x.
double side_value(const PwcaModel& model, Side side,
                  const Eigen::Ref<const Vector>& x);

double rmse(const PwcaModel& model, const Dataset& data);

struct PwcaFit {
  PwcaModel model;
  double rmse = 0.0;
  double penalty = 0.0;
  bool converged = false;
};

/// Nelder-Mead over the rotation parameters starting at `init`. Shifts are
/// scaled by the x-box diameter inside the search. The angle tilting the
/// interface normal toward y is held at its initial value, as are the r1
/// angles that only spin the interface's own sub-basis (the pair angles
/// already cover those). A nonzero `seed` perturbs the start slightly so
/// several seeds explore different basins; seed 0 starts exactly at init.
/// For concave orientation, `init` refers to the negated data.
PwcaFit fit_pwca(const Dataset& data, int n_hyp, const RotationParams& init,
                 Orientation orientation = Orientation::kConvex,
                 const OptimizerOptions& options = {}, std::uint64_t seed = 0);

/// Default band half-width as a fraction of the x-box diameter.
inline constexpr double kDefaultBandWidth = 0.1;

/// Starting values from an interface guess: points near the interface are
/// projected onto it, a convex model with n_hyp/2 pieces fitted there gives
/// the pair intersections, and the tilt angles are then optimized with all
/// other parameters fixed. `r1` has C(n,2) entries. Works on data as given
/// (use negated data for concave models).
RotationParams initial_guess(const Dataset& data, int n_hyp,
                             const std::vector<double>& r1, double s1,
                             double band_width = kDefaultBandWidth,
                             const OptimizerOptions& options = {});

/// Candidate interfaces (axis normals and the two main diagonals of the
/// x box, each at 25/50/75% across the box) are scored by a short fit from
/// their initial guess. Returns the start of the best candidate.
RotationParams default_interface_sweep(const Dataset& data, int n_hyp);

/// Parameters whose model equals `convex` on both sides of the interface
/// given by `interface` (only r1 and s1 are used). The model must be convex
/// and its planes must not be parallel to the interface.
RotationParams params_from_convex(const ConvexModel& convex,
                                  const RotationParams& interface, int n);

/// Copies pair `index` to the end; the model is unchanged, with one more
/// pair available to the optimizer.
RotationParams with_duplicated_pair(const RotationParams& params, int index);

/// Sweep start plus the start seeded from a convex fit with n_hyp/2 planes;
/// fits both and keeps the lower RMSE.
PwcaFit fit_pwca_default(const Dataset& data, int n_hyp,
                         Orientation orientation = Orientation::kConvex,
                         const OptimizerOptions& options = {},
                         std::uint64_t seed = 0);

void write_pwca_model(std::ostream& out, const PwcaModel& model);
PwcaModel read_pwca_model(std::istream& in);

}  // namespace pwca
