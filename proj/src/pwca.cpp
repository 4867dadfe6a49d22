#include "pwca/pwca.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <string>

#include "fit_common.hpp"
#include "model_io.hpp"
#include "pwca/error.hpp"
#include "text_io.hpp"

namespace pwca {

namespace {

constexpr std::string_view kPwcaHeader = "pwca-piecewise-model";
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPerturbation = 0.05;

Hyperplane mirror_model_plane(const Hyperplane& h) {
  Vector a = h.coefs();
  a.head(a.size() - 1) *= -1.0;
  return Hyperplane(std::move(a));
}

// Keeps "lower" meaning residual <= 0 after reflecting y.
Hyperplane mirror_interface(const Hyperplane& h) {
  Vector a = h.coefs();
  a[a.size() - 1] *= -1.0;
  return Hyperplane(std::move(a));
}

// Planes in slope form y = c0 + sum c_j x_j for fast evaluation.
class CompiledModel {
 public:
  CompiledModel(const std::vector<Hyperplane>& lower,
                const std::vector<Hyperplane>& upper, const Hyperplane& ifc,
                bool concave)
      : d_(ifc.dimension() - 1),
        pairs_(static_cast<int>(lower.size())),
        concave_(concave),
        ifc_(ifc.coefs()) {
    slopes_.reserve(static_cast<std::size_t>(2 * pairs_ * (d_ + 1)));
    for (const auto* family : {&lower, &upper}) {
      for (const auto& h : *family) {
        const double an = h.y_coef();
        slopes_.push_back(-h.offset() / an);
        for (int j = 0; j < d_; ++j) slopes_.push_back(-h.coef(j + 1) / an);
      }
    }
  }

  double side(int family, const double* x) const {
    const double* c = slopes_.data() + static_cast<std::ptrdiff_t>(family) * pairs_ * (d_ + 1);
    double best = concave_ ? kInf : -kInf;
    for (int i = 0; i < pairs_; ++i, c += d_ + 1) {
      double y = c[0];
      for (int j = 0; j < d_; ++j) y += c[j + 1] * x[j];
      best = concave_ ? std::min(best, y) : std::max(best, y);
    }
    return best;
  }

  PwcaValue evaluate(const double* x) const {
    const double yl = side(0, x);
    const double yu = side(1, x);
    double g0 = ifc_[0];
    for (int j = 0; j < d_; ++j) g0 += ifc_[j + 1] * x[j];
    const double an = ifc_[d_ + 1];
    const double gl = g0 + an * yl;
    const double gu = g0 + an * yu;
    const bool lower_ok = gl <= 0.0;
    const bool upper_ok = gu > 0.0;
    bool pick_upper;
    if (lower_ok != upper_ok) {
      pick_upper = upper_ok;
    } else if (lower_ok) {
      pick_upper = std::abs(gu) < std::abs(gl);
    } else {
      pick_upper = -gu < gl;
    }
    return pick_upper ? PwcaValue{yu, Side::kUpper} : PwcaValue{yl, Side::kLower};
  }

 private:
  int d_;
  int pairs_;
  bool concave_;
  Vector ifc_;
  std::vector<double> slopes_;
};

CompiledModel compile(const PwcaModel& m) {
  return CompiledModel(m.lower, m.upper, m.interface_plane,
                       m.orientation == Orientation::kConcave);
}

int choose2(int n) { return n * (n - 1) / 2; }

// Flat layout of all rotation parameters, with shifts divided by the
// domain diameter: r1 | s1 | per pair (r2 | s2 | r3- | r3+).
class ParamLayout {
 public:
  ParamLayout(int n, int pairs, double scale)
      : n_(n), pairs_(pairs), r1_(choose2(n)), r2_(choose2(n - 1)), scale_(scale) {}

  int size() const { return r1_ + 1 + pairs_ * pair_stride(); }
  int s1_slot() const { return r1_; }
  int pair_base(int i) const { return r1_ + 1 + i * pair_stride(); }
  int s2_slot(int i) const { return pair_base(i) + r2_; }
  int r3_minus_slot(int i) const { return s2_slot(i) + 1; }
  int r3_plus_slot(int i) const { return s2_slot(i) + 2; }

  Vector pack(const RotationParams& p) const {
    Vector v(size());
    for (int k = 0; k < r1_; ++k) v[k] = p.r1[static_cast<std::size_t>(k)];
    v[s1_slot()] = p.s1 / scale_;
    for (int i = 0; i < pairs_; ++i) {
      const auto& pp = p.pairs[static_cast<std::size_t>(i)];
      for (int k = 0; k < r2_; ++k) v[pair_base(i) + k] = pp.r2[static_cast<std::size_t>(k)];
      v[s2_slot(i)] = pp.s2 / scale_;
      v[r3_minus_slot(i)] = pp.r3_minus;
      v[r3_plus_slot(i)] = pp.r3_plus;
    }
    return v;
  }

  RotationParams unpack(const Vector& v) const {
    RotationParams p = RotationParams::zeros(n_, pairs_);
    for (int k = 0; k < r1_; ++k) p.r1[static_cast<std::size_t>(k)] = v[k];
    p.s1 = v[s1_slot()] * scale_;
    for (int i = 0; i < pairs_; ++i) {
      auto& pp = p.pairs[static_cast<std::size_t>(i)];
      for (int k = 0; k < r2_; ++k) pp.r2[static_cast<std::size_t>(k)] = v[pair_base(i) + k];
      pp.s2 = v[s2_slot(i)] * scale_;
      pp.r3_minus = v[r3_minus_slot(i)];
      pp.r3_plus = v[r3_plus_slot(i)];
    }
    return p;
  }

  /// Slots searched in a full fit: the r1 angles in planes (x_1, x_k) for
  /// k < n-1, s1, and every pair parameter.
  std::vector<int> full_fit_slots() const {
    std::vector<int> slots;
    for (int k = 0; k + 2 < n_; ++k) slots.push_back(k);
    slots.push_back(s1_slot());
    for (int i = 0; i < pairs_; ++i) {
      for (int s = pair_base(i); s < pair_base(i) + pair_stride(); ++s) slots.push_back(s);
    }
    return slots;
  }

  std::vector<int> tilt_slots() const {
    std::vector<int> slots;
    for (int i = 0; i < pairs_; ++i) {
      slots.push_back(r3_minus_slot(i));
      slots.push_back(r3_plus_slot(i));
    }
    return slots;
  }

 private:
  int pair_stride() const { return r2_ + 3; }

  int n_;
  int pairs_;
  int r1_;
  int r2_;
  double scale_;
};

// SSE plus corner penalty of the convex-orientation model generated by a
// subset of the parameters; the others stay at `base`.
class PwcaObjective {
 public:
  PwcaObjective(const Dataset& data, int pairs, const RotationParams& base,
                std::vector<int> slots)
      : n_(data.dimension()),
        layout_(n_, pairs, std::max(data.domain().diameter(), 1e-300)),
        base_(layout_.pack(base)),
        slots_(std::move(slots)),
        count_(data.size()),
        y_top_(data.domain().y_max) {
    const int d = n_ - 1;
    x_.resize(static_cast<std::size_t>(count_) * d);
    for (int m = 0; m < count_; ++m) {
      for (int j = 0; j < d; ++j) x_[static_cast<std::size_t>(m) * d + j] = data.x()(m, j);
    }
    y_.assign(data.y().data(), data.y().data() + count_);
    corners_ = detail::box_corners(data.domain().x_lower, data.domain().x_upper);
  }

  Vector start() const {
    Vector v(static_cast<Eigen::Index>(slots_.size()));
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      v[static_cast<Eigen::Index>(i)] = base_[slots_[i]];
    }
    return v;
  }

  RotationParams params(const Vector& v) const {
    Vector full = base_;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      full[slots_[i]] = v[static_cast<Eigen::Index>(i)];
    }
    return layout_.unpack(full);
  }

  struct Terms {
    double sse = kInf;
    double penalty = kInf;
  };

  Terms terms(const Vector& v) const {
    PlaneSet set;
    try {
      set = params_to_hyperplanes(params(v), n_);
    } catch (const Error&) {
      return {};
    }
    const CompiledModel model(set.lower, set.upper, set.interface_plane, false);
    const int d = n_ - 1;
    Terms t{0.0, 0.0};
    for (int m = 0; m < count_; ++m) {
      const double r = model.evaluate(x_.data() + static_cast<std::size_t>(m) * d).y -
                       y_[static_cast<std::size_t>(m)];
      t.sse += r * r;
    }
    for (const auto* family : {&set.lower, &set.upper}) {
      for (const auto& h : *family) {
        double closest = kInf;
        for (const auto& c : corners_) {
          const double gap = std::max(0.0, y_top_ - plane_value(h, c));
          closest = std::min(closest, gap * gap);
        }
        t.penalty += closest;
      }
    }
    t.penalty *= detail::kPenaltyWeight;
    return t;
  }

  double operator()(const Vector& v) const {
    const Terms t = terms(v);
    return t.sse + t.penalty;
  }

  const ParamLayout& layout() const { return layout_; }

 private:
  int n_;
  ParamLayout layout_;
  Vector base_;
  std::vector<int> slots_;
  int count_;
  double y_top_;
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<Vector> corners_;
};

void check_plane_count(int n_hyp) {
  if (n_hyp < 2 || n_hyp % 2 != 0) {
    throw Error(ErrorCode::kParameter,
                "piecewise-convex models need an even plane count >= 2, got " +
                    std::to_string(n_hyp));
  }
}

// Penalty weight is relative to the squared y range, like the convex fit.
double penalty_scale(const Dataset& data) {
  const double yr = data.domain().y_range();
  return yr > 0.0 ? yr * yr : 1.0;
}

struct RawFit {
  RotationParams params;
  bool converged = false;
};

// Fit on data already in convex orientation.
RawFit fit_convex_side(const Dataset& data, const RotationParams& init,
                       const OptimizerOptions& options, std::uint64_t seed) {
  const int pairs = static_cast<int>(init.pairs.size());
  PwcaObjective objective(data, pairs, init,
                          ParamLayout(data.dimension(), pairs, 1.0).full_fit_slots());
  Vector start = objective.start();
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    for (int i = 0; i < start.size(); ++i) {
      start[i] += detail::uniform(rng, -kPerturbation, kPerturbation);
    }
    if (!std::isfinite(objective(start))) start = objective.start();
  }
  const double scale = penalty_scale(data);
  const auto scaled = [&](const Vector& v) { return objective(v) / scale; };
  const MinimizeResult r = minimize(scaled, start, options);
  return {objective.params(r.x), r.converged};
}

OptimizerOptions short_options(const OptimizerOptions& base, int params) {
  OptimizerOptions o = base;
  o.max_iterations = 40 * params;
  o.restarts = 1;
  return o;
}

}  // namespace

void PwcaModel::validate() const {
  if (lower.empty() || lower.size() != upper.size()) {
    throw Error(ErrorCode::kParameter, "model needs matching lower/upper plane lists");
  }
  if (interface_plane.dimension() != dimension) {
    throw Error(ErrorCode::kInvalidDimension, "interface dimension mismatch");
  }
  for (const auto* family : {&lower, &upper}) {
    for (const auto& h : *family) {
      if (h.dimension() != dimension) {
        throw Error(ErrorCode::kInvalidDimension, "plane dimension mismatch");
      }
      if (!(h.y_coef() > 0.0)) {
        throw Error(ErrorCode::kVerticalPlane, "model planes need a positive y coefficient");
      }
    }
  }
}

PwcaModel make_pwca_model(const RotationParams& params, int n,
                          Orientation orientation, const Domain& domain) {
  PlaneSet set;
  try {
    set = params_to_hyperplanes(params, n);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDegeneratePlane) {
      throw Error(ErrorCode::kDegenerateModel, e.what());
    }
    throw;
  }
  PwcaModel m;
  m.params = params;
  m.dimension = n;
  m.orientation = orientation;
  m.domain = domain;
  if (orientation == Orientation::kConvex) {
    m.lower = std::move(set.lower);
    m.upper = std::move(set.upper);
    m.interface_plane = std::move(set.interface_plane);
  } else {
    for (const auto& h : set.lower) m.lower.push_back(mirror_model_plane(h));
    for (const auto& h : set.upper) m.upper.push_back(mirror_model_plane(h));
    m.interface_plane = mirror_interface(set.interface_plane);
  }
  return m;
}

PwcaValue evaluate_pwca(const PwcaModel& model, const Eigen::Ref<const Vector>& x) {
  if (x.size() != model.dimension - 1) {
    throw Error(ErrorCode::kInvalidDimension, "point dimension does not match model");
  }
  const Vector copy = x;
  return compile(model).evaluate(copy.data());
}

double side_value(const PwcaModel& model, Side side, const Eigen::Ref<const Vector>& x) {
  const auto& family = side == Side::kLower ? model.lower : model.upper;
  const bool convex = model.orientation == Orientation::kConvex;
  double best = convex ? -kInf : kInf;
  for (const auto& h : family) {
    const double y = plane_value(h, x);
    best = convex ? std::max(best, y) : std::min(best, y);
  }
  return best;
}

double rmse(const PwcaModel& model, const Dataset& data) {
  const CompiledModel c = compile(model);
  double sse = 0.0;
  Vector x(data.input_dims());
  for (int m = 0; m < data.size(); ++m) {
    x = data.point(m);
    const double r = c.evaluate(x.data()).y - data.y()[m];
    sse += r * r;
  }
  return std::sqrt(sse / data.size());
}

PwcaFit fit_pwca(const Dataset& data, int n_hyp, const RotationParams& init,
                 Orientation orientation, const OptimizerOptions& options,
                 std::uint64_t seed) {
  check_plane_count(n_hyp);
  options.validate();
  const int n = data.dimension();
  init.validate(n);
  if (static_cast<int>(init.pairs.size()) * 2 != n_hyp) {
    throw Error(ErrorCode::kParameter, "initial parameters have " +
                                           std::to_string(init.pairs.size()) +
                                           " pairs for " + std::to_string(n_hyp) + " planes");
  }
  const bool concave = orientation == Orientation::kConcave;
  const Dataset work = concave ? data.negated() : data;
  // Surfaces a vertical plane in the start as a model error with its pair.
  make_pwca_model(init, n, Orientation::kConvex, work.domain());

  const RawFit raw = fit_convex_side(work, init, options, seed);
  PwcaFit fit;
  fit.model = make_pwca_model(raw.params, n, orientation, data.domain());
  fit.converged = raw.converged;
  fit.rmse = rmse(fit.model, data);
  const PwcaObjective probe(work, n_hyp / 2, raw.params, {});
  fit.penalty = probe.terms(Vector()).penalty;
  return fit;
}

RotationParams initial_guess(const Dataset& data, int n_hyp,
                             const std::vector<double>& r1, double s1,
                             double band_width, const OptimizerOptions& options) {
  check_plane_count(n_hyp);
  const int n = data.dimension();
  const int pairs = n_hyp / 2;
  if (!(band_width > 0.0)) {
    throw Error(ErrorCode::kParameter, "band width must be positive");
  }
  RotationParams params = RotationParams::zeros(n, pairs);
  params.r1 = r1;
  params.s1 = s1;
  params.validate(n);

  const Basis base = interface_basis(params, n);
  const Hyperplane ifc =
      plane_coefficients(base.vectors.col(0), base.origin, PlaneRole::kInterface);
  const double band = band_width * data.domain().diameter();

  // Projected points in interface coordinates (u_1..u_{n-2}, w) plus their
  // signed distance to the interface.
  std::vector<Vector> local;
  std::vector<double> dist;
  Vector p(n);
  for (int m = 0; m < data.size(); ++m) {
    p.head(n - 1) = data.point(m);
    p[n - 1] = data.y()[m];
    const double r = ifc.residual(p);
    if (std::abs(r) > band) continue;
    const Vector rel = p - r * ifc.normal() - base.origin;
    local.push_back(base.vectors.rightCols(n - 1).transpose() * rel);
    dist.push_back(r);
  }
  const int needed = pairs * n;
  if (static_cast<int>(local.size()) < needed) {
    throw Error(ErrorCode::kBandTooNarrow,
                "band holds " + std::to_string(local.size()) + " points, need " +
                    std::to_string(needed));
  }

  // A point off the interface carries the function's slope times its
  // distance. Remove a linear trend per side so the projected values
  // estimate the trace on the interface itself.
  {
    const auto rows = static_cast<Eigen::Index>(local.size());
    Matrix a(rows, n + 1);
    Vector b(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double r = dist[static_cast<std::size_t>(i)];
      a(i, 0) = 1.0;
      a.block(i, 1, 1, n - 2) = local[static_cast<std::size_t>(i)].head(n - 2).transpose();
      a(i, n - 1) = std::min(r, 0.0);
      a(i, n) = std::max(r, 0.0);
      b[i] = local[static_cast<std::size_t>(i)][n - 2];
    }
    const Vector coef = a.completeOrthogonalDecomposition().solve(b);
    for (std::size_t i = 0; i < local.size(); ++i) {
      local[i][n - 2] -= coef[n - 1] * std::min(dist[i], 0.0) + coef[n] * std::max(dist[i], 0.0);
    }
  }

  if (n == 2) {
    double mean = 0.0;
    for (const auto& l : local) mean += l[0];
    mean /= static_cast<double>(local.size());
    for (auto& pp : params.pairs) pp.s2 = mean;
  } else {
    Matrix u(static_cast<Eigen::Index>(local.size()), n - 2);
    Vector w(static_cast<Eigen::Index>(local.size()));
    for (std::size_t i = 0; i < local.size(); ++i) {
      u.row(static_cast<Eigen::Index>(i)) = local[i].head(n - 2).transpose();
      w[static_cast<Eigen::Index>(i)] = local[i][n - 2];
    }
    ConvexModel trace;
    try {
      trace = fit_convex(Dataset(std::move(u), std::move(w)), pairs,
                         Orientation::kConvex, options)
                  .model;
    } catch (const Error& e) {
      throw Error(ErrorCode::kBandTooNarrow,
                  std::string("points in the band do not support a fit: ") + e.what());
    }
    for (int i = 0; i < pairs; ++i) {
      const Hyperplane& h = trace.planes[static_cast<std::size_t>(i)];
      // Piece w = c0 + c.u; its normal inside the interface is (-c, 1).
      const double an = h.y_coef();
      Vector dir = base.vectors.col(n - 1);
      for (int j = 0; j < n - 2; ++j) dir += (h.coef(j + 1) / an) * base.vectors.col(j + 1);
      const double norm = dir.norm();
      auto& pp = params.pairs[static_cast<std::size_t>(i)];
      pp.r2 = intersection_angles(base, dir / norm);
      pp.s2 = (-h.offset() / an) / norm;
    }
  }

  PwcaObjective objective(data, pairs, params,
                          ParamLayout(n, pairs, 1.0).tilt_slots());
  const double scale = penalty_scale(data);
  const auto scaled = [&](const Vector& v) { return objective(v) / scale; };
  const MinimizeResult r = minimize(scaled, objective.start(), options);
  return objective.params(r.x);
}

RotationParams default_interface_sweep(const Dataset& data, int n_hyp) {
  check_plane_count(n_hyp);
  const int n = data.dimension();
  const int d = n - 1;
  const Domain& dom = data.domain();
  const Vector width = dom.x_upper - dom.x_lower;

  std::vector<Vector> normals;
  const auto add = [&](Vector v) {
    v.normalize();
    for (const auto& u : normals) {
      if (std::abs(std::abs(u.dot(v)) - 1.0) < 1e-12) return;
    }
    normals.push_back(std::move(v));
  };
  for (int j = 0; j < d; ++j) add(Vector::Unit(d, j));
  Vector diag = width.cwiseInverse();
  add(diag);
  if (d > 1) {
    diag[1] = -diag[1];
    add(diag);
  }

  const auto corners = detail::box_corners(dom.x_lower, dom.x_upper);
  const OptimizerOptions guess_options = short_options({}, 2 * (n_hyp / 2));
  double best_rmse = kInf;
  RotationParams best;
  bool found = false;
  for (const auto& nu : normals) {
    double lo = kInf;
    double hi = -kInf;
    for (const auto& c : corners) {
      lo = std::min(lo, nu.dot(c));
      hi = std::max(hi, nu.dot(c));
    }
    Vector full = Vector::Zero(n);
    full.head(d) = nu;
    const std::vector<double> r1 = interface_angles(full);
    for (double f : {0.25, 0.5, 0.75}) {
      RotationParams start;
      try {
        start = initial_guess(data, n_hyp, r1, lo + f * (hi - lo), kDefaultBandWidth,
                              guess_options);
      } catch (const Error&) {
        continue;
      }
      const int free = static_cast<int>(
          ParamLayout(n, n_hyp / 2, 1.0).full_fit_slots().size());
      const RawFit raw = fit_convex_side(data, start, short_options({}, free), 0);
      const double e = rmse(make_pwca_model(raw.params, n, Orientation::kConvex, dom), data);
      if (e < best_rmse) {
        best_rmse = e;
        best = raw.params;
        found = true;
      }
    }
  }
  if (!found) {
    // Horizontal planes at the mean with the interface through the centre.
    best = RotationParams::zeros(n, n_hyp / 2);
    best.s1 = 0.5 * (dom.x_lower[0] + dom.x_upper[0]);
    const double mean = data.y().mean();
    for (auto& pp : best.pairs) pp.s2 = mean;
  }
  return best;
}

RotationParams params_from_convex(const ConvexModel& convex,
                                  const RotationParams& interface, int n) {
  if (convex.orientation != Orientation::kConvex) {
    throw Error(ErrorCode::kParameter, "seeding expects a convex model");
  }
  RotationParams out = RotationParams::zeros(n, static_cast<int>(convex.planes.size()));
  out.r1 = interface.r1;
  out.s1 = interface.s1;
  const Basis base = interface_basis(out, n);
  const Vector e = base.vectors.col(0);
  for (std::size_t i = 0; i < convex.planes.size(); ++i) {
    const Hyperplane& h = convex.planes[i];
    const Vector nu = h.normal();
    // Normal = cos(r3) y_i - sin(r3) e with y_i inside the interface.
    const double alpha = nu.dot(e);
    const Vector proj = nu - alpha * e;
    const double beta = proj.norm();
    if (!(beta > 1e-12)) {
      throw Error(ErrorCode::kDegeneratePlane,
                  "plane " + std::to_string(i) + " is parallel to the interface");
    }
    const Vector dir = proj / beta;
    auto& pp = out.pairs[i];
    pp.r2 = intersection_angles(base, dir);
    pp.s2 = (-h.offset() - nu.dot(base.origin)) / beta;
    pp.r3_minus = pp.r3_plus = std::atan2(-alpha, beta);
  }
  return out;
}

RotationParams with_duplicated_pair(const RotationParams& params, int index) {
  if (index < 0 || index >= static_cast<int>(params.pairs.size())) {
    throw Error(ErrorCode::kParameter, "pair index out of range");
  }
  RotationParams out = params;
  out.pairs.push_back(params.pairs[static_cast<std::size_t>(index)]);
  return out;
}

PwcaFit fit_pwca_default(const Dataset& data, int n_hyp, Orientation orientation,
                         const OptimizerOptions& options, std::uint64_t seed) {
  check_plane_count(n_hyp);
  const int n = data.dimension();
  const bool concave = orientation == Orientation::kConcave;
  const Dataset work = concave ? data.negated() : data;

  const RotationParams swept = default_interface_sweep(work, n_hyp);
  PwcaFit best = fit_pwca(data, n_hyp, swept, orientation, options, seed);

  try {
    const ConvexFit convex =
        fit_convex(work, n_hyp / 2, Orientation::kConvex, options, seed);
    const RotationParams seeded = params_from_convex(convex.model, best.model.params, n);
    PwcaFit alt = fit_pwca(data, n_hyp, seeded, orientation, options, seed);
    if (alt.rmse < best.rmse) best = std::move(alt);
  } catch (const Error&) {
    // Seeding is optional; the sweep result stands.
  }
  return best;
}

void write_pwca_model(std::ostream& out, const PwcaModel& model) {
  using detail::format_double;
  const auto row = [&](std::string_view key, const Hyperplane& h) {
    out << key;
    for (int i = 0; i < h.coefs().size(); ++i) out << ' ' << format_double(h.coef(i));
    out << '\n';
  };
  out << kPwcaHeader << " 1\n";
  out << "dimension " << model.dimension << '\n';
  out << "orientation " << to_string(model.orientation) << '\n';
  out << "domain";
  for (int j = 0; j < model.domain.input_dims(); ++j) {
    out << ' ' << format_double(model.domain.x_lower[j]);
  }
  for (int j = 0; j < model.domain.input_dims(); ++j) {
    out << ' ' << format_double(model.domain.x_upper[j]);
  }
  out << ' ' << format_double(model.domain.y_min) << ' '
      << format_double(model.domain.y_max) << '\n';
  out << "pairs " << model.lower.size() << '\n';
  row("interface", model.interface_plane);
  for (const auto& h : model.lower) row("lower", h);
  for (const auto& h : model.upper) row("upper", h);
  out << "r1";
  for (double a : model.params.r1) out << ' ' << format_double(a);
  out << "\ns1 " << format_double(model.params.s1) << '\n';
  for (const auto& pp : model.params.pairs) {
    out << "pair";
    for (double a : pp.r2) out << ' ' << format_double(a);
    out << ' ' << format_double(pp.s2) << ' ' << format_double(pp.r3_minus) << ' '
        << format_double(pp.r3_plus) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed to write piecewise-convex model");
}

PwcaModel read_pwca_model(std::istream& in) {
  using namespace detail;
  parse_version_header(in, kPwcaHeader);
  PwcaModel m;
  m.dimension = parse_dimension(in);
  const int n = m.dimension;
  auto tokens = expect_keyword(in, "orientation");
  if (tokens.size() != 1) throw Error(ErrorCode::kParse, "malformed orientation line");
  m.orientation = parse_orientation(tokens[0]);
  m.domain = parse_domain(expect_keyword(in, "domain"), n);
  tokens = expect_keyword(in, "pairs");
  if (tokens.size() != 1) throw Error(ErrorCode::kParse, "malformed pairs line");
  const auto pairs = parse_int(tokens[0]);
  if (pairs < 1 || pairs > 100000) throw Error(ErrorCode::kParse, "invalid pair count");
  m.interface_plane = parse_plane(expect_keyword(in, "interface"), n);
  for (long long i = 0; i < pairs; ++i) m.lower.push_back(parse_plane(expect_keyword(in, "lower"), n));
  for (long long i = 0; i < pairs; ++i) m.upper.push_back(parse_plane(expect_keyword(in, "upper"), n));

  tokens = expect_keyword(in, "r1");
  if (static_cast<int>(tokens.size()) != choose2(n)) {
    throw Error(ErrorCode::kParse, "r1 needs " + std::to_string(choose2(n)) + " angles");
  }
  for (const auto& t : tokens) m.params.r1.push_back(parse_double(t));
  tokens = expect_keyword(in, "s1");
  if (tokens.size() != 1) throw Error(ErrorCode::kParse, "malformed s1 line");
  m.params.s1 = parse_double(tokens[0]);
  const auto r2 = static_cast<std::size_t>(choose2(n - 1));
  for (long long i = 0; i < pairs; ++i) {
    tokens = expect_keyword(in, "pair");
    if (tokens.size() != r2 + 3) {
      throw Error(ErrorCode::kParse, "pair line needs " + std::to_string(r2 + 3) + " values");
    }
    PairParams pp;
    for (std::size_t k = 0; k < r2; ++k) pp.r2.push_back(parse_double(tokens[k]));
    pp.s2 = parse_double(tokens[r2]);
    pp.r3_minus = parse_double(tokens[r2 + 1]);
    pp.r3_plus = parse_double(tokens[r2 + 2]);
    m.params.pairs.push_back(std::move(pp));
  }
  m.validate();
  return m;
}

}  // namespace pwca
