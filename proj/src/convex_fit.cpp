#include "pwca/convex_fit.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "fit_common.hpp"
#include "model_io.hpp"
#include "pwca/error.hpp"
#include "text_io.hpp"

namespace pwca {

namespace {

constexpr std::string_view kConvexHeader = "pwca-convex-model";
constexpr int kFormatVersion = 1;
constexpr int kMaxRefits = 2;

// Planes as y~ = b0 + sum b_j x~_j in normalized coordinates, packed
// (dims + 1) values per plane.
class ConvexObjective {
 public:
  ConvexObjective(const detail::NormalizedData& data, int n_hyp)
      : data_(data), n_hyp_(n_hyp), stride_(data.dims + 1) {
    y_top_ = *std::max_element(data.y.begin(), data.y.end());
    weight_ = detail::kPenaltyWeight;
    const int d = data.dims;
    corners_.resize(std::size_t{1} << d);
    for (unsigned mask = 0; mask < corners_.size(); ++mask) corners_[mask] = mask;
  }

  double sse(const Vector& v) const {
    double total = 0.0;
    const int d = data_.dims;
    for (int m = 0; m < data_.count; ++m) {
      const double* x = data_.row(m);
      double best = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < n_hyp_; ++i) {
        const double* b = v.data() + static_cast<std::ptrdiff_t>(i) * stride_;
        double y = b[0];
        for (int j = 0; j < d; ++j) y += b[j + 1] * x[j];
        best = std::max(best, y);
      }
      const double r = best - data_.y[static_cast<std::size_t>(m)];
      total += r * r;
    }
    return total;
  }

  double penalty(const Vector& v) const {
    double total = 0.0;
    const int d = data_.dims;
    for (int i = 0; i < n_hyp_; ++i) {
      const double* b = v.data() + static_cast<std::ptrdiff_t>(i) * stride_;
      double closest = std::numeric_limits<double>::infinity();
      for (unsigned mask : corners_) {
        double y = b[0];
        for (int j = 0; j < d; ++j) {
          if ((mask >> j) & 1u) y += b[j + 1];
        }
        const double gap = std::max(0.0, y_top_ - y);
        closest = std::min(closest, gap * gap);
      }
      total += closest;
    }
    return weight_ * total;
  }

  double operator()(const Vector& v) const { return sse(v) + penalty(v); }

 private:
  const detail::NormalizedData& data_;
  int n_hyp_;
  int stride_;
  double y_top_ = 0.0;
  double weight_ = 0.0;
  std::vector<unsigned> corners_;
};

std::vector<Hyperplane> to_hyperplanes(const detail::NormalizedData& data,
                                       const Vector& v, int n_hyp) {
  const int d = data.dims;
  std::vector<Hyperplane> planes;
  planes.reserve(static_cast<std::size_t>(n_hyp));
  for (int i = 0; i < n_hyp; ++i) {
    const auto b = v.segment(static_cast<Eigen::Index>(i) * (d + 1), d + 1);
    double c0 = data.y_min + data.y_scale * b[0];
    Vector normal(d + 1);
    for (int j = 0; j < d; ++j) {
      const double cj = data.y_scale * b[j + 1] / data.x_width[j];
      c0 -= cj * data.x_lower[j];
      normal[j] = -cj;
    }
    normal[d] = 1.0;
    Vector a(d + 2);
    a[0] = -c0;
    a.tail(d + 1) = normal;
    a /= normal.norm();
    planes.emplace_back(std::move(a));
  }
  return planes;
}

ConvexFit fit_convex_max(const Dataset& data, int n_hyp,
                         const OptimizerOptions& options, std::uint64_t seed) {
  const detail::NormalizedData norm(data);
  const int d = norm.dims;
  const int stride = d + 1;

  // Fan of planes through the data centroid around the least-squares plane.
  const Vector ls = detail::least_squares_plane(norm);
  Vector centroid = Vector::Zero(d);
  for (int m = 0; m < norm.count; ++m) {
    for (int j = 0; j < d; ++j) centroid[j] += norm.row(m)[j];
  }
  centroid /= norm.count;
  const double y_centroid = ls[0] + ls.tail(d).dot(centroid);

  std::mt19937_64 rng(seed);
  Vector v(static_cast<Eigen::Index>(n_hyp) * stride);
  for (int i = 0; i < n_hyp; ++i) {
    Vector b = ls;
    if (n_hyp > 1) {
      for (int j = 0; j < d; ++j) b[j + 1] += detail::uniform(rng, -0.1, 0.1);
    }
    b[0] = y_centroid - b.tail(d).dot(centroid);
    v.segment(static_cast<Eigen::Index>(i) * stride, stride) = b;
  }

  const ConvexObjective objective(norm, n_hyp);
  MinimizeResult result = minimize(objective, v, options);

  ConvexFit fit;
  fit.model.orientation = Orientation::kConvex;
  fit.model.dimension = data.dimension();
  fit.model.domain = data.domain();
  fit.model.planes = to_hyperplanes(norm, result.x, n_hyp);

  // Re-seed planes that ended up dominated everywhere at the points the
  // model underestimates most, and search again.
  while (fit.refits < kMaxRefits && n_hyp > 1) {
    const auto dominated = dominated_planes(fit.model);
    if (dominated.empty()) break;
    ++fit.refits;
    std::vector<double> residual(static_cast<std::size_t>(norm.count));
    for (int m = 0; m < norm.count; ++m) {
      double best = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < n_hyp; ++i) {
        const double* b = result.x.data() + static_cast<std::ptrdiff_t>(i) * stride;
        double y = b[0];
        for (int j = 0; j < d; ++j) y += b[j + 1] * norm.row(m)[j];
        best = std::max(best, y);
      }
      residual[static_cast<std::size_t>(m)] = norm.y[static_cast<std::size_t>(m)] - best;
    }
    std::vector<int> order(static_cast<std::size_t>(norm.count));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return residual[static_cast<std::size_t>(a)] > residual[static_cast<std::size_t>(b)];
    });
    const auto take = static_cast<std::size_t>(
        std::max(d + 1, (norm.count + n_hyp - 1) / n_hyp));
    order.resize(std::min(order.size(), take));
    const Vector patch = detail::least_squares_plane(norm, order);
    Vector retry = result.x;
    for (int i : dominated) {
      retry.segment(static_cast<Eigen::Index>(i) * stride, stride) = patch;
    }
    MinimizeResult again = minimize(objective, retry, options);
    if (!(again.f < result.f)) break;
    result = std::move(again);
    fit.model.planes = to_hyperplanes(norm, result.x, n_hyp);
  }

  fit.converged = result.converged;
  fit.penalty = objective.penalty(result.x) * norm.y_scale * norm.y_scale;
  fit.rmse = rmse(fit.model, data);
  return fit;
}

}  // namespace

std::string_view to_string(Orientation o) {
  return o == Orientation::kConvex ? "convex" : "concave";
}

Orientation parse_orientation(std::string_view s) {
  if (s == "convex") return Orientation::kConvex;
  if (s == "concave") return Orientation::kConcave;
  throw Error(ErrorCode::kParse, "unknown orientation '" + std::string(s) + "'");
}

double plane_value(const Hyperplane& plane, const Eigen::Ref<const Vector>& x) {
  const int n = plane.dimension();
  if (x.size() != n - 1) {
    throw Error(ErrorCode::kInvalidDimension,
                "point has " + std::to_string(x.size()) + " coordinates, plane expects " +
                    std::to_string(n - 1));
  }
  const double an = plane.y_coef();
  if (an == 0.0) {
    throw Error(ErrorCode::kVerticalPlane, "plane has zero y coefficient");
  }
  return -(plane.offset() + plane.coefs().segment(1, n - 1).dot(x)) / an;
}

void ConvexModel::validate() const {
  if (planes.empty()) {
    throw Error(ErrorCode::kParameter, "convex model has no planes");
  }
  for (const auto& p : planes) {
    if (p.dimension() != dimension) {
      throw Error(ErrorCode::kInvalidDimension, "plane dimension mismatch");
    }
    if (!(p.y_coef() > 0.0)) {
      throw Error(ErrorCode::kVerticalPlane,
                  "model planes need a positive y coefficient");
    }
  }
}

double evaluate_convex(const ConvexModel& model,
                       const Eigen::Ref<const Vector>& x) {
  const bool convex = model.orientation == Orientation::kConvex;
  double best = convex ? -std::numeric_limits<double>::infinity()
                       : std::numeric_limits<double>::infinity();
  for (const auto& p : model.planes) {
    const double y = plane_value(p, x);
    best = convex ? std::max(best, y) : std::min(best, y);
  }
  return best;
}

double rmse(const ConvexModel& model, const Dataset& data) {
  double sse = 0.0;
  for (int m = 0; m < data.size(); ++m) {
    const double r = evaluate_convex(model, data.point(m)) - data.y()[m];
    sse += r * r;
  }
  return std::sqrt(sse / data.size());
}

ConvexModel mirrored(const ConvexModel& model) {
  ConvexModel out = model;
  for (auto& p : out.planes) {
    Vector a = p.coefs();
    a.head(a.size() - 1) *= -1.0;
    p = Hyperplane(std::move(a));
  }
  out.orientation = model.orientation == Orientation::kConvex
                        ? Orientation::kConcave
                        : Orientation::kConvex;
  out.domain.y_min = -model.domain.y_max;
  out.domain.y_max = -model.domain.y_min;
  return out;
}

ConvexFit fit_convex(const Dataset& data, int n_hyp, Orientation orientation,
                     const OptimizerOptions& options, std::uint64_t seed) {
  if (n_hyp < 1) {
    throw Error(ErrorCode::kParameter, "at least one plane is required");
  }
  const long long needed = static_cast<long long>(n_hyp) * (data.dimension() + 1);
  if (data.size() < needed) {
    throw Error(ErrorCode::kUnderdetermined,
                std::to_string(data.size()) + " points cannot determine " +
                    std::to_string(n_hyp) + " planes (need " +
                    std::to_string(needed) + ")");
  }
  options.validate();
  if (orientation == Orientation::kConvex) {
    return fit_convex_max(data, n_hyp, options, seed);
  }
  // min y_i = -max(-y_i)
  ConvexFit fit = fit_convex_max(data.negated(), n_hyp, options, seed);
  fit.model = mirrored(fit.model);
  return fit;
}

std::vector<int> dominated_planes(const ConvexModel& model, int per_dim) {
  const int d = model.dimension - 1;
  const int count = static_cast<int>(model.planes.size());
  std::vector<char> wins(static_cast<std::size_t>(count), 0);
  const double sign = model.orientation == Orientation::kConvex ? 1.0 : -1.0;
  std::vector<int> index(static_cast<std::size_t>(d), 0);
  Vector x(d);
  const int steps = std::max(per_dim, 2);
  for (;;) {
    for (int j = 0; j < d; ++j) {
      const double t = static_cast<double>(index[static_cast<std::size_t>(j)]) / (steps - 1);
      x[j] = model.domain.x_lower[j] + t * (model.domain.x_upper[j] - model.domain.x_lower[j]);
    }
    int arg = -1;
    double best = -std::numeric_limits<double>::infinity();
    double second = best;
    for (int i = 0; i < count; ++i) {
      const double y = sign * plane_value(model.planes[static_cast<std::size_t>(i)], x);
      if (y > best) {
        second = best;
        best = y;
        arg = i;
      } else if (y > second) {
        second = y;
      }
    }
    if (arg >= 0 && best > second) wins[static_cast<std::size_t>(arg)] = 1;
    int j = 0;
    while (j < d && ++index[static_cast<std::size_t>(j)] == steps) {
      index[static_cast<std::size_t>(j)] = 0;
      ++j;
    }
    if (j == d) break;
  }
  std::vector<int> out;
  for (int i = 0; i < count; ++i) {
    if (!wins[static_cast<std::size_t>(i)]) out.push_back(i);
  }
  return out;
}

void write_convex_model(std::ostream& out, const ConvexModel& model) {
  using detail::format_double;
  out << kConvexHeader << ' ' << kFormatVersion << '\n';
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
  out << "planes " << model.planes.size() << '\n';
  for (const auto& p : model.planes) {
    out << "plane";
    for (int i = 0; i < p.coefs().size(); ++i) out << ' ' << format_double(p.coef(i));
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed to write convex model");
}

namespace detail {

// Shared with the piecewise-convex reader.
Domain parse_domain(const std::vector<std::string>& tokens, int n) {
  const int d = n - 1;
  if (static_cast<int>(tokens.size()) != 2 * d + 2) {
    throw Error(ErrorCode::kParse, "domain line needs " + std::to_string(2 * d + 2) +
                                       " values");
  }
  Domain dom{Vector(d), Vector(d), 0.0, 0.0};
  for (int j = 0; j < d; ++j) {
    dom.x_lower[j] = parse_double(tokens[static_cast<std::size_t>(j)]);
    dom.x_upper[j] = parse_double(tokens[static_cast<std::size_t>(d + j)]);
  }
  dom.y_min = parse_double(tokens[static_cast<std::size_t>(2 * d)]);
  dom.y_max = parse_double(tokens[static_cast<std::size_t>(2 * d + 1)]);
  return dom;
}

Hyperplane parse_plane(const std::vector<std::string>& tokens, int n) {
  if (static_cast<int>(tokens.size()) != n + 1) {
    throw Error(ErrorCode::kParse,
                "plane row needs " + std::to_string(n + 1) + " coefficients");
  }
  Vector a(n + 1);
  for (int i = 0; i <= n; ++i) a[i] = parse_double(tokens[static_cast<std::size_t>(i)]);
  return Hyperplane(std::move(a));
}

int parse_version_header(std::istream& in, std::string_view header) {
  const auto tokens = expect_keyword(in, header);
  if (tokens.size() != 1) throw Error(ErrorCode::kParse, "malformed header");
  const auto version = parse_int(tokens[0]);
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kParse,
                "unsupported format version " + std::to_string(version));
  }
  return static_cast<int>(version);
}

int parse_dimension(std::istream& in) {
  const auto tokens = expect_keyword(in, "dimension");
  if (tokens.size() != 1) throw Error(ErrorCode::kParse, "malformed dimension line");
  const auto n = parse_int(tokens[0]);
  if (n < 2 || n > 64) throw Error(ErrorCode::kParse, "invalid dimension");
  return static_cast<int>(n);
}

}  // namespace detail

ConvexModel read_convex_model(std::istream& in) {
  detail::parse_version_header(in, kConvexHeader);
  ConvexModel model;
  model.dimension = detail::parse_dimension(in);
  auto tokens = detail::expect_keyword(in, "orientation");
  if (tokens.size() != 1) throw Error(ErrorCode::kParse, "malformed orientation line");
  model.orientation = parse_orientation(tokens[0]);
  model.domain = detail::parse_domain(detail::expect_keyword(in, "domain"), model.dimension);
  tokens = detail::expect_keyword(in, "planes");
  if (tokens.size() != 1) throw Error(ErrorCode::kParse, "malformed planes line");
  const auto count = detail::parse_int(tokens[0]);
  if (count < 1) throw Error(ErrorCode::kParse, "plane count must be positive");
  for (long long i = 0; i < count; ++i) {
    model.planes.push_back(
        detail::parse_plane(detail::expect_keyword(in, "plane"), model.dimension));
  }
  model.validate();
  return model;
}

}  // namespace pwca
