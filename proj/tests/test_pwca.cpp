#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "pwca/error.hpp"
#include "pwca/pwca.hpp"
#include "test_support.hpp"

using namespace pwca;
using pwca::testing::grid_1d;
using pwca::testing::grid_2d;

namespace {

const Dataset& small_product() {
  static const Dataset d = pwca::testing::multiplication_grid(30);
  return d;
}

const PwcaFit& small_product_fit() {
  static const PwcaFit f = fit_pwca_default(small_product(), 4);
  return f;
}

double max_slope(const PwcaModel& m) {
  double s = 0.0;
  for (const auto* family : {&m.lower, &m.upper}) {
    for (const auto& h : *family) {
      const int n = h.dimension();
      s = std::max(s, h.coefs().segment(1, n - 1).norm() / h.y_coef());
    }
  }
  return s;
}

// Independent statement of the side resolution rule.
PwcaValue resolve(const PwcaModel& m, const Vector& x) {
  const double yl = side_value(m, Side::kLower, x);
  const double yu = side_value(m, Side::kUpper, x);
  const int n = m.dimension;
  Vector pl(n), pu(n);
  pl << x, yl;
  pu << x, yu;
  const double gl = m.interface_plane.residual(pl);
  const double gu = m.interface_plane.residual(pu);
  const bool lo = gl <= 0.0, up = gu > 0.0;
  if (lo && !up) return {yl, Side::kLower};
  if (up && !lo) return {yu, Side::kUpper};
  if (lo) return std::abs(gu) < std::abs(gl) ? PwcaValue{yu, Side::kUpper} : PwcaValue{yl, Side::kLower};
  return -gu < gl ? PwcaValue{yu, Side::kUpper} : PwcaValue{yl, Side::kLower};
}

RotationParams random_params(int n, int pairs, std::mt19937_64& rng, double tilt) {
  std::uniform_real_distribution<double> a(-0.6, 0.6);
  RotationParams p = RotationParams::zeros(n, pairs);
  for (double& r : p.r1) r = a(rng);
  p.r1[static_cast<std::size_t>(n - 2)] = tilt;  // plane (x_1, y)
  p.s1 = 0.5 + 0.3 * a(rng);
  for (auto& pp : p.pairs) {
    for (double& r : pp.r2) r = a(rng);
    pp.s2 = a(rng);
    pp.r3_minus = a(rng);
    pp.r3_plus = a(rng);
  }
  return p;
}

}  // namespace

TEST(EvaluatePwca, AllZeroParamsGiveZero) {
  const Domain dom{Vector::Zero(2), Vector::Ones(2), 0.0, 1.0};
  const PwcaModel m = make_pwca_model(RotationParams::zeros(3, 2), 3, Orientation::kConvex, dom);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(evaluate_pwca(m, Vector{{u(rng), u(rng)}}).y, 0.0);
  }
}

TEST(EvaluatePwca, SideMatchesResolutionRule) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  const Domain dom{Vector::Zero(2), Vector::Ones(2), 0.0, 1.0};
  for (double tilt : {0.0, 0.3, -0.8}) {
    for (int trial = 0; trial < 20; ++trial) {
      PwcaModel m;
      try {
        m = make_pwca_model(random_params(3, 2, rng, tilt), 3, Orientation::kConvex, dom);
      } catch (const Error&) {
        continue;
      }
      for (int k = 0; k < 100; ++k) {
        const Vector x{{u(rng), u(rng)}};
        const PwcaValue got = evaluate_pwca(m, x);
        const PwcaValue want = resolve(m, x);
        ASSERT_EQ(got.side, want.side);
        ASSERT_NEAR(got.y, want.y, 1e-12);
      }
    }
  }
}

TEST(EvaluatePwca, VerticalInterfaceReducesToSignTest) {
  const PwcaFit& fit = small_product_fit();
  ASSERT_EQ(fit.model.interface_plane.y_coef(), 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const Vector x{{u(rng), u(rng)}};
    const double g = fit.model.interface_plane.residual(Vector{{x[0], x[1], 0.0}});
    const PwcaValue v = evaluate_pwca(fit.model, x);
    EXPECT_EQ(v.side, g <= 0.0 ? Side::kLower : Side::kUpper);
    EXPECT_NEAR(v.y, side_value(fit.model, v.side, x), 1e-12);
  }
}

TEST(PwcaProperty, ContinuityOnInterface) {
  const PwcaModel& m = small_product_fit().model;
  // Interface x . nu = c in the x plane (the fitted interface is vertical).
  const Vector nu = m.interface_plane.coefs().segment(1, 2);
  const double c = -m.interface_plane.offset();
  const Vector along{{-nu[1], nu[0]}};
  const Vector base = nu * c / nu.squaredNorm();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int on_domain = 0;
  while (on_domain < 1000) {
    const Vector x = base + u(rng) * along;
    if (x.minCoeff() < 0.0 || x.maxCoeff() > 1.0) continue;
    ++on_domain;
    ASSERT_LT(std::abs(side_value(m, Side::kLower, x) - side_value(m, Side::kUpper, x)), 1e-8);
  }
}

TEST(PwcaProperty, DenseGridJumpBoundedBySlope) {
  const PwcaModel& m = small_product_fit().model;
  const int size = 101;
  const double h = 1.0 / (size - 1);
  const double bound = 2.0 * h * max_slope(m);
  std::vector<PwcaValue> v(static_cast<std::size_t>(size * size));
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      v[static_cast<std::size_t>(i * size + j)] = evaluate_pwca(m, Vector{{i * h, j * h}});
    }
  }
  int crossings = 0;
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      const auto& a = v[static_cast<std::size_t>(i * size + j)];
      for (auto [di, dj] : {std::pair{1, 0}, std::pair{0, 1}}) {
        if (i + di >= size || j + dj >= size) continue;
        const auto& b = v[static_cast<std::size_t>((i + di) * size + j + dj)];
        if (a.side == b.side) continue;
        ++crossings;
        ASSERT_LT(std::abs(a.y - b.y), bound);
      }
    }
  }
  EXPECT_GT(crossings, 0);
}

TEST(PwcaProperty, GeneratorConsistency) {
  const PwcaModel& m = small_product_fit().model;
  const PlaneSet set = params_to_hyperplanes(m.params, m.dimension);
  for (std::size_t i = 0; i < m.lower.size(); ++i) {
    EXPECT_LT((set.lower[i].coefs() - m.lower[i].coefs()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((set.upper[i].coefs() - m.upper[i].coefs()).cwiseAbs().maxCoeff(), 1e-9);
  }
  EXPECT_LT((set.interface_plane.coefs() - m.interface_plane.coefs()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(FitPwca, ExactTwoPlaneFunction) {
  const Dataset d = grid_2d(30, [](double a, double b) { return std::abs(a + b - 1.0); });
  const PwcaFit fit = fit_pwca_default(d, 2);
  EXPECT_LT(fit.rmse, 1e-4);
}

TEST(FitPwca, SmallProductGridImprovesOnConvex) {
  const PwcaFit& fit = small_product_fit();
  const ConvexFit convex = fit_convex(small_product(), 4, Orientation::kConvex);
  EXPECT_LT(fit.rmse, 0.5 * convex.rmse);
  EXPECT_TRUE(std::isfinite(fit.penalty));
}

TEST(FitPwca, SixPlanesNoWorseThanFourWhenSeededFromFour) {
  const PwcaFit& four = small_product_fit();
  const RotationParams start = with_duplicated_pair(four.model.params, 0);
  const PwcaFit six = fit_pwca(small_product(), 6, start);
  EXPECT_LE(six.rmse, four.rmse + 1e-12);
}

TEST(FitPwcaProperty, SeededFromConvexIsNoWorseThanConvex) {
  const Dataset& d = small_product();
  for (int n_hyp : {4, 6}) {
    const ConvexFit convex = fit_convex(d, n_hyp / 2, Orientation::kConvex, {}, 1);
    RotationParams ifc = RotationParams::zeros(3, 1);
    ifc.r1 = interface_angles(Vector{{1.0, -1.0, 0.0}});
    const RotationParams start = params_from_convex(convex.model, ifc, 3);
    const PwcaFit fit = fit_pwca(d, n_hyp, start);
    EXPECT_LE(fit.rmse, convex.rmse + 1e-9) << n_hyp;
  }
}

TEST(ParamsFromConvex, ReproducesConvexModel) {
  const Dataset d = grid_2d(20, [](double a, double b) { return a * a + b * b; });
  const ConvexFit convex = fit_convex(d, 3, Orientation::kConvex, {}, 2);
  RotationParams ifc = RotationParams::zeros(3, 1);
  ifc.r1 = interface_angles(Vector{{0.6, 0.8, 0.0}});
  ifc.s1 = 0.4;
  const PwcaModel m =
      make_pwca_model(params_from_convex(convex.model, ifc, 3), 3, Orientation::kConvex, d.domain());
  for (int k = 0; k < d.size(); ++k) {
    EXPECT_NEAR(evaluate_pwca(m, d.point(k)).y, evaluate_convex(convex.model, d.point(k)), 1e-12);
  }
}

TEST(WithDuplicatedPair, LeavesModelUnchanged) {
  const PwcaModel& m = small_product_fit().model;
  const PwcaModel bigger = make_pwca_model(with_duplicated_pair(m.params, 1), 3,
                                           Orientation::kConvex, m.domain);
  EXPECT_EQ(bigger.plane_count(), 6);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Vector x{{u(rng), u(rng)}};
    EXPECT_EQ(evaluate_pwca(bigger, x).y, evaluate_pwca(m, x).y);
  }
}

TEST(FitPwca, ConcaveMirrorsConvexOfNegatedData) {
  const Dataset& d = small_product();
  const PwcaFit convex = fit_pwca_default(d, 4);
  const PwcaFit concave = fit_pwca_default(d.negated(), 4, Orientation::kConcave);
  EXPECT_NEAR(concave.rmse, convex.rmse, 1e-9);
  for (std::size_t i = 0; i < convex.model.lower.size(); ++i) {
    Vector a = convex.model.lower[i].coefs();
    a.head(a.size() - 1) *= -1.0;
    EXPECT_LT((concave.model.lower[i].coefs() - a).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GT(concave.model.lower[i].y_coef(), 0.0);
  }
  for (int k = 0; k < d.size(); k += 7) {
    EXPECT_NEAR(evaluate_pwca(concave.model, d.point(k)).y,
                -evaluate_pwca(convex.model, d.point(k)).y, 1e-12);
  }
}

TEST(FitPwca, Errors) {
  const Dataset& d = small_product();
  try {
    fit_pwca(d, 3, RotationParams::zeros(3, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParameter);
  }
  RotationParams vertical = RotationParams::zeros(3, 2);
  vertical.pairs[1].r3_plus = std::numbers::pi / 2;
  try {
    fit_pwca(d, 4, vertical);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateModel);
    EXPECT_NE(std::string(e.what()).find("pair 1"), std::string::npos);
  }
}

TEST(InitialGuess, NearOptimumForKnownSplit) {
  const Dataset d = grid_2d(30, [](double a, double b) { return std::abs(a + b - 1.0); });
  const std::vector<double> r1 = interface_angles(Vector{{1.0, 1.0, 0.0}});
  const RotationParams p = initial_guess(d, 2, r1, 1.0 / std::sqrt(2.0));
  const PwcaModel m = make_pwca_model(p, 3, Orientation::kConvex, d.domain());
  EXPECT_LT(rmse(m, d), 0.05);
}

TEST(InitialGuess, OrthogonalGuessStillValid) {
  const Dataset& d = small_product();
  const std::vector<double> r1 = interface_angles(Vector{{1.0, 1.0, 0.0}});
  const RotationParams p = initial_guess(d, 4, r1, 1.0 / std::sqrt(2.0));
  EXPECT_NO_THROW(p.validate(3));
  EXPECT_NO_THROW(make_pwca_model(p, 3, Orientation::kConvex, d.domain()));
}

TEST(InitialGuess, FullDomainBand) {
  const Dataset& d = small_product();
  const std::vector<double> r1 = interface_angles(Vector{{1.0, -1.0, 0.0}});
  const RotationParams p = initial_guess(d, 4, r1, 0.0, 10.0);
  EXPECT_NO_THROW(make_pwca_model(p, 3, Orientation::kConvex, d.domain()));
}

TEST(InitialGuess, EmptyBandIsAnError) {
  const Dataset d = grid_2d(5, [](double a, double b) { return a * b; });
  const std::vector<double> r1 = interface_angles(Vector{{1.0, 0.0, 0.0}});
  try {
    initial_guess(d, 2, r1, 0.1, 1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBandTooNarrow);
  }
}

TEST(InterfaceSweep, ProductDataPicksDiagonalInterface) {
  const RotationParams p = default_interface_sweep(small_product(), 4);
  const Basis b = interface_basis(p, 3);
  // The interface line runs along (1,1): its normal is orthogonal to it.
  const Vector normal = b.vectors.col(0).head(2).normalized();
  const double cos_to_diagonal = std::abs(normal.dot(Vector{{1.0, 1.0}}) / std::sqrt(2.0));
  EXPECT_LT(cos_to_diagonal, std::sin(15.0 * std::numbers::pi / 180.0));
}

TEST(InterfaceSweep, ConvexDataGivesValidParams) {
  const Dataset d = grid_2d(20, [](double a, double b) { return a * a + b * b; });
  const RotationParams p = default_interface_sweep(d, 4);
  EXPECT_NO_THROW(make_pwca_model(p, 3, Orientation::kConvex, d.domain()));
}

TEST(InterfaceSweep, OneDimensionalData) {
  const Dataset d = grid_1d(60, [](double a) { return std::abs(a - 0.3) + 0.2 * a * a; });
  const RotationParams p = default_interface_sweep(d, 4);
  const PwcaModel m = make_pwca_model(p, 2, Orientation::kConvex, d.domain());
  const double x_ifc = -m.interface_plane.offset() / m.interface_plane.coef(1);
  EXPECT_GT(x_ifc, 0.0);
  EXPECT_LT(x_ifc, 1.0);
  const PwcaFit fit = fit_pwca(d, 4, p);
  EXPECT_LT(fit.rmse, 0.01);
}

TEST(PwcaModelIo, BitExactRoundTrip) {
  for (const PwcaModel* m : {&small_product_fit().model}) {
    std::stringstream s;
    write_pwca_model(s, *m);
    const std::string text = s.str();
    const PwcaModel back = read_pwca_model(s);
    EXPECT_EQ(back.params, m->params);
    EXPECT_EQ(back.interface_plane, m->interface_plane);
    for (std::size_t i = 0; i < m->lower.size(); ++i) {
      EXPECT_EQ(back.lower[i], m->lower[i]);
      EXPECT_EQ(back.upper[i], m->upper[i]);
    }
    EXPECT_EQ(back.domain, m->domain);
    std::stringstream again;
    write_pwca_model(again, back);
    EXPECT_EQ(again.str(), text);
  }
}

TEST(PwcaModelIo, RejectsTruncatedFile) {
  std::stringstream s;
  write_pwca_model(s, small_product_fit().model);
  std::string text = s.str();
  text.resize(text.size() / 2);
  std::stringstream cut(text);
  EXPECT_THROW(read_pwca_model(cut), Error);
}
