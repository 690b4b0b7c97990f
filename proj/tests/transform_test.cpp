#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "rlt/balls/ball.hpp"
#include "rlt/core/error.hpp"
#include "rlt/core/region.hpp"
#include "rlt/transform/incidence.hpp"
#include "rlt/transform/lorentz.hpp"

using namespace rlt;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

GridSet box_set(const Vec& lo, const Vec& hi, const std::vector<double>& h) {
  return rasterize(BoxRegion(Box{lo, hi}), h);
}

GridFunction row_values(const std::vector<double>& v) {
  return GridFunction(GridGeometry({0.0, 0.0}, {1.0, 1.0}, {1, static_cast<std::int64_t>(v.size())}), v);
}

// Incidence of the d = 2 unit envelope pair, from bilinear_mc with 10^7 samples (seed 20261015):
// 5.99862 +- 0.0011. The continuum value is 2 I_2 = 6.
constexpr double kUnitBallIncidenceD2 = 5.99862;

}  // namespace

TEST(ApplyT, ZeroMapsToZero) {
  const GridGeometry g({-1.0, -1.0}, {0.125, 0.125}, {16, 16});
  const GridFunction out = apply_T(GridFunction(g), g, {}, false);
  for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(ApplyT, UnitStarEnvelopeAtOrigin) {
  const BallParams b = unit_ball(2);
  const EnvelopePair env = envelope(b);
  const GridSet s = rasterize(*env.Estar_env, {1.0 / 64, 1.0 / 64});
  const auto v = evaluate_T(GridFunction::indicator(s), {v2(0.0, 0.0)}, {}, false);
  EXPECT_NEAR(v[0], 2.0, 2.0 / 64);
}

TEST(ApplyT, BoxBelowOrigin) {
  // {t : -t in [-1,1], -t^2 in [-1,0]} = [-1,1].
  const GridSet s = box_set(v2(-1.0, -1.0), v2(1.0, 0.0), {1.0 / 64, 1.0 / 64});
  const auto v = evaluate_T(GridFunction::indicator(s), {v2(0.0, 0.0)}, {}, false);
  EXPECT_NEAR(v[0], 2.0, 2.0 / 64);
}

TEST(ApplyT, Linear) {
  const GridGeometry g({-1.0, -1.0}, {0.125, 0.125}, {16, 16});
  GridFunction f(g), h(g), sum(g);
  for (std::size_t i = 0; i < f.values().size(); ++i) {
    f.values()[i] = static_cast<double>(i % 7);
    h.values()[i] = static_cast<double>((i * 3) % 5);
    sum.values()[i] = 2.0 * f.values()[i] + 3.0 * h.values()[i];
  }
  const auto a = apply_T(f, g, {}, false).values(), b = apply_T(h, g, {}, false).values();
  const auto c = apply_T(sum, g, {}, false).values();
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c[i], 2.0 * a[i] + 3.0 * b[i], 1e-9);
}

TEST(ApplyT, LocalizedIsSmaller) {
  const GridSet s = box_set(v2(-3.0, -10.0), v2(3.0, 0.0), {0.125, 0.125});
  const auto full = evaluate_T(GridFunction::indicator(s), {v2(0.0, 0.0)}, {}, false);
  const auto loc = evaluate_T(GridFunction::indicator(s), {v2(0.0, 0.0)}, {}, true);
  EXPECT_NEAR(full[0], 6.0, 0.25);
  EXPECT_NEAR(loc[0], 2.0, 0.25);
}

TEST(Quadrature, StepCoarserThanLatticeRejected) {
  const GridGeometry g({0.0, 0.0}, {0.125, 0.125}, {8, 8});
  QuadratureSpec q;
  q.t_resolution = 0.5;
  try {
    t_subdivisions(g, q);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ResolutionTooCoarse);
  }
  q.t_resolution = 0.125 / 4;
  EXPECT_EQ(t_subdivisions(g, q), std::vector<int>{4});
}

TEST(Bilinear, EmptyIsZero) {
  const GridSet E(GridGeometry({0.0, 0.0}, {0.125, 0.125}, {8, 8}));
  const GridSet Es = box_set(v2(0.0, 0.0), v2(1.0, 1.0), {0.125, 0.125});
  EXPECT_EQ(bilinear(E, Es, {}), 0.0);
}

TEST(Bilinear, StarredAboveGivesZero) {
  const GridSet E = box_set(v2(-1.0, 0.0), v2(1.0, 1.0), {0.125, 0.125});
  const GridSet Es = box_set(v2(-1.0, 2.0), v2(1.0, 3.0), {0.125, 0.125});
  EXPECT_EQ(bilinear(E, Es, {}), 0.0);
  const ScorePair s = score(E, Es, {});
  EXPECT_EQ(s.epsilon, 0.0);
}

TEST(Bilinear, UnitBallMatchesOracle) {
  const EnvelopeRaster ras = rasterize_envelope(unit_ball(2));
  EXPECT_NEAR(bilinear(ras.E, ras.Estar, {}), kUnitBallIncidenceD2, 0.02 * kUnitBallIncidenceD2);
}

TEST(Bilinear, TransposeAgrees) {
  const EnvelopeRaster ras = rasterize_envelope(unit_ball(2));
  const double a = bilinear(ras.E, ras.Estar, {}), b = bilinear_transpose(ras.E, ras.Estar, {});
  EXPECT_NEAR(a, b, 0.01 * a);
}

TEST(BilinearMc, EmptyStarAndDeterminism) {
  const GridSet E = box_set(v2(-1.0, -1.0), v2(1.0, 1.0), {0.125, 0.125});
  const McEstimate z = bilinear_mc(E, GridSet(E.geometry()), 3, 1000);
  EXPECT_EQ(z.estimate, 0.0);
  EXPECT_EQ(z.std_error, 0.0);
  const GridSet Es = box_set(v2(-1.0, -2.0), v2(1.0, 0.0), {0.125, 0.125});
  const McEstimate a = bilinear_mc(E, Es, 11, 5000), b = bilinear_mc(E, Es, 11, 5000);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_NEAR(a.estimate, bilinear(E, Es, {}), 4.0 * a.std_error + 0.01 * a.estimate);
}

TEST(Score, ParabolicDilationInvariance) {
  const double h = 1.0 / 32;
  double ref = 0.0;
  for (double lambda : {1.0, 0.25, 4.0}) {
    const double l2 = lambda * lambda;
    const GridSet E = box_set(v2(-lambda, 0.0), v2(lambda, l2), {lambda * h, l2 * h});
    const GridSet Es = box_set(v2(-0.5 * lambda, -1.5 * l2), v2(lambda, -0.25 * l2), {lambda * h, l2 * h});
    const double eps = score(E, Es, {}).epsilon;
    EXPECT_GT(eps, 0.0);
    if (lambda == 1.0) ref = eps;
    EXPECT_NEAR(eps, ref, 0.02 * ref) << "lambda " << lambda;
  }
}

TEST(Score, Normalization) {
  const ScorePair s = make_score(6.0, 4.0, 4.0, 2);
  EXPECT_DOUBLE_EQ(s.alpha, 1.5);
  EXPECT_DOUBLE_EQ(s.alpha_star, 1.5);
  EXPECT_NEAR(s.epsilon, 6.0 / std::pow(4.0, 4.0 / 3.0), 1e-15);
}

TEST(Lorentz, ClosedForms) {
  const double p = 1.5;
  const double inf = std::numeric_limits<double>::infinity();
  const GridFunction chi = row_values({1, 1, 1, 1, 1, 0});
  for (double r : {1.0, 2.0, inf}) EXPECT_NEAR(lorentz_norm(chi, {p, r}).norm, std::pow(5.0, 1.0 / p), 1e-12);
  const GridFunction two = row_values({2, 2, 2, 1, 1, 1, 1});
  const double a = 2.0 * std::pow(3.0, 1.0 / p), b = std::pow(4.0, 1.0 / p);
  EXPECT_NEAR(lorentz_norm(two, {p, 1.0}).norm, a + b, 1e-12);
  EXPECT_NEAR(lorentz_norm(two, {p, 3.0}).norm, std::cbrt(a * a * a + b * b * b), 1e-12);
  EXPECT_NEAR(lorentz_norm(two, {p, inf}).norm, std::max(a, b), 1e-12);
  EXPECT_EQ(lorentz_norm(row_values({0, 0}), {p, 1.0}).norm, 0.0);
}

TEST(Lorentz, DroppedLevelsReported) {
  LorentzSpec spec{1.5, 1.0, 0};
  const LorentzResult r = lorentz_norm(row_values({0.25, 1.0, 0.5}), spec);
  EXPECT_NEAR(r.norm, 1.0, 1e-12);
  EXPECT_NEAR(r.dropped_measure, 2.0, 1e-12);
}

TEST(Trilinear, ZeroBetaAndDetection) {
  const EnvelopeRaster ras = rasterize_envelope(unit_ball(2));
  const TrilinearReport z = trilinear_check(ras.Estar, ras.Estar, ras.E, 0.0, {});
  EXPECT_EQ(z.lhs, 0.0);
  EXPECT_TRUE(z.hypothesis_ok);
  // T chi_{E*} is about 1 near the slab edges of E, far below 2.
  const TrilinearReport v = trilinear_check(ras.Estar, ras.Estar, ras.E, 2.0, {});
  EXPECT_FALSE(v.hypothesis_ok);
  EXPECT_LT(v.worst_value, 2.0);
  EXPECT_TRUE(ras.E.contains(v.witness));
}

TEST(Trilinear, EmptyRejected) {
  const EnvelopeRaster ras = rasterize_envelope(unit_ball(2));
  EXPECT_THROW(trilinear_check(ras.Estar, ras.Estar, GridSet(ras.E.geometry()), 1.0, {}), Error);
}

TEST(Flatness, ZeroAndBoundary) {
  const GridGeometry g({-1.0, -1.0}, {0.125, 0.125}, {16, 16});
  GridFunction f(g);
  for (double& v : f.values()) v = 1.0;
  EXPECT_EQ(flatness_gain(f, GridFunction(g), 0.5, {}).ratio, 0.0);

  // A single characteristic function has 2^0 |F_0|^{d/(d+1)} = ||f*||, so eta = 1 is the boundary.
  GridFunction fs(g);
  for (std::size_t i = 0; i < fs.values().size(); i += 3) fs.values()[i] = 1.0;
  const FlatnessReport r = flatness_gain(f, fs, 1.0, {});
  EXPECT_NEAR(r.worst_level_ratio, 1.0, 1e-12);
  EXPECT_GT(r.ratio, 0.0);
  try {
    flatness_gain(f, fs, 1.0 - 1e-6, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FlatnessViolated);
  }
  EXPECT_THROW(flatness_gain(f, fs, 0.0, {}), Error);
}
