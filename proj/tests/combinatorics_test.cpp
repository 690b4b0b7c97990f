#include <gtest/gtest.h>

#include <cmath>

#include "rlt/balls/ball.hpp"
#include "rlt/combinatorics/convexify.hpp"
#include "rlt/combinatorics/det_moment.hpp"
#include "rlt/combinatorics/extract.hpp"
#include "rlt/combinatorics/image.hpp"
#include "rlt/combinatorics/tower.hpp"
#include "rlt/core/error.hpp"
#include "rlt/core/region.hpp"
#include "rlt/core/rng.hpp"
#include "rlt/experiment/config.hpp"

using namespace rlt;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

GridSet line_set(std::vector<std::pair<double, double>> parts, double h = 1.0 / 64) {
  const GridGeometry g({-20.0}, {h}, {static_cast<std::int64_t>(std::llround(40.0 / h))});
  std::vector<RegionPtr> regions;
  for (auto [a, b] : parts) regions.push_back(std::make_shared<BoxRegion>(Box{vec({a}), vec({b})}));
  return rasterize(UnionRegion(regions), g);
}

GridSet square(double lo, double hi, double h) { return rasterize(BoxRegion(Box{vec({lo, lo}), vec({hi, hi})}), {h, h}); }

ConvexApprox centered_box(int n, double half) {
  std::vector<Slab> slabs;
  for (int j = 0; j < n; ++j) {
    Vec e = Vec::Zero(n);
    e(j) = 1.0;
    slabs.push_back({e, half});
  }
  return make_convex(slabs, Vec::Zero(n));
}

struct UnitTower {
  EnvelopeRaster ras = rasterize_envelope(unit_ball(2));
  TowerData tower = build_tower(ras.E, ras.Estar, {});
};

const UnitTower& unit_tower() {
  static const UnitTower t;
  return t;
}

}  // namespace

TEST(Tower, NoIncidences) {
  const GridSet E = square(-1.0, 1.0, 0.125);
  const GridSet Es = rasterize(BoxRegion(Box{vec({-1.0, 5.0}), vec({1.0, 6.0})}), {0.125, 0.125});
  try {
    build_tower(E, Es, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoIncidences);
  }
}

TEST(Tower, UnitBallBounds) {
  const ExperimentConfig cfg = default_config(2);
  const TowerData& t = unit_tower().tower;
  EXPECT_GE(t.omega1.measure(), cfg.constant("kappa1_d2") * t.alpha);
  for (const TowerFiber& f : t.fibers) EXPECT_GE(f.set.measure(), kTowerFiberFraction * t.alpha_star * (1.0 - 1e-12));
  const InclusionReport inc = verify_tower_inclusions(t, unit_tower().ras.E, unit_tower().ras.Estar, 1000, 3);
  EXPECT_EQ(inc.checked, 1000u);
  EXPECT_EQ(inc.first_failures, 0u);
  EXPECT_EQ(inc.second_failures, 0u);
}

TEST(Tower, JsonRoundTrip) {
  const TowerData& t = unit_tower().tower;
  const TowerData u = tower_from_json(to_json(t));
  EXPECT_EQ(u.omega1, t.omega1);
  ASSERT_EQ(u.fibers.size(), t.fibers.size());
  EXPECT_DOUBLE_EQ(u.fiber_measure(), t.fiber_measure());
}

TEST(PhiImage, EmptyFibersAndBounds) {
  const ExperimentConfig cfg = default_config(2);
  const TowerData& t = unit_tower().tower;
  const PhiImageReport r = phi_image_report(t, phi_image_raster(t, 64));
  EXPECT_GE(r.ratio, cfg.constant("kappa3_d2"));
  const double coarse = phi_image_measure(t, phi_image_raster(t, 32));
  EXPECT_NEAR(coarse, r.measure, 0.05 * r.measure);
  TowerData bare = t;
  bare.fibers.clear();
  EXPECT_EQ(phi_image_measure(bare, phi_image_raster(t, 64)), 0.0);
}

TEST(Slicing, UnitSquareClosedForm) {
  const GridSet sq = square(0.0, 1.0, 1.0 / 64);
  const SlicingResult r = slicing_bound(sq, Mat::Identity(1, 1), slicing_raster(sq, 256));
  EXPECT_NEAR(r.lhs, 0.5, 0.01);
  EXPECT_NEAR(r.rhs, 0.5, 0.01);
  const SlicingResult z = slicing_bound(GridSet(sq.geometry()), Mat::Identity(1, 1), slicing_raster(sq, 256));
  EXPECT_EQ(z.lhs, 0.0);
  EXPECT_EQ(z.rhs, 0.0);
}

TEST(Slicing, ScalingLaw) {
  const GridSet w1 = square(0.0, 1.0, 1.0 / 64);
  const GridSet w2 = rasterize(BoxRegion(Box{vec({0.0, 0.0}), vec({2.0, 1.0})}), {1.0 / 32, 1.0 / 64});
  const SlicingResult r1 = slicing_bound(w1, Mat::Identity(1, 1), slicing_raster(w1, 256));
  const SlicingResult r2 = slicing_bound(w2, 2.0 * Mat::Identity(1, 1), slicing_raster(w2, 256));
  EXPECT_NEAR(r2.lhs / r1.lhs, 2.0, 0.1);
  EXPECT_NEAR(r2.rhs / r1.rhs, 2.0, 0.1);
}

TEST(Slicing, HypothesisChecked) {
  const GridSet w = rasterize(BoxRegion(Box{vec({0.0, 0.0}), vec({1.5, 1.0})}), {1.0 / 16, 1.0 / 16});
  try {
    slicing_bound(w, Mat::Identity(1, 1), slicing_raster(w, 64));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::HypothesisViolated);
  }
}

TEST(Convexify, SymmetricInterval) {
  const ConvexifyOptions opt;
  const double c0 = 0.25 * (1.0 - std::pow(2.0, -opt.eta));
  const GridSet S = line_set({{-1.0, 1.0}});
  const ConvexApprox C = convexify(S, opt);
  EXPECT_LE(C.measure, 4.0 * S.measure());
  EXPECT_GE(C.exclusion_constant, 0.5 * c0);
  EXPECT_TRUE(C.contains(vec({0.0})));
}

TEST(Convexify, PinnedEnds) {
  const GridSet S = line_set({{-8.5, -8.0}, {8.0, 8.5}});
  const ConvexApprox C = convexify(S, {});
  EXPECT_GE(C.measure, S.measure());
  // Both ends lie inside, so any centered interval of half the measure misses mass near +-8.
  EXPECT_TRUE(C.contains(vec({8.25})));
  EXPECT_TRUE(C.contains(vec({-8.25})));
  EXPECT_GT(C.exclusion_constant, 0.0);
}

TEST(Convexify, Disk) {
  const GridSet S = rasterize(EuclideanBallRegion(vec({0.0, 0.0}), 1.0), {1.0 / 32, 1.0 / 32});
  const ConvexApprox C = convexify(S, {});
  EXPECT_LE(C.measure, 4.0 * S.measure());
  EXPECT_GE(C.measure, 0.5 * S.measure());
  const ConvexApprox D = convex_from_json(to_json(C));
  EXPECT_DOUBLE_EQ(D.measure, C.measure);
}

TEST(Convexify, UnbalancedRecentres) {
  const GridSet S = line_set({{5.0, 7.0}});
  ConvexifyOptions opt;
  opt.balanced = false;
  const ConvexApprox C = convexify(S, opt);
  EXPECT_NEAR(C.center_offset(0), 6.0, 1.0 / 32);
  EXPECT_TRUE(C.contains(vec({6.0})));
}

TEST(Mvee, SquareCorners) {
  const Ellipsoid e = mvee({vec({1.0, 1.0}), vec({-1.0, 1.0}), vec({1.0, -1.0}), vec({-1.0, -1.0})}, 1e-9);
  EXPECT_LT(e.center.norm(), 1e-6);
  for (int k = 0; k < 2; ++k) EXPECT_NEAR(e.radii(k), std::sqrt(2.0), 1e-4);
}

TEST(DetMoment, LebesgueInterval) {
  const GridSet S = line_set({{-1.0, 1.0}}, 1.0 / 512);
  const DetMomentResult r = det_moment(lebesgue_points(S), centered_box(1, 1.0), 0.25, 1.0, 1.0, 5, 200000);
  EXPECT_NEAR(r.estimate, 1.0, 3.0 * r.std_error + 1e-5);
  EXPECT_TRUE(r.hypothesis_ok);
}

TEST(DetMoment, ConcentratedMassFlagged) {
  const GridSet S = line_set({{-0.05, 0.05}}, 1.0 / 512);
  const DetMomentResult r = det_moment(lebesgue_points(S), centered_box(1, 1.0), 0.25, 0.05, 1.0, 5, 10000);
  EXPECT_FALSE(r.hypothesis_ok);
  EXPECT_LT(r.min_outside, 0.05);
}

TEST(DetMoment, SquareAgainstContinuousOracle) {
  const GridSet S = square(-0.5, 0.5, 1.0 / 128);
  const DetMomentResult r = det_moment(lebesgue_points(S), centered_box(2, 0.5), 0.25, 1.0, 1.0, 7, 1000000);
  CounterRng rng(8);
  const std::size_t m = 1000000;
  double sum = 0.0, sq = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double a = rng.uniform(-0.5, 0.5), b = rng.uniform(-0.5, 0.5), c = rng.uniform(-0.5, 0.5),
                 d = rng.uniform(-0.5, 0.5);
    const double v = std::abs(a * d - b * c);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / m, se = std::sqrt((sq / m - mean * mean) / m);
  EXPECT_NEAR(r.estimate, mean, 3.0 * std::hypot(se, r.std_error));
}

TEST(Extract, UnitBallRoundTrip) {
  const EnvelopeRaster& ras = unit_tower().ras;
  const ExtractReport r = extract_ball(ras.E, ras.Estar, {});
  EXPECT_GE(r.retention, 0.5);
  EXPECT_GE(r.envelope_ratio_E, 1.0 / 8);
  EXPECT_LE(r.envelope_ratio_E, 8.0);
  EXPECT_GE(r.envelope_ratio_Estar, 1.0 / 8);
  EXPECT_LE(r.envelope_ratio_Estar, 8.0);
  for (int j = 0; j < 1; ++j) EXPECT_NEAR(r.ball.r(j) * r.ball.r_star(j), r.ball.rho, 1e-9 * r.ball.rho);
}
