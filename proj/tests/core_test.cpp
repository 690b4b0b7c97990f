#include <gtest/gtest.h>

#include <cmath>

#include "rlt/core/error.hpp"
#include "rlt/core/grid_function.hpp"
#include "rlt/core/io.hpp"
#include "rlt/core/region.hpp"
#include "rlt/core/rng.hpp"

using namespace rlt;

namespace {

GridGeometry unit_cube_grid(int d, std::int64_t n = 10) {
  return GridGeometry(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0 / n), std::vector<std::int64_t>(d, n));
}

GridSet full(const GridGeometry& g) {
  return GridSet::from_dense(g, std::vector<std::uint8_t>(g.column_count() * g.depth(), 1));
}

}  // namespace

TEST(Philox, KnownAnswers) {
  auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(zero[0], 0x6627e8d5u);
  EXPECT_EQ(zero[1], 0xe169c58du);
  EXPECT_EQ(zero[2], 0xbc57ac4cu);
  EXPECT_EQ(zero[3], 0x9b00dbd8u);
  auto ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(ones[0], 0x408f276du);
  EXPECT_EQ(ones[1], 0x41c83b0eu);
  EXPECT_EQ(ones[2], 0xa20bc7c6u);
  EXPECT_EQ(ones[3], 0x6d5451fdu);
}

TEST(CounterRng, StreamsAreDisjointAndRepeatable) {
  CounterRng a(7, 0), b(7, 0), c(7, 1);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_NE(x, c.uniform());
  }
}

TEST(GridSet, MeasureExamples) {
  for (int d : {2, 3}) {
    const auto g = unit_cube_grid(d);
    EXPECT_EQ(GridSet(g).measure(), 0.0);
    EXPECT_NEAR(full(g).measure(), 1.0, 1e-12);
    std::vector<std::uint8_t> half(g.column_count() * g.depth(), 0);
    for (std::size_t i = 0; i < half.size(); i += 2) half[i] = 1;
    EXPECT_NEAR(GridSet::from_dense(g, half).measure(), 0.5, 1e-12);
  }
}

TEST(GridSet, ZeroSizedAxisRejected) {
  EXPECT_THROW(GridGeometry({0.0, 0.0}, {1.0, 1.0}, {3, 0}), Error);
}

TEST(GridSet, Contains) {
  const auto s = full(unit_cube_grid(3));
  EXPECT_TRUE(s.contains(to_vec({0.5, 0.5, 0.5})));
  EXPECT_FALSE(s.contains(to_vec({2.0, 0.0, 0.0})));
  // Lower faces belong to the voxel, upper faces of the last voxel do not.
  EXPECT_TRUE(s.contains(to_vec({0.0, 0.0, 0.0})));
  EXPECT_FALSE(s.contains(to_vec({1.0, 0.5, 0.5})));
  std::vector<std::uint8_t> occ(1000, 0);
  occ[0] = 1;  // voxel [0, 0.1)^3
  const auto one = GridSet::from_dense(unit_cube_grid(3), occ);
  EXPECT_TRUE(one.contains(to_vec({0.05, 0.05, 0.0})));
  EXPECT_FALSE(one.contains(to_vec({0.05, 0.05, 0.1})));
}

TEST(GridSet, SampleUniform) {
  const auto s = full(unit_cube_grid(2));
  EXPECT_THROW(GridSet(unit_cube_grid(2)).sample_uniform(1, 10), Error);
  const std::size_t n = 100000;
  const auto pts = s.sample_uniform(42, n);
  ASSERT_EQ(pts.size(), n);
  Vec mean = Vec::Zero(2);
  for (const auto& p : pts) {
    EXPECT_TRUE(s.contains(p));
    mean += p;
  }
  mean /= static_cast<double>(n);
  // Uniform variance 1/12; 3 sigma of the sample mean.
  const double tol = 3.0 * std::sqrt(1.0 / 12.0 / n);
  EXPECT_NEAR(mean(0), 0.5, tol);
  EXPECT_NEAR(mean(1), 0.5, tol);
  const auto again = s.sample_uniform(42, n);
  for (std::size_t i = 0; i < n; i += 997) EXPECT_EQ(pts[i], again[i]);
}

TEST(GridSet, SampledPointsAreMembersOfSparseSet) {
  const auto g = unit_cube_grid(3, 16);
  const auto s = rasterize(EuclideanBallRegion(to_vec({0.5, 0.5, 0.5}), 0.3), g);
  for (const auto& p : s.sample_uniform(3, 5000)) EXPECT_TRUE(s.contains(p));
}

TEST(GridSet, Restrict) {
  const auto s = full(unit_cube_grid(3));
  EXPECT_EQ(s.restrict([](const SpacePoint&) { return true; }), s);
  EXPECT_TRUE(s.restrict([](const SpacePoint&) { return false; }).empty());
  const auto half = s.restrict([](const SpacePoint& p) { return p(0) < 0.5; });
  // Centers 0.05 .. 0.45 pass: exactly 5 of 10 layers.
  EXPECT_NEAR(half.measure(), 0.5, 1e-12);
  const auto thin = s.restrict([](const SpacePoint& p) { return p(0) < 0.47; });
  EXPECT_LE(thin.measure(), s.measure());
  EXPECT_NEAR(thin.measure(), 0.47, 0.1);
}

TEST(GridSet, MeasureInvariantUnderLeadingPermutation) {
  GridGeometry g({0.0, -1.0, 2.0}, {0.1, 0.25, 0.05}, {7, 5, 13});
  const auto s = rasterize(EuclideanBallRegion(to_vec({0.3, -0.4, 2.3}), 0.3), g);
  const auto p = s.permute_leading_axes({1, 0});
  EXPECT_DOUBLE_EQ(p.measure(), s.measure());
  EXPECT_EQ(p.permute_leading_axes({1, 0}), s);
}

TEST(GridSet, SetAlgebra) {
  const auto g = unit_cube_grid(2, 20);
  const auto a = rasterize(BoxRegion({to_vec({0.0, 0.0}), to_vec({0.6, 0.6})}), g);
  const auto b = rasterize(BoxRegion({to_vec({0.4, 0.4}), to_vec({1.0, 1.0})}), g);
  const double i = a.intersect(b).measure();
  EXPECT_NEAR(a.unite(b).measure(), a.measure() + b.measure() - i, 1e-12);
  EXPECT_NEAR(a.subtract(b).measure(), a.measure() - i, 1e-12);
  EXPECT_NEAR(i, 0.04, 1e-12);
}

TEST(GridSet, JsonRoundTrip) {
  GridGeometry g({-1.0, 0.0, 0.5}, {0.2, 0.1, 0.05}, {10, 6, 40});
  const auto s = rasterize(EuclideanBallRegion(to_vec({0.0, 0.3, 1.5}), 0.45), g);
  const auto j = to_json(s);
  const auto back = grid_set_from_json(json::parse(j.dump()));
  EXPECT_EQ(back, s);
  EXPECT_EQ(back.dense(), s.dense());
  const auto empty = GridSet(g);
  EXPECT_EQ(grid_set_from_json(to_json(empty)), empty);
  EXPECT_EQ(to_json(empty)["occupancy_rle"].size(), 1u);
  const auto all = full(unit_cube_grid(2, 3));
  EXPECT_EQ(to_json(all)["occupancy_rle"], json::parse("[0, 9]"));
}

TEST(GridSet, RleStartsWithZeros) {
  std::vector<std::uint8_t> occ = {0, 1, 1, 0, 0, 0, 1, 1, 1};
  const auto s = GridSet::from_dense(unit_cube_grid(2, 3), occ);
  EXPECT_EQ(to_json(s)["occupancy_rle"], json::parse("[1, 2, 3, 3]"));
}

TEST(GridFunction, JsonRoundTripAndNorms) {
  GridGeometry g({0.0, 0.0}, {0.5, 0.5}, {2, 2});
  GridFunction f(g, {1.0, 2.0, 0.0, 4.0});
  EXPECT_NEAR(f.lp_mass(1.0), 7.0 * 0.25, 1e-12);
  const auto back = grid_function_from_json(json::parse(to_json(f).dump()));
  EXPECT_EQ(back.values(), f.values());
  EXPECT_THROW(GridFunction(g, {1.0, -1.0, 0.0, 0.0}), Error);
}

TEST(Region, RasterizedBoxIsExactOnAlignedGrid) {
  const auto s = rasterize(BoxRegion({to_vec({0.0, 0.0, 0.0}), to_vec({1.0, 0.5, 0.25})}), {0.05, 0.05, 0.05});
  EXPECT_NEAR(s.measure(), 0.125, 1e-12);
}
