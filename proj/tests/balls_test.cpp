#include <gtest/gtest.h>

#include <cmath>

#include "rlt/balls/ball.hpp"
#include "rlt/balls/cover.hpp"
#include "rlt/core/error.hpp"
#include "rlt/core/rng.hpp"
#include "rlt/experiment/generators.hpp"
#include "rlt/experiment/suites.hpp"

using namespace rlt;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

BallParams origin_ball(const Vec& r, const Vec& rs) {
  const int d = static_cast<int>(r.size()) + 1;
  return make_ball({Vec::Zero(d), Vec::Zero(d)}, Mat::Identity(d - 1, d - 1), r, rs);
}

}  // namespace

TEST(MakeBall, DualRadii) {
  const BallParams b = origin_ball(vec({2.0}), vec({0.5}));
  EXPECT_DOUBLE_EQ(b.rho, 1.0);
  EXPECT_EQ(kind_of([] { origin_ball(vec({1.0, 1.0}), vec({1.0, 2.0})); }), ErrorKind::DualityViolated);
  EXPECT_EQ(kind_of([] { make_ball({vec({0.0, 0.0}), vec({0.0, 1.0})}, Mat::Identity(1, 1), vec({1.0}), vec({1.0})); }),
            ErrorKind::OffManifold);
  Mat skew(2, 2);
  skew << 1.0, 0.1, 0.0, 1.0;
  EXPECT_EQ(kind_of([&] { make_ball({Vec::Zero(3), Vec::Zero(3)}, skew, vec({1.0, 1.0}), vec({1.0, 1.0})); }),
            ErrorKind::BasisNotOrthonormal);
}

TEST(MakeBall, JsonRoundTrip) {
  CounterRng rng(5);
  const BallParams b = random_ball(3, rng);
  const BallParams c = ball_from_json(to_json(b));
  EXPECT_TRUE(c.center.first.isApprox(b.center.first));
  EXPECT_TRUE(c.r_star.isApprox(b.r_star));
  EXPECT_DOUBLE_EQ(c.rho, b.rho);
}

TEST(BallMembership, Examples) {
  const BallParams b = unit_ball(2);
  EXPECT_TRUE(ball_membership(b, b.center));
  EXPECT_FALSE(ball_membership(b, on_manifold(vec({2.0, 4.0}), vec({2.0}))));
  IncidencePoint off = b.center;
  off.second(1) += 10.0 * b.rho;
  EXPECT_FALSE(ball_membership(b, off));
}

TEST(Envelope, ProductFormula) {
  const EnvelopePair u = envelope(unit_ball(2));
  EXPECT_DOUBLE_EQ(u.measure_E, 4.0);
  EXPECT_DOUBLE_EQ(u.measure_Estar, 4.0);
  EXPECT_NEAR(u.E_env->exact_measure(), 4.0, 1e-12);
  const EnvelopePair a = envelope(origin_ball(vec({2.0, 0.5}), vec({0.5, 2.0})));
  EXPECT_DOUBLE_EQ(a.measure_E, 8.0);
  EXPECT_DOUBLE_EQ(a.measure_Estar, 8.0);
}

TEST(Envelope, RasterErrorWithinPerimeterBound) {
  CounterRng rng(17);
  for (int i = 0; i < 5; ++i) {
    const BallParams b = random_ball(2, rng);
    const EnvelopePair env = envelope(b);
    const EnvelopeRaster ras = rasterize_envelope(b);
    const auto& h = ras.E.geometry().spacing;
    // Perimeter: two slab sheets along the box plus two vertical sides of height 2 rho.
    const Box bb = env.E_env->bounds();
    double arc = 0.0, prev = NAN;
    const int steps = 20000;
    for (int k = 0; k <= steps; ++k) {
      const double x = bb.lo(0) + (bb.hi(0) - bb.lo(0)) * k / steps;
      if (!env.E_env->in_box(vec({x}))) {
        prev = NAN;
        continue;
      }
      const double y = env.E_env->slab_center(vec({x}));
      if (!std::isnan(prev)) arc += std::hypot((bb.hi(0) - bb.lo(0)) / steps, y - prev);
      prev = y;
    }
    const double perimeter = 2.0 * arc + 4.0 * b.rho;
    EXPECT_LE(std::abs(ras.E.measure() - env.measure_E), 3.0 * std::max(h[0], h[1]) * perimeter) << "ball " << i;
  }
}

TEST(Quasiextremal, UnitBallMatchesOracle) {
  const double c0 = c0_oracle(2);
  EXPECT_NEAR(verify_quasiextremal(unit_ball(2), {}).epsilon, c0, 0.02 * c0);
}

TEST(Quasiextremal, DilationInvariance) {
  const double ref = verify_quasiextremal(origin_ball(vec({1.5}), vec({0.5})), {}).epsilon;
  for (double l : {0.5, 2.0}) {
    const double e = verify_quasiextremal(origin_ball(vec({1.5 * l}), vec({0.5 * l})), {}).epsilon;
    EXPECT_NEAR(e, ref, 0.02 * ref) << "lambda " << l;
  }
}

TEST(Quasiextremal, AnisotropicInvarianceD3) {
  const double ref = verify_quasiextremal(unit_ball(3), {}).epsilon;
  const double e = verify_quasiextremal(origin_ball(vec({4.0, 1.0}), vec({0.25, 1.0})), {}).epsilon;
  EXPECT_NEAR(e, ref, 0.02 * ref);
}

TEST(ShrunkSlice, FullBoxAtCenter) {
  CounterRng rng(23);
  for (int d : {2, 3}) {
    const BallParams b = random_ball(d, rng);
    const double full = std::pow(2.0, d - 1) * b.r_star.prod();
    EXPECT_NEAR(shrunk_slice_measure(b, 0.1, b.center.first, {}), full, 1e-12 * full);
    const double edge = 1.0 / (2.0 * (2 * d - 1));
    EXPECT_NEAR(shrunk_slice_measure(b, edge, b.center.first, {}), full, 1e-12 * full);
  }
}

TEST(ShrunkSlice, OutsideRejected) {
  const BallParams b = unit_ball(2);
  const SpacePoint far = vec({0.9, 0.0});
  EXPECT_FALSE(in_shrunk_set(b, 0.1, far));
  EXPECT_EQ(kind_of([&] { shrunk_slice_measure(b, 0.1, far, {}); }), ErrorKind::NotInShrunkSet);
}

TEST(Cover, DeltaOne) {
  const BallParams b = unit_ball(2);
  const auto c = cover(b, 1.0);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_DOUBLE_EQ(c[0].rho, b.rho);
  EXPECT_EQ(kind_of([&] { cover(b, 0.0); }), ErrorKind::DeltaOutOfRange);
  EXPECT_EQ(kind_of([&] { cover(b, 1.5); }), ErrorKind::DeltaOutOfRange);
}

TEST(Cover, SubBallMeasureAndCoverage) {
  CounterRng rng(29);
  const BallParams b = random_ball(2, rng);
  const double delta = 1.0 / 16;
  const BallCover c(b, delta);
  const double parent = envelope(b).measure_E;
  for (const BallParams& s : c.balls()) EXPECT_NEAR(envelope(s).measure_E, delta * parent, 1e-9 * parent);
  EXPECT_GE(cover_coverage(c, sample_ball(b, 100000, 31)), 0.999);
}

TEST(Cover, SamplesLieInBall) {
  const BallParams b = unit_ball(3);
  for (const IncidencePoint& z : sample_ball(b, 1000, 37)) {
    EXPECT_TRUE(ball_membership(b, z));
    EXPECT_TRUE(is_incident(z, 1e-9));
  }
}
