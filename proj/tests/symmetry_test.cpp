#include <gtest/gtest.h>

#include <cmath>

#include "rlt/balls/ball.hpp"
#include "rlt/core/error.hpp"
#include "rlt/core/rng.hpp"
#include "rlt/symmetry/symmetry.hpp"
#include "rlt/transform/incidence.hpp"

using namespace rlt;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Mat rot2(double a) {
  Mat R(2, 2);
  R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return R;
}

std::vector<IncidencePoint> random_incident(int d, int n, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<IncidencePoint> out;
  for (int i = 0; i < n; ++i) {
    Vec x(d), ys(d - 1);
    for (int k = 0; k < d; ++k) x(k) = rng.uniform(-3.0, 3.0);
    for (int k = 0; k < d - 1; ++k) ys(k) = rng.uniform(-3.0, 3.0);
    out.push_back(on_manifold(x, ys));
  }
  return out;
}

double distance(const IncidencePoint& a, const IncidencePoint& b) {
  return std::max((a.first - b.first).cwiseAbs().maxCoeff(), (a.second - b.second).cwiseAbs().maxCoeff());
}

constexpr SymmetryKind kKinds[] = {SymmetryKind::Translation, SymmetryKind::Shear, SymmetryKind::Rotation,
                                   SymmetryKind::ParabolicDilation, SymmetryKind::ShearedLinear};

}  // namespace

TEST(Shear, ZeroIsIdentity) {
  const SymmetryElement g = SymmetryElement::shear(vec({0.0, 0.0}));
  for (const IncidencePoint& z : random_incident(3, 100, 1)) EXPECT_EQ(distance(apply_pair(g, z), z), 0.0);
}

TEST(Shear, UnitShearOfOrigin) {
  const SymmetryElement g = SymmetryElement::shear(vec({1.0}));
  const IncidencePoint z = apply_pair(g, {vec({0.0, 0.0}), vec({0.0, 0.0})});
  EXPECT_TRUE(z.first.isApprox(vec({1.0, 1.0})));
  EXPECT_TRUE(z.second.isZero());
  EXPECT_EQ(z.residual(), 0.0);
}

TEST(Rotation, KeepsIncidence) {
  Mat R = Mat::Identity(2, 2);
  R.block(0, 0, 2, 2) = rot2(0.7);
  const SymmetryElement g = SymmetryElement::rotation(R);
  for (const IncidencePoint& z : random_incident(3, 100, 2)) {
    const IncidencePoint w = apply_pair(g, z);
    EXPECT_NEAR(w.first(2), z.first(2), 1e-15);
    EXPECT_TRUE(is_incident(w, 1e-12));
  }
}

TEST(ApplyBall, DilationScalesRadii) {
  CounterRng rng(3);
  for (int d : {2, 3}) {
    const BallParams b = make_ball({Vec::Zero(d), Vec::Zero(d)}, Mat::Identity(d - 1, d - 1), Vec::Constant(d - 1, 0.5),
                                   Vec::Constant(d - 1, 2.0));
    const BallParams c = apply_ball(SymmetryElement::parabolic_dilation(d, 3.0), b);
    EXPECT_TRUE(c.r.isApprox(3.0 * b.r));
    EXPECT_TRUE(c.r_star.isApprox(3.0 * b.r_star));
    EXPECT_NEAR(c.rho, 9.0 * b.rho, 1e-12);
    for (int j = 0; j < d - 1; ++j) EXPECT_NEAR(c.r(j) * c.r_star(j), c.rho, 1e-12);
  }
}

TEST(ApplyBall, ShearedLinearDiagonal) {
  const BallParams c = apply_ball(SymmetryElement::sheared_linear(2.0 * Mat::Identity(2, 2)), unit_ball(3));
  EXPECT_TRUE(c.r.isApprox(vec({2.0, 2.0})));
  EXPECT_TRUE(c.r_star.isApprox(vec({0.5, 0.5})));
  EXPECT_NEAR(c.rho, 1.0, 1e-12);
}

TEST(ApplyBall, NonOrthogonalImageRejected) {
  Mat A(2, 2);
  A << 1.0, 1.0, 0.0, 1.0;
  try {
    apply_ball(SymmetryElement::sheared_linear(A), unit_ball(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotBallPreserving);
  }
}

TEST(ApplyBall, TranslationKeepsIncidence) {
  const BallParams b = unit_ball(2);
  const BallParams c = apply_ball(SymmetryElement::translation(vec({0.3, -1.7})), b);
  const EnvelopeRaster rb = rasterize_envelope(b), rc = rasterize_envelope(c);
  const double ib = bilinear(rb.E, rb.Estar, {}), ic = bilinear(rc.E, rc.Estar, {});
  EXPECT_NEAR(ic, ib, 0.02 * ib);
}

TEST(Group, ShearInverse) {
  const SymmetryElement g = SymmetryElement::shear(vec({0.4, -1.1}));
  const SymmetryElement id = compose(g, SymmetryElement::shear(vec({-0.4, 1.1})));
  const SymmetryElement id2 = compose(inverse(g), g);
  for (const IncidencePoint& z : random_incident(3, 100, 4)) {
    EXPECT_LE(distance(apply_pair(id, z), z), 1e-12);
    EXPECT_LE(distance(apply_pair(id2, z), z), 1e-12);
  }
}

TEST(Group, RotationsCompose) {
  const SymmetryElement g = compose(SymmetryElement::rotation(rot2(0.3)), SymmetryElement::rotation(rot2(0.5)));
  const SymmetryElement h = SymmetryElement::rotation(rot2(0.8));
  for (const IncidencePoint& z : random_incident(3, 100, 5)) EXPECT_LE(distance(apply_pair(g, z), apply_pair(h, z)), 1e-12);
}

TEST(Group, WordsActByIteration) {
  for (int d : {2, 3}) {
    CounterRng rng(6);
    for (int w = 0; w < 10; ++w) {
      std::vector<SymmetryElement> gens;
      SymmetryElement word = SymmetryElement::identity(d);
      for (int k = 0; k < 5; ++k) {
        gens.push_back(random_generator(kKinds[rng.below(5)], d, rng.next_u64()));
        word = compose(gens.back(), word);
      }
      for (const IncidencePoint& z : random_incident(d, 1000, 7 + w)) {
        IncidencePoint it = z;
        for (const SymmetryElement& g : gens) it = apply_pair(g, it);
        const IncidencePoint direct = apply_pair(word, z);
        EXPECT_LE(distance(direct, it), 1e-8 * (1.0 + it.first.norm() + it.second.norm()));
        const IncidencePoint back = apply_pair(inverse(word), direct);
        EXPECT_LE(distance(back, z), 1e-8 * (1.0 + z.first.norm() + z.second.norm()));
      }
    }
  }
}

TEST(Invariance, GeneratorsAndComposite) {
  for (int d : {2, 3}) {
    EXPECT_EQ(check_invariance(SymmetryElement::identity(d), 1000, 1).max_residual, 0.0);
    SymmetryElement all = SymmetryElement::identity(d);
    for (SymmetryKind k : kKinds) {
      const SymmetryElement g = random_generator(k, d, 40 + static_cast<int>(k));
      const InvarianceReport r = check_invariance(g, 10000, 8);
      EXPECT_LE(r.max_residual, 1e-9);
      EXPECT_LE(r.scale_error, 0.01);
      all = compose(g, all);
    }
    EXPECT_LE(check_invariance(all, 10000, 9).max_residual, 1e-8);
  }
}

TEST(Invariance, JsonRoundTrip) {
  const SymmetryElement g = compose(random_generator(SymmetryKind::ShearedLinear, 3, 1),
                                    random_generator(SymmetryKind::Shear, 3, 2));
  const SymmetryElement h = element_from_json(to_json(g), 3);
  for (const IncidencePoint& z : random_incident(3, 50, 10)) EXPECT_LE(distance(apply_pair(g, z), apply_pair(h, z)), 1e-12);
}

TEST(BilinearCoordinates, ManifoldIsBilinear) {
  for (const IncidencePoint& z : random_incident(3, 100, 11)) {
    const BilinearCoordinates c = to_bilinear_coordinates(z);
    EXPECT_NEAR(c.tau_star - c.tau, 2.0 * c.xp.dot(c.yp), 1e-10);
  }
}
