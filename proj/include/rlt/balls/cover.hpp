#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "rlt/balls/ball.hpp"
#include "rlt/symmetry/symmetry.hpp"

namespace rlt {

// Symmetry mapping the unit ball onto b.
SymmetryElement normalizing_symmetry(const BallParams& b);

// Sub-balls of radii eta = delta^{1/(d+1)}, rho = eta^2 on a lattice over the (x', x_d, x*') parameters of the
// normalized ball: spacing sigma1 eta in x', x*' and sigma2 eta^2 in x_d, with sigma1 = s * 0.8 / sqrt(d-1),
// sigma2 = 1.28 s^2 for the net scale s. Every point of the ball lies in some sub-ball when s < 1.02.
class BallCover {
 public:
  BallCover(const BallParams& b, double delta, double net_scale = 1.0);

  const std::vector<BallParams>& balls() const { return balls_; }
  double eta() const { return eta_; }
  // Index of a sub-ball containing z, if any.
  std::optional<std::size_t> find(const IncidencePoint& z) const;

 private:
  std::uint64_t key(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b, std::int64_t k) const;

  BallParams parent_;
  SymmetryElement g_;
  SymmetryElement g_inv_;
  double eta_ = 1.0;
  std::int64_t n1_ = 1;
  double s1_ = 2.0;
  double sd_ = 1.0;
  std::vector<BallParams> balls_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

std::vector<BallParams> cover(const BallParams& b, double delta, double net_scale = 1.0);

// Uniform sample of the ball in its (x', x_d, x*') parametrization.
std::vector<IncidencePoint> sample_ball(const BallParams& b, std::size_t n, std::uint64_t seed);

double cover_coverage(const BallCover& c, const std::vector<IncidencePoint>& points);

}  // namespace rlt
