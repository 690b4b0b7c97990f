#pragma once

#include <json.hpp>

#include "rlt/balls/ball.hpp"
#include "rlt/combinatorics/convexify.hpp"
#include "rlt/combinatorics/tower.hpp"

namespace rlt {

struct ExtractOptions {
  double eta = 0.5;  // exponent of the convexification stopping time
};

struct ExtractReport {
  BallParams ball;
  double envelope_ratio_E = 0.0;      // |B_env| / |E|
  double envelope_ratio_Estar = 0.0;  // |B*_env| / |E*|
  double retention = 0.0;             // T(E cap B_env, E* cap B*_env) / T(E, E*)
  double incidence = 0.0;
  double retained_incidence = 0.0;
  ConvexApprox fiber_hull;  // convexified union of the fibers (the x' frame of the ball)
  ConvexApprox s_hull;      // convexified Omega_1 (the dual radii)
  SpacePoint base_point;
};

// Tower -> convexified fiber union -> enclosing ellipsoid (frame e_j, radii r_j) -> rho from the convexified Omega_1
// with r_j r*_j = rho. The ball is centered at the fiber-hull center on the x side and at x_bar - (s_bar, |s_bar|^2)
// on the x* side.
ExtractReport extract_ball(const GridSet& E, const GridSet& Estar, const QuadratureSpec& q, const ExtractOptions& opt = {});

nlohmann::json to_json(const ExtractReport& r);

}  // namespace rlt
