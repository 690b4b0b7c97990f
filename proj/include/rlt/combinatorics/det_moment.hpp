#pragma once

#include <cstdint>
#include <vector>

#include "rlt/combinatorics/convexify.hpp"

namespace rlt {

struct WeightedPoints {
  std::vector<Vec> points;
  std::vector<double> weights;

  double total() const;
};

// Occupied voxel centers of S weighted by the voxel volume (Lebesgue measure restricted to S).
WeightedPoints lebesgue_points(const GridSet& S);

struct DetMomentResult {
  double estimate = 0.0;   // int_{C^n} |det(u_1 .. u_n)| prod d mu(u_i)
  double std_error = 0.0;
  double bound = 0.0;      // c delta^n lambda^n |C|
  bool ok = false;         // estimate >= bound
  bool hypothesis_ok = true;
  double min_outside = 0.0;  // smallest mu(C \ C') over the tested slabs C' with |C' cap C| = delta |C|
};

// Smallest mu-mass outside a centered slab {|<x, theta>| < w} cut to measure delta |C| (n = 1: a centered interval),
// over `directions` equally spaced directions.
double slab_exclusion_mass(const WeightedPoints& mu, const ConvexApprox& C, double delta, int directions = 64);

// Monte Carlo over m independent n-tuples drawn from mu / mu(total). Supports n in {1, 2}.
DetMomentResult det_moment(const WeightedPoints& mu, const ConvexApprox& C, double delta, double lambda, double c,
                           std::uint64_t seed, std::size_t m);

}  // namespace rlt
