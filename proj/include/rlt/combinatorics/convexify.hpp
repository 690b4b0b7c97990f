#pragma once

#include <json.hpp>
#include <vector>

#include "rlt/core/grid_set.hpp"
#include "rlt/core/point.hpp"

namespace rlt {

struct Slab {
  Vec direction;  // unit vector
  double half_width = 0.0;
};

// center_offset + {x : |<x, direction_k>| <= half_width_k for all k}.
struct ConvexApprox {
  Vec center_offset;
  std::vector<Slab> slabs;
  double measure = 0.0;
  double exclusion_constant = 0.0;
  int m = 0;  // |C| = 2^m |S| at the stopping time (before rounding of the slab family)

  int dim() const { return static_cast<int>(center_offset.size()); }
  // Membership of a point in the translated set.
  bool contains(const Vec& p) const;
};

struct ConvexifyOptions {
  double eta = 0.5;
  bool balanced = true;  // false shifts S by its coordinate-wise median first
  double c0 = 0.0;       // 0 picks (1 - 2^{-eta}) / 4
};

// Halving stopping time over balanced slabs (n = 1) and 8-direction slab intersections (n = 2).
ConvexApprox convexify(const GridSet& S, const ConvexifyOptions& opt);

// Builds the convex set from slabs, with its measure (n <= 2).
ConvexApprox make_convex(const std::vector<Slab>& slabs, const Vec& center_offset);

// Vertices of the slab intersection (n = 2, counter-clockwise) or its two endpoints (n = 1), before translation.
std::vector<Vec> convex_vertices(const std::vector<Slab>& slabs, int n);

// Minimum-volume enclosing ellipsoid {x : (x - c)^T M (x - c) <= 1} (Khachiyan iteration).
struct Ellipsoid {
  Vec center;
  Mat M;
  Mat axes;   // columns are unit eigenvectors
  Vec radii;  // semi-axis lengths, matching the columns of `axes`
};

Ellipsoid mvee(const std::vector<Vec>& points, double tolerance = 1e-6);

nlohmann::json to_json(const ConvexApprox& c);
ConvexApprox convex_from_json(const nlohmann::json& j);

}  // namespace rlt
