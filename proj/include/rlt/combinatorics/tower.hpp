#pragma once

#include <cstdint>
#include <json.hpp>
#include <vector>

#include "rlt/core/grid_set.hpp"
#include "rlt/transform/quadrature.hpp"

namespace rlt {

// A fiber F(s) = {u : x_bar - (s,|s|^2) + (s+u, |s+u|^2) in E}, stored over the u = t - s coordinates.
struct TowerFiber {
  std::int64_t s_voxel = 0;  // linear voxel index in the omega1 lattice
  GridSet set;
};

// Two-generation tower rooted at base_point in E. Omega_1 lives on an s-lattice aligned with the E* columns and
// every fiber on a u-lattice aligned with the E columns, so memberships hold for every point of a kept voxel.
struct TowerData {
  SpacePoint base_point;
  GridSet omega1;
  std::vector<TowerFiber> fibers;  // sorted by s_voxel
  double alpha = 0.0;
  double alpha_star = 0.0;

  int dim() const { return static_cast<int>(base_point.size()); }
  // Fiber of the s-voxel containing s, or nullptr.
  const GridSet* fiber_at(const Vec& s) const;
  double fiber_measure() const;
};

constexpr double kTowerFiberFraction = 0.5;

TowerData build_tower(const GridSet& E, const GridSet& Estar, const QuadratureSpec& q);

struct InclusionReport {
  std::size_t checked = 0;
  std::size_t first_failures = 0;   // x_bar - (s,|s|^2) not in E*
  std::size_t second_failures = 0;  // x_bar - (s,|s|^2) + (t,|t|^2) not in E
};

// Random (s, t) with s uniform on Omega_1 and t - s uniform on the fiber.
InclusionReport verify_tower_inclusions(const TowerData& t, const GridSet& E, const GridSet& Estar, std::size_t n,
                                        std::uint64_t seed);

// Linear voxel index of a point, or -1 outside the lattice.
std::int64_t voxel_index(const GridGeometry& g, const Vec& p);
Vec voxel_center(const GridGeometry& g, std::int64_t index);

nlohmann::json to_json(const TowerData& t);
TowerData tower_from_json(const nlohmann::json& j);

}  // namespace rlt
