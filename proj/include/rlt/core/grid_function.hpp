#pragma once

#include <vector>

#include "rlt/core/grid_set.hpp"

namespace rlt {

// Nonnegative voxelwise-constant function; values are row-major with the last axis fastest.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(GridGeometry geometry);
  GridFunction(GridGeometry geometry, std::vector<double> values);

  static GridFunction indicator(const GridSet& set, double value = 1.0);

  const GridGeometry& geometry() const { return geometry_; }
  int dim() const { return geometry_.dim; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double& at(std::int64_t column, std::int64_t k) { return values_[static_cast<std::size_t>(column * geometry_.depth() + k)]; }
  double at(std::int64_t column, std::int64_t k) const { return values_[static_cast<std::size_t>(column * geometry_.depth() + k)]; }
  // Value at an arbitrary point (0 outside the lattice).
  double operator()(const SpacePoint& p) const;

  // sum value^p * voxel volume.
  double lp_mass(double p) const;
  double lp_norm(double p) const;
  // sum of value * other over a shared geometry, times voxel volume.
  double inner(const GridFunction& other) const;
  GridSet support() const;

 private:
  GridGeometry geometry_;
  std::vector<double> values_;
};

}  // namespace rlt
