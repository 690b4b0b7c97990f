#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rlt/core/point.hpp"

namespace rlt {

struct Box {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const;
  bool contains(const Vec& p) const;
  Box expanded(double pad) const;
};

// Regular axis-aligned voxel lattice. Voxel i along axis k is [origin_k + i h_k, origin_k + (i+1) h_k).
// Columns are the lines along the last axis; they are indexed row-major over the first dim-1 axes.
struct GridGeometry {
  int dim = 0;
  std::vector<double> origin;
  std::vector<double> spacing;
  std::vector<std::int64_t> shape;

  GridGeometry() = default;
  GridGeometry(std::vector<double> origin, std::vector<double> spacing, std::vector<std::int64_t> shape);

  // Smallest lattice with the given spacing whose box contains `box`.
  static GridGeometry covering(const Box& box, const std::vector<double>& spacing);

  double voxel_volume() const;
  std::int64_t column_count() const;
  std::int64_t depth() const { return shape.back(); }
  double center(int axis, std::int64_t i) const { return origin[axis] + (static_cast<double>(i) + 0.5) * spacing[axis]; }
  // Voxel index along an axis, or nullopt outside the lattice.
  std::optional<std::int64_t> locate(int axis, double x) const;

  std::vector<std::int64_t> column_multi_index(std::int64_t col) const;
  std::int64_t column_linear_index(std::span<const std::int64_t> multi) const;
  // Center of a column in the first dim-1 coordinates.
  Vec column_center(std::int64_t col) const;
  std::optional<std::int64_t> column_of(const Vec& p) const;
  Box bounds() const;

  bool operator==(const GridGeometry& other) const = default;
};

}  // namespace rlt
