#pragma once

#include <optional>
#include <vector>

#include "rlt/core/grid.hpp"

namespace rlt {

struct QuadratureSpec {
  // Step of the t-grid; unset means one node per source column.
  std::optional<double> t_resolution;
  // Truncation radius for |t|; unset derives it from bounding boxes.
  std::optional<double> t_bound;
};

// Per-axis subdivision of the source columns that realizes the t-grid.
// Throws ResolutionTooCoarse when the step exceeds the smallest leading spacing of the source.
std::vector<int> t_subdivisions(const GridGeometry& source, const QuadratureSpec& q);

}  // namespace rlt
