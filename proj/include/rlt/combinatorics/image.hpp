#pragma once

#include "rlt/combinatorics/tower.hpp"
#include "rlt/core/point.hpp"

namespace rlt {

// Measure of Phi(Omega~) = {(u, s.u) : s in Omega_1, u in F(s)} in R^d. The u axes of the raster are sampled at its
// column centers; along the last axis each s-voxel contributes its exact projection interval, so the slice measure is
// exact in s. Throws RasterOverflow when the image leaves the raster box.
double phi_image_measure(const TowerData& t, const GridGeometry& raster);

struct PhiImageReport {
  double measure = 0.0;
  double scale = 0.0;  // alpha*^{d/(d-1)} alpha^{1/(d-1)}
  double ratio = 0.0;
};

PhiImageReport phi_image_report(const TowerData& t, const GridGeometry& raster);

// A raster that contains the image of the tower with the given number of columns per u axis.
GridGeometry phi_image_raster(const TowerData& t, int cells_per_axis);

struct SlicingResult {
  double lhs = 0.0;  // |Phi(omega)|
  double rhs = 0.0;  // |det A|^{-1} int_omega |A u| du ds
};

// omega lives in R^{2(d-1)} with the s axes first and the u axes last. The s-marginal must lie in A(closed unit ball),
// checked on voxel corners (HypothesisViolated otherwise).
SlicingResult slicing_bound(const GridSet& omega, const Mat& A, const GridGeometry& raster);

GridGeometry slicing_raster(const GridSet& omega, int cells_per_axis);

}  // namespace rlt
