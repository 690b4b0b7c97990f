#include "rlt/core/region.hpp"

#include <algorithm>
#include <cmath>

#include "rlt/core/error.hpp"

namespace rlt {

GridSet rasterize(const Region& region, const GridGeometry& g) {
  if (region.dim() != g.dim) throw Error(ErrorKind::InvalidArgument, "region and grid dimensions differ");
  const int d = g.dim;
  const double o = g.origin[d - 1];
  const double h = g.spacing[d - 1];
  GridSetBuilder b(g);
  std::vector<Interval> intervals;
  const std::int64_t columns = g.column_count();
  for (std::int64_t c = 0; c < columns; ++c) {
    intervals.clear();
    region.column(g.column_center(c), intervals);
    for (const Interval& iv : intervals) {
      // Voxel k is kept when its center o + (k + 1/2) h lies strictly inside (lo, hi).
      const double a = (iv.lo - o) / h - 0.5;
      const double z = (iv.hi - o) / h - 0.5;
      const auto lo = static_cast<std::int64_t>(std::floor(a)) + 1;
      const auto hi = static_cast<std::int64_t>(std::ceil(z));
      if (lo < hi) b.add(c, lo, hi);
    }
  }
  return b.build();
}

GridSet rasterize(const Region& region, const std::vector<double>& spacing) {
  return rasterize(region, GridGeometry::covering(region.bounds(), spacing));
}

bool BoxRegion::contains(const SpacePoint& p) const {
  for (int i = 0; i < dim(); ++i)
    if (!(p(i) > box_.lo(i) && p(i) < box_.hi(i))) return false;
  return true;
}

void BoxRegion::column(const Vec& xp, std::vector<Interval>& out) const {
  for (int i = 0; i + 1 < dim(); ++i)
    if (!(xp(i) > box_.lo(i) && xp(i) < box_.hi(i))) return;
  out.push_back({box_.lo(dim() - 1), box_.hi(dim() - 1)});
}

Box EuclideanBallRegion::bounds() const {
  return {center_.array() - radius_, center_.array() + radius_};
}

void EuclideanBallRegion::column(const Vec& xp, std::vector<Interval>& out) const {
  const double r2 = radius_ * radius_ - (xp - head(center_)).squaredNorm();
  if (r2 <= 0.0) return;
  const double w = std::sqrt(r2);
  out.push_back({last(center_) - w, last(center_) + w});
}

UnionRegion::UnionRegion(std::vector<RegionPtr> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw Error(ErrorKind::InvalidArgument, "union of no regions");
  bounds_ = parts_.front()->bounds();
  for (const auto& r : parts_) {
    Box b = r->bounds();
    bounds_.lo = bounds_.lo.cwiseMin(b.lo);
    bounds_.hi = bounds_.hi.cwiseMax(b.hi);
  }
}

bool UnionRegion::contains(const SpacePoint& p) const {
  return std::any_of(parts_.begin(), parts_.end(), [&](const RegionPtr& r) { return r->contains(p); });
}

void UnionRegion::column(const Vec& xp, std::vector<Interval>& out) const {
  std::vector<Interval> all;
  for (const auto& r : parts_) r->column(xp, all);
  std::sort(all.begin(), all.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const Interval& iv : all) {
    if (!merged.empty() && merged.back().hi >= iv.lo)
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    else
      merged.push_back(iv);
  }
  out.insert(out.end(), merged.begin(), merged.end());
}

}  // namespace rlt
