#pragma once

#include <memory>
#include <vector>

#include "rlt/core/grid_set.hpp"

namespace rlt {

struct Interval {
  double lo;
  double hi;
};

// Analytic set whose vertical sections are finite unions of open intervals.
class Region {
 public:
  virtual ~Region() = default;
  virtual int dim() const = 0;
  virtual Box bounds() const = 0;
  virtual bool contains(const SpacePoint& p) const = 0;
  // Appends the x_d-intervals of the section over x'.
  virtual void column(const Vec& xp, std::vector<Interval>& out) const = 0;
};

using RegionPtr = std::shared_ptr<const Region>;

// Voxels whose centers lie in the region.
GridSet rasterize(const Region& region, const GridGeometry& geometry);

// Rasterizes on a lattice covering the region bounds with the given spacing.
GridSet rasterize(const Region& region, const std::vector<double>& spacing);

class BoxRegion : public Region {
 public:
  explicit BoxRegion(Box box) : box_(std::move(box)) {}
  int dim() const override { return box_.dim(); }
  Box bounds() const override { return box_; }
  bool contains(const SpacePoint& p) const override;
  void column(const Vec& xp, std::vector<Interval>& out) const override;

 private:
  Box box_;
};

class EuclideanBallRegion : public Region {
 public:
  EuclideanBallRegion(SpacePoint center, double radius) : center_(std::move(center)), radius_(radius) {}
  int dim() const override { return static_cast<int>(center_.size()); }
  Box bounds() const override;
  bool contains(const SpacePoint& p) const override { return (p - center_).squaredNorm() < radius_ * radius_; }
  void column(const Vec& xp, std::vector<Interval>& out) const override;

 private:
  SpacePoint center_;
  double radius_;
};

class UnionRegion : public Region {
 public:
  explicit UnionRegion(std::vector<RegionPtr> parts);
  int dim() const override { return parts_.front()->dim(); }
  Box bounds() const override { return bounds_; }
  bool contains(const SpacePoint& p) const override;
  void column(const Vec& xp, std::vector<Interval>& out) const override;

 private:
  std::vector<RegionPtr> parts_;
  Box bounds_;
};

}  // namespace rlt
