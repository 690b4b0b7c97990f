#include "rlt/combinatorics/image.hpp"

#include <algorithm>
#include <cmath>

#include "rlt/core/error.hpp"

namespace rlt {

namespace {

struct Interval1 {
  double lo;
  double hi;
};

// Per raster column, the union of the image intervals along the last axis.
class ImageAccumulator {
 public:
  explicit ImageAccumulator(const GridGeometry& raster)
      : g_(raster), n_(raster.dim - 1), cols_(static_cast<std::size_t>(raster.column_count())), box_(raster.bounds()) {}

  // Adds {(u, s.u) : s in s_box} for every raster column center u inside u_box.
  void add(const std::vector<Interval1>& s_box, const std::vector<Interval1>& u_box) {
    std::vector<std::int64_t> lo(n_), hi(n_);
    for (int k = 0; k < n_; ++k) {
      if (u_box[k].lo < box_.lo(k) - 1e-12 || u_box[k].hi > box_.hi(k) + 1e-12)
        throw Error(ErrorKind::RasterOverflow, "image leaves the raster along axis " + std::to_string(k));
      // Column centers c_i = o + (i + 1/2) h with lo <= c_i < hi.
      lo[k] = static_cast<std::int64_t>(std::ceil((u_box[k].lo - g_.origin[k]) / g_.spacing[k] - 0.5));
      hi[k] = static_cast<std::int64_t>(std::ceil((u_box[k].hi - g_.origin[k]) / g_.spacing[k] - 0.5));
      lo[k] = std::max<std::int64_t>(lo[k], 0);
      hi[k] = std::min<std::int64_t>(hi[k], g_.shape[k]);
      if (lo[k] >= hi[k]) return;
    }
    std::vector<std::int64_t> idx = lo;
    while (true) {
      double a = 0.0, b = 0.0;
      for (int k = 0; k < n_; ++k) {
        const double u = g_.center(k, idx[k]);
        const double p = s_box[k].lo * u, q = s_box[k].hi * u;
        a += std::min(p, q);
        b += std::max(p, q);
      }
      if (a < box_.lo(n_) - 1e-12 || b > box_.hi(n_) + 1e-12)
        throw Error(ErrorKind::RasterOverflow, "image leaves the raster along the last axis");
      cols_[static_cast<std::size_t>(g_.column_linear_index(idx))].push_back({a, b});
      int k = n_ - 1;
      while (k >= 0 && ++idx[k] == hi[k]) idx[k] = lo[k], --k;
      if (k < 0) break;
    }
  }

  double measure() {
    double cell = 1.0;
    for (int k = 0; k < n_; ++k) cell *= g_.spacing[k];
    double total = 0.0;
    for (auto& c : cols_) {
      if (c.empty()) continue;
      std::sort(c.begin(), c.end(), [](const Interval1& x, const Interval1& y) { return x.lo < y.lo; });
      double cur_lo = c.front().lo, cur_hi = c.front().hi, len = 0.0;
      for (const Interval1& iv : c) {
        if (iv.lo > cur_hi) {
          len += cur_hi - cur_lo;
          cur_lo = iv.lo;
        }
        cur_hi = std::max(cur_hi, iv.hi);
      }
      len += cur_hi - cur_lo;
      total += len * cell;
    }
    return total;
  }

 private:
  const GridGeometry& g_;
  int n_;
  std::vector<std::vector<Interval1>> cols_;
  Box box_;
};

// Calls fn(box) for every occupied voxel, the box given per axis.
template <typename Fn>
void for_each_box(const GridSet& s, Fn fn) {
  const GridGeometry& g = s.geometry();
  const int d = g.dim;
  std::vector<Interval1> box(d);
  for (std::size_t slot = 0; slot < s.column_slots(); ++slot) {
    const auto multi = g.column_multi_index(s.column_id(slot));
    for (int k = 0; k + 1 < d; ++k) {
      const double lo = g.origin[k] + static_cast<double>(multi[k]) * g.spacing[k];
      box[k] = {lo, lo + g.spacing[k]};
    }
    for (const Run& r : s.column_runs(slot))
      for (std::int64_t i = r.lo; i < r.hi; ++i) {
        const double lo = g.origin[d - 1] + static_cast<double>(i) * g.spacing[d - 1];
        box[d - 1] = {lo, lo + g.spacing[d - 1]};
        fn(box);
      }
  }
}

std::vector<Interval1> s_box_of(const GridGeometry& g, std::int64_t index) {
  const Vec c = voxel_center(g, index);
  std::vector<Interval1> box(g.dim);
  for (int k = 0; k < g.dim; ++k) box[k] = {c(k) - 0.5 * g.spacing[k], c(k) + 0.5 * g.spacing[k]};
  return box;
}

GridGeometry raster_for(const std::vector<Interval1>& u_range, double v_extent, int cells) {
  if (cells < 1) throw Error(ErrorKind::InvalidArgument, "raster needs at least one cell per axis");
  const int n = static_cast<int>(u_range.size());
  std::vector<double> origin, spacing;
  std::vector<std::int64_t> shape;
  for (int k = 0; k < n; ++k) {
    const double pad = 1e-9 * (1.0 + u_range[k].hi - u_range[k].lo);
    const double lo = u_range[k].lo - pad, hi = u_range[k].hi + pad;
    origin.push_back(lo);
    spacing.push_back((hi - lo) / cells);
    shape.push_back(cells);
  }
  const double v = 1.01 * v_extent + 1e-9;
  origin.push_back(-v);
  spacing.push_back(2.0 * v);
  shape.push_back(1);
  return GridGeometry(origin, spacing, shape);
}

}  // namespace

double phi_image_measure(const TowerData& t, const GridGeometry& raster) {
  if (t.fibers.empty()) return 0.0;
  if (raster.dim != t.dim()) throw Error(ErrorKind::InvalidArgument, "raster dimension must equal d");
  ImageAccumulator acc(raster);
  for (const TowerFiber& f : t.fibers) {
    const auto s_box = s_box_of(t.omega1.geometry(), f.s_voxel);
    for_each_box(f.set, [&](const std::vector<Interval1>& u_box) { acc.add(s_box, u_box); });
  }
  return acc.measure();
}

PhiImageReport phi_image_report(const TowerData& t, const GridGeometry& raster) {
  PhiImageReport r;
  const double d = t.dim();
  r.measure = phi_image_measure(t, raster);
  r.scale = std::pow(t.alpha_star, d / (d - 1.0)) * std::pow(t.alpha, 1.0 / (d - 1.0));
  r.ratio = r.scale > 0.0 ? r.measure / r.scale : 0.0;
  return r;
}

GridGeometry phi_image_raster(const TowerData& t, int cells_per_axis) {
  const int n = t.dim() - 1;
  std::vector<Interval1> u_range(n, {INFINITY, -INFINITY});
  std::vector<double> s_max(n, 0.0), u_max(n, 0.0);
  for (const TowerFiber& f : t.fibers) {
    const auto s_box = s_box_of(t.omega1.geometry(), f.s_voxel);
    const Box b = f.set.occupied_bounds();
    for (int k = 0; k < n; ++k) {
      u_range[k].lo = std::min(u_range[k].lo, b.lo(k));
      u_range[k].hi = std::max(u_range[k].hi, b.hi(k));
      s_max[k] = std::max({s_max[k], std::abs(s_box[k].lo), std::abs(s_box[k].hi)});
    }
  }
  if (t.fibers.empty()) u_range.assign(n, {-1.0, 1.0});
  double v = 0.0;
  for (int k = 0; k < n; ++k) v += s_max[k] * std::max(std::abs(u_range[k].lo), std::abs(u_range[k].hi));
  return raster_for(u_range, v, cells_per_axis);
}

SlicingResult slicing_bound(const GridSet& omega, const Mat& A, const GridGeometry& raster) {
  const int n = omega.dim() / 2;
  if (omega.dim() != 2 * n || n < 1) throw Error(ErrorKind::InvalidArgument, "omega must live in R^{2(d-1)}");
  if (A.rows() != n || A.cols() != n) throw Error(ErrorKind::InvalidArgument, "A must be (d-1) x (d-1)");
  if (!A.isApprox(A.transpose(), 1e-12)) throw Error(ErrorKind::InvalidArgument, "A must be symmetric");
  const double det = A.determinant();
  if (!(std::abs(det) > 1e-300)) throw Error(ErrorKind::NonInvertible, "A is singular");
  SlicingResult res;
  if (omega.empty()) return res;
  if (raster.dim != n + 1) throw Error(ErrorKind::InvalidArgument, "raster dimension must equal d");
  const Mat A_inv = A.inverse();
  ImageAccumulator acc(raster);
  const double vol = omega.geometry().voxel_volume();
  std::vector<Interval1> s_box(n), u_box(n);
  Vec corner(n), uc(n);
  for_each_box(omega, [&](const std::vector<Interval1>& box) {
    for (int k = 0; k < n; ++k) {
      s_box[k] = box[k];
      u_box[k] = box[n + k];
      uc(k) = 0.5 * (u_box[k].lo + u_box[k].hi);
    }
    for (int c = 0; c < (1 << n); ++c) {
      for (int k = 0; k < n; ++k) corner(k) = (c >> k) & 1 ? s_box[k].hi : s_box[k].lo;
      if ((A_inv * corner).norm() > 1.0 + 1e-9)
        throw Error(ErrorKind::HypothesisViolated, "s-marginal leaves A(unit ball)");
    }
    res.rhs += vol * (A * uc).norm();
    acc.add(s_box, u_box);
  });
  res.rhs /= std::abs(det);
  res.lhs = acc.measure();
  return res;
}

GridGeometry slicing_raster(const GridSet& omega, int cells_per_axis) {
  const int n = omega.dim() / 2;
  if (omega.empty()) return raster_for(std::vector<Interval1>(n, {-1.0, 1.0}), 1.0, cells_per_axis);
  const Box b = omega.occupied_bounds();
  std::vector<Interval1> u_range(n);
  double v = 0.0;
  for (int k = 0; k < n; ++k) {
    u_range[k] = {b.lo(n + k), b.hi(n + k)};
    v += std::max(std::abs(b.lo(k)), std::abs(b.hi(k))) * std::max(std::abs(b.lo(n + k)), std::abs(b.hi(n + k)));
  }
  return raster_for(u_range, v, cells_per_axis);
}

}  // namespace rlt
