#include "rlt/core/grid.hpp"

#include <cmath>

#include "rlt/core/error.hpp"

namespace rlt {

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= std::max(0.0, hi(i) - lo(i));
  return v;
}

bool Box::contains(const Vec& p) const {
  for (int i = 0; i < dim(); ++i)
    if (p(i) < lo(i) || p(i) > hi(i)) return false;
  return true;
}

Box Box::expanded(double pad) const {
  Box b = *this;
  b.lo.array() -= pad;
  b.hi.array() += pad;
  return b;
}

GridGeometry::GridGeometry(std::vector<double> o, std::vector<double> h, std::vector<std::int64_t> n)
    : dim(static_cast<int>(o.size())), origin(std::move(o)), spacing(std::move(h)), shape(std::move(n)) {
  if (dim < 1 || spacing.size() != origin.size() || shape.size() != origin.size())
    throw Error(ErrorKind::InvalidArgument, "grid geometry arrays must share a positive length");
  for (int k = 0; k < dim; ++k) {
    if (!(spacing[k] > 0.0) || !std::isfinite(spacing[k]) || !std::isfinite(origin[k]))
      throw Error(ErrorKind::InvalidArgument, "grid spacing must be positive and finite");
    if (shape[k] <= 0) throw Error(ErrorKind::InvalidArgument, "grid shape axes must be positive");
  }
}

GridGeometry GridGeometry::covering(const Box& box, const std::vector<double>& h) {
  std::vector<double> o(h.size());
  std::vector<std::int64_t> n(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const double extent = box.hi(i) - box.lo(i);
    n[k] = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(extent / h[k] - 1e-9)));
    // Center the lattice on the box so both ends get the same slack.
    o[k] = 0.5 * (box.lo(i) + box.hi(i)) - 0.5 * static_cast<double>(n[k]) * h[k];
  }
  return GridGeometry(std::move(o), h, std::move(n));
}

double GridGeometry::voxel_volume() const {
  double v = 1.0;
  for (double h : spacing) v *= h;
  return v;
}

std::int64_t GridGeometry::column_count() const {
  std::int64_t c = 1;
  for (int k = 0; k + 1 < dim; ++k) c *= shape[k];
  return c;
}

std::optional<std::int64_t> GridGeometry::locate(int axis, double x) const {
  const double f = std::floor((x - origin[axis]) / spacing[axis]);
  if (!(f >= 0.0) || f >= static_cast<double>(shape[axis])) return std::nullopt;
  return static_cast<std::int64_t>(f);
}

std::vector<std::int64_t> GridGeometry::column_multi_index(std::int64_t col) const {
  std::vector<std::int64_t> m(std::max(0, dim - 1));
  for (int k = dim - 2; k >= 0; --k) {
    m[k] = col % shape[k];
    col /= shape[k];
  }
  return m;
}

std::int64_t GridGeometry::column_linear_index(std::span<const std::int64_t> multi) const {
  std::int64_t col = 0;
  for (int k = 0; k + 1 < dim; ++k) col = col * shape[k] + multi[k];
  return col;
}

Vec GridGeometry::column_center(std::int64_t col) const {
  Vec c(dim - 1);
  for (int k = dim - 2; k >= 0; --k) {
    c(k) = center(k, col % shape[k]);
    col /= shape[k];
  }
  return c;
}

std::optional<std::int64_t> GridGeometry::column_of(const Vec& p) const {
  std::int64_t col = 0;
  for (int k = 0; k + 1 < dim; ++k) {
    auto i = locate(k, p(k));
    if (!i) return std::nullopt;
    col = col * shape[k] + *i;
  }
  return col;
}

Box GridGeometry::bounds() const {
  Box b{Vec(dim), Vec(dim)};
  for (int k = 0; k < dim; ++k) {
    b.lo(k) = origin[k];
    b.hi(k) = origin[k] + static_cast<double>(shape[k]) * spacing[k];
  }
  return b;
}

}  // namespace rlt
