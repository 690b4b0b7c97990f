#include "rlt/core/grid_set.hpp"

#include <algorithm>
#include <cmath>

#include "rlt/core/error.hpp"
#include "rlt/core/rng.hpp"

namespace rlt {

GridSet::GridSet(GridGeometry geometry) : geometry_(std::move(geometry)) {}

void GridSetBuilder::add(std::int64_t column, std::int64_t lo, std::int64_t hi) {
  lo = std::max<std::int64_t>(lo, 0);
  hi = std::min(hi, geometry_.depth());
  if (lo < hi) entries_.push_back({column, {lo, hi}});
}

GridSet GridSetBuilder::build() {
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.column != b.column ? a.column < b.column : a.run.lo < b.run.lo;
  });
  GridSet s(geometry_);
  for (const Entry& e : entries_) {
    const bool same_column = !s.columns_.empty() && s.columns_.back() == e.column;
    if (same_column && s.runs_.back().hi >= e.run.lo) {
      s.runs_.back().hi = std::max(s.runs_.back().hi, e.run.hi);
      continue;
    }
    if (!same_column) {
      if (!s.columns_.empty()) s.offsets_.push_back(s.runs_.size());
      s.columns_.push_back(e.column);
    }
    s.runs_.push_back(e.run);
  }
  if (!s.columns_.empty()) s.offsets_.push_back(s.runs_.size());
  for (const Run& r : s.runs_) s.voxel_count_ += r.length();
  entries_.clear();
  return s;
}

GridSet GridSet::from_dense(GridGeometry geometry, const std::vector<std::uint8_t>& occupancy) {
  const std::int64_t depth = geometry.depth();
  const std::int64_t columns = geometry.column_count();
  if (static_cast<std::int64_t>(occupancy.size()) != columns * depth)
    throw Error(ErrorKind::InvalidArgument, "occupancy size does not match shape");
  GridSetBuilder b(geometry);
  for (std::int64_t c = 0; c < columns; ++c) {
    const std::uint8_t* col = occupancy.data() + c * depth;
    std::int64_t k = 0;
    while (k < depth) {
      if (!col[k]) {
        ++k;
        continue;
      }
      std::int64_t e = k;
      while (e < depth && col[e]) ++e;
      b.add(c, k, e);
      k = e;
    }
  }
  return b.build();
}

std::span<const Run> GridSet::runs_of(std::int64_t column) const {
  auto it = std::lower_bound(columns_.begin(), columns_.end(), column);
  if (it == columns_.end() || *it != column) return {};
  return column_runs(static_cast<std::size_t>(it - columns_.begin()));
}

bool GridSet::contains(const SpacePoint& p) const {
  if (p.size() != dim() || empty()) return false;
  auto col = geometry_.column_of(p);
  if (!col) return false;
  auto k = geometry_.locate(dim() - 1, last(p));
  if (!k) return false;
  auto runs = runs_of(*col);
  auto it = std::upper_bound(runs.begin(), runs.end(), *k, [](std::int64_t v, const Run& r) { return v < r.hi; });
  return it != runs.end() && it->lo <= *k;
}

void GridSet::for_each_voxel(const std::function<void(const SpacePoint&)>& fn) const {
  const int d = dim();
  SpacePoint p(d);
  for (std::size_t s = 0; s < columns_.size(); ++s) {
    p.head(d - 1) = geometry_.column_center(columns_[s]);
    for (const Run& r : column_runs(s))
      for (std::int64_t k = r.lo; k < r.hi; ++k) {
        p(d - 1) = geometry_.center(d - 1, k);
        fn(p);
      }
  }
}

GridSet GridSet::restrict(const std::function<bool(const SpacePoint&)>& predicate) const {
  const int d = dim();
  GridSetBuilder b(geometry_);
  SpacePoint p(d);
  for (std::size_t s = 0; s < columns_.size(); ++s) {
    p.head(d - 1) = geometry_.column_center(columns_[s]);
    for (const Run& r : column_runs(s))
      for (std::int64_t k = r.lo; k < r.hi; ++k) {
        p(d - 1) = geometry_.center(d - 1, k);
        if (predicate(p)) b.add_voxel(columns_[s], k);
      }
  }
  return b.build();
}

VoxelSampler::VoxelSampler(const GridSet& set) : set_(&set), runs_(set.runs_) {
  if (set.empty()) throw Error(ErrorKind::EmptySet, "cannot sample an empty set");
  cumulative_.resize(runs_.size());
  std::int64_t total = 0;
  for (std::size_t i = 0; i < runs_.size(); ++i) cumulative_[i] = (total += runs_[i].length());
  run_slot_.resize(runs_.size());
  for (std::size_t s = 0; s < set.columns_.size(); ++s)
    for (std::size_t i = set.offsets_[s]; i < set.offsets_[s + 1]; ++i) run_slot_[i] = s;
}

SpacePoint VoxelSampler::operator()(CounterRng& rng) const {
  const GridGeometry& g = set_->geometry_;
  const int d = g.dim;
  // Keep offsets strictly inside the voxel so rounding cannot push a point across a face.
  auto offset = [&rng] { return 1e-9 + (1.0 - 2e-9) * rng.uniform(); };
  const auto v = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(cumulative_.back())));
  const auto i = static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), v) - cumulative_.begin());
  const std::int64_t k = runs_[i].hi - (cumulative_[i] - v);
  std::int64_t col = set_->columns_[run_slot_[i]];
  SpacePoint p(d);
  for (int a = d - 2; a >= 0; --a) {
    p(a) = g.origin[a] + (static_cast<double>(col % g.shape[a]) + offset()) * g.spacing[a];
    col /= g.shape[a];
  }
  p(d - 1) = g.origin[d - 1] + (static_cast<double>(k) + offset()) * g.spacing[d - 1];
  return p;
}

std::vector<SpacePoint> GridSet::sample_uniform(std::uint64_t seed, std::size_t n) const {
  VoxelSampler sampler(*this);
  CounterRng rng(seed);
  std::vector<SpacePoint> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) out.push_back(sampler(rng));
  return out;
}

template <typename Op>
GridSet GridSet::combine(const GridSet& other, Op op) const {
  if (!(geometry_ == other.geometry_)) throw Error(ErrorKind::InvalidArgument, "set algebra needs matching geometry");
  GridSetBuilder b(geometry_);
  std::size_t i = 0, j = 0;
  std::vector<std::int64_t> marks;
  while (i < columns_.size() || j < other.columns_.size()) {
    std::int64_t col;
    std::span<const Run> a, c;
    if (j >= other.columns_.size() || (i < columns_.size() && columns_[i] < other.columns_[j])) {
      col = columns_[i];
      a = column_runs(i++);
    } else if (i >= columns_.size() || other.columns_[j] < columns_[i]) {
      col = other.columns_[j];
      c = other.column_runs(j++);
    } else {
      col = columns_[i];
      a = column_runs(i++);
      c = other.column_runs(j++);
    }
    // Sweep over run boundaries of both columns.
    marks.clear();
    for (const Run& r : a) marks.insert(marks.end(), {r.lo, r.hi});
    for (const Run& r : c) marks.insert(marks.end(), {r.lo, r.hi});
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    auto inside = [](std::span<const Run> runs, std::int64_t k) {
      auto it = std::upper_bound(runs.begin(), runs.end(), k, [](std::int64_t v, const Run& r) { return v < r.hi; });
      return it != runs.end() && it->lo <= k;
    };
    for (std::size_t m = 0; m + 1 < marks.size(); ++m)
      if (op(inside(a, marks[m]), inside(c, marks[m]))) b.add(col, marks[m], marks[m + 1]);
  }
  return b.build();
}

GridSet GridSet::unite(const GridSet& other) const {
  return combine(other, [](bool a, bool b) { return a || b; });
}
GridSet GridSet::intersect(const GridSet& other) const {
  return combine(other, [](bool a, bool b) { return a && b; });
}
GridSet GridSet::subtract(const GridSet& other) const {
  return combine(other, [](bool a, bool b) { return a && !b; });
}

GridSet GridSet::permute_leading_axes(const std::vector<int>& perm) const {
  const int d = dim();
  if (static_cast<int>(perm.size()) != d - 1) throw Error(ErrorKind::InvalidArgument, "permutation length must be dim-1");
  GridGeometry g = geometry_;
  for (int k = 0; k + 1 < d; ++k) {
    g.origin[k] = geometry_.origin[perm[k]];
    g.spacing[k] = geometry_.spacing[perm[k]];
    g.shape[k] = geometry_.shape[perm[k]];
  }
  GridSetBuilder b(g);
  std::vector<std::int64_t> target(d - 1);
  for (std::size_t s = 0; s < columns_.size(); ++s) {
    auto m = geometry_.column_multi_index(columns_[s]);
    for (int k = 0; k + 1 < d; ++k) target[k] = m[perm[k]];
    const std::int64_t col = g.column_linear_index(target);
    for (const Run& r : column_runs(s)) b.add(col, r.lo, r.hi);
  }
  return b.build();
}

Box GridSet::occupied_bounds() const {
  const int d = dim();
  if (empty()) throw Error(ErrorKind::EmptySet, "empty set has no bounds");
  std::vector<std::int64_t> lo(d, INT64_MAX), hi(d, INT64_MIN);
  for (std::size_t s = 0; s < columns_.size(); ++s) {
    auto m = geometry_.column_multi_index(columns_[s]);
    for (int k = 0; k + 1 < d; ++k) {
      lo[k] = std::min(lo[k], m[k]);
      hi[k] = std::max(hi[k], m[k] + 1);
    }
    auto runs = column_runs(s);
    lo[d - 1] = std::min(lo[d - 1], runs.front().lo);
    hi[d - 1] = std::max(hi[d - 1], runs.back().hi);
  }
  Box b{Vec(d), Vec(d)};
  for (int k = 0; k < d; ++k) {
    b.lo(k) = geometry_.origin[k] + static_cast<double>(lo[k]) * geometry_.spacing[k];
    b.hi(k) = geometry_.origin[k] + static_cast<double>(hi[k]) * geometry_.spacing[k];
  }
  return b;
}

std::vector<std::uint8_t> GridSet::dense() const {
  const std::int64_t depth = geometry_.depth();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(geometry_.column_count() * depth), 0);
  for (std::size_t s = 0; s < columns_.size(); ++s)
    for (const Run& r : column_runs(s)) std::fill(out.begin() + columns_[s] * depth + r.lo, out.begin() + columns_[s] * depth + r.hi, 1);
  return out;
}

bool GridSet::operator==(const GridSet& other) const {
  return geometry_ == other.geometry_ && columns_ == other.columns_ && offsets_ == other.offsets_ && runs_ == other.runs_;
}

}  // namespace rlt
