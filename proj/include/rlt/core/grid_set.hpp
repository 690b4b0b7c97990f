#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rlt/core/grid.hpp"

namespace rlt {

// Half-open voxel index range [lo, hi) along the last axis.
struct Run {
  std::int64_t lo;
  std::int64_t hi;

  std::int64_t length() const { return hi - lo; }
  bool operator==(const Run&) const = default;
};

// Voxel indicator set. Occupancy is stored per column as sorted, disjoint, non-adjacent runs;
// only nonempty columns are kept.
class GridSet {
 public:
  GridSet() = default;
  explicit GridSet(GridGeometry geometry);

  // Row-major occupancy, last axis fastest.
  static GridSet from_dense(GridGeometry geometry, const std::vector<std::uint8_t>& occupancy);

  const GridGeometry& geometry() const { return geometry_; }
  int dim() const { return geometry_.dim; }
  bool empty() const { return runs_.empty(); }
  std::int64_t voxel_count() const { return voxel_count_; }
  double measure() const { return static_cast<double>(voxel_count_) * geometry_.voxel_volume(); }

  bool contains(const SpacePoint& p) const;

  // Occupied-column iteration.
  std::size_t column_slots() const { return columns_.size(); }
  std::int64_t column_id(std::size_t slot) const { return columns_[slot]; }
  std::span<const Run> column_runs(std::size_t slot) const {
    return {runs_.data() + offsets_[slot], runs_.data() + offsets_[slot + 1]};
  }
  // Runs of a column by linear index (empty span when unoccupied).
  std::span<const Run> runs_of(std::int64_t column) const;

  // Calls fn(center) for every occupied voxel, in row-major order.
  void for_each_voxel(const std::function<void(const SpacePoint&)>& fn) const;

  GridSet restrict(const std::function<bool(const SpacePoint&)>& predicate) const;
  std::vector<SpacePoint> sample_uniform(std::uint64_t seed, std::size_t n) const;

  GridSet unite(const GridSet& other) const;
  GridSet intersect(const GridSet& other) const;
  GridSet subtract(const GridSet& other) const;

  // Permutes the first dim-1 axes (perm[k] = source axis of new axis k).
  GridSet permute_leading_axes(const std::vector<int>& perm) const;

  // Bounding box of the occupied voxels.
  Box occupied_bounds() const;
  std::vector<std::uint8_t> dense() const;

  bool operator==(const GridSet& other) const;

 private:
  friend class GridSetBuilder;
  friend class VoxelSampler;
  template <typename Op>
  GridSet combine(const GridSet& other, Op op) const;

  GridGeometry geometry_;
  std::vector<std::int64_t> columns_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Run> runs_;
  std::int64_t voxel_count_ = 0;
};

class CounterRng;

// Uniform point sampler over the occupied voxels.
class VoxelSampler {
 public:
  explicit VoxelSampler(const GridSet& set);
  SpacePoint operator()(CounterRng& rng) const;

 private:
  const GridSet* set_;
  std::vector<std::int64_t> cumulative_;
  std::vector<std::size_t> run_slot_;
  std::vector<Run> runs_;
};

// Accumulates runs in any order; overlapping and adjacent runs are merged on build().
class GridSetBuilder {
 public:
  explicit GridSetBuilder(GridGeometry geometry) : geometry_(std::move(geometry)) {}

  void add(std::int64_t column, std::int64_t lo, std::int64_t hi);
  void add_voxel(std::int64_t column, std::int64_t k) { add(column, k, k + 1); }
  GridSet build();

 private:
  struct Entry {
    std::int64_t column;
    Run run;
  };
  GridGeometry geometry_;
  std::vector<Entry> entries_;
};

}  // namespace rlt
