#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlt/balls/ball.hpp"
#include "rlt/core/grid_function.hpp"
#include "rlt/core/rng.hpp"
#include "rlt/symmetry/symmetry.hpp"

namespace rlt {

struct SetPair {
  GridSet E;
  GridSet Estar;
};

struct RegionPair {
  RegionPtr E;
  RegionPtr Estar;
};

// Stream seed for item `index` of a named sweep.
std::uint64_t derive_seed(std::uint64_t seed, const std::string& tag, std::uint64_t index);

// Radii log-uniform on [1/8, 8] with dual radii in the same range, random frame, x_bar in [-4,4]^d and
// x_bar*' in [-4,4]^{d-1}.
BallParams random_ball(int d, CounterRng& rng);

enum class RandomFamily { VoxelUnion, Boxes, BallEnvelope, TransformedEnvelope };

std::string family_name(RandomFamily f);
RandomFamily family_from_name(const std::string& name);
constexpr RandomFamily kRandomFamilies[] = {RandomFamily::VoxelUnion, RandomFamily::Boxes, RandomFamily::BallEnvelope,
                                            RandomFamily::TransformedEnvelope};

// Lattice of the rasterized region families: leading 1/16 (d=2) or 1/32 (d=3), vertical 1/32 (d=2) or 1/16 (d=3).
// Voxel unions use 1/16 x 1/32 (d=2) and 1/8 x 1/8 x 1/16 (d=3).
std::vector<double> corpus_spacing(int d);

// Analytic pair for the region families (every family except VoxelUnion).
RegionPair random_regions(RandomFamily family, int d, std::uint64_t seed);

// Envelope pair of a ball with radii in [1/4, 2] centered near the origin.
BallParams random_corpus_ball(int d, CounterRng& rng);

constexpr std::int64_t kMinCorpusVoxels = 512;

// Corpus pair on the corpus lattice. Region families are redrawn until both rasters hold kMinCorpusVoxels voxels.
SetPair gen_random_sets(RandomFamily family, int d, std::uint64_t seed);

// Truncated downward paraboloid z - (t, |t|^2), |t| < 1, thickened vertically by 2 delta sqrt(1 + 4|t|^2)
// (the normal 2 delta-neighborhood to first order).
class ParaboloidTubeRegion : public Region {
 public:
  ParaboloidTubeRegion(SpacePoint apex, double delta) : apex_(std::move(apex)), delta_(delta) {}
  int dim() const override { return static_cast<int>(apex_.size()); }
  Box bounds() const override;
  bool contains(const SpacePoint& p) const override;
  void column(const Vec& xp, std::vector<Interval>& out) const override;

 private:
  SpacePoint apex_;
  double delta_;
};

struct ClusterPair {
  SetPair sets;
  std::vector<SpacePoint> centers;
};

// E = union of delta-balls at N centers, E* = union of the paraboloid tubes through them. Centers are uniform in
// [-spread, spread]^d and pairwise 4 delta apart; the lattice spacing is delta / cells_per_delta on every axis.
ClusterPair gen_paraboloid_cluster(int d, int N, double delta, std::uint64_t seed, double spread = 2.0,
                                   double cells_per_delta = 4.0, int max_retries = 1000);

// |P_1 tube| = 4 delta int_{|t|<1} sqrt(1 + 4|t|^2) dt.
double paraboloid_tube_measure(int d, double delta);

// Adds a block below E and a block above E* so both measures grow by the factor lambda (to voxel rounding). The
// blocks sit at heights that no incidence can reach, so the incidence is unchanged.
SetPair dilute(const SetPair& p, double lambda);

// Sum over l < levels of 2^{l+1}(1 - 1e-6) chi_{F_l} with |F_l| = round(n0 2^{-l p}) voxels, p = (d+1)/d. The F_l are
// consecutive blocks of one hash permutation of the lattice, so adding levels never moves the lower ones.
GridFunction flat_function(const GridGeometry& g, std::int64_t n0, int levels, std::uint64_t seed);

// Largest level ratio max_l 2^l |F_l|^{1/p} / ||f||_p of flat_function(g, n0, levels, .), from the counts alone.
double flat_level_ratio(const GridGeometry& g, std::int64_t n0, int levels);

// Lambda_0(t, t*) = min(t, t*, (t t*)^{d/(d+1)}).
double lambda0(double t, double tstar, int d);

}  // namespace rlt
