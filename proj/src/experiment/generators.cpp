#include "rlt/experiment/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rlt/core/error.hpp"

namespace rlt {

std::uint64_t derive_seed(std::uint64_t seed, const std::string& tag, std::uint64_t index) {
  // FNV-1a keeps the tag hash stable across platforms.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(mix64(seed ^ h) + index);
}

namespace {

Mat random_frame(int n, CounterRng& rng) {
  Mat e = Mat::Identity(n, n);
  if (n == 2) {
    const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
    e << std::cos(a), std::sin(a), -std::sin(a), std::cos(a);
  }
  return e;
}

Vec uniform_vec(int len, double lo, double hi, CounterRng& rng) {
  Vec v(len);
  for (int k = 0; k < len; ++k) v(k) = rng.uniform(lo, hi);
  return v;
}

double log_uniform(double lo, double hi, CounterRng& rng) { return std::exp(rng.uniform(std::log(lo), std::log(hi))); }

// Radii in [lo, hi] with dual radii in the same range and rho >= rho_min.
BallParams ball_in_range(int d, double lo, double hi, double rho_min, double center_scale, CounterRng& rng) {
  const int n = d - 1;
  Vec r(n);
  for (int j = 0; j < n; ++j) r(j) = log_uniform(lo, hi, rng);
  const double rho_lo = std::max(rho_min, r.maxCoeff() * lo);
  const double rho_hi = std::max(rho_lo, r.minCoeff() * hi);
  const double rho = log_uniform(rho_lo, rho_hi, rng);
  Vec rs(n);
  for (int j = 0; j < n; ++j) rs(j) = rho / r(j);
  const Mat e = random_frame(n, rng);
  const SpacePoint x = uniform_vec(d, -center_scale, center_scale, rng);
  const Vec yp = uniform_vec(n, -center_scale, center_scale, rng);
  return make_ball(on_manifold(x, yp), e, r, rs);
}

RegionPtr random_boxes(int d, double lift, CounterRng& rng) {
  const int count = 1 + static_cast<int>(rng.below(3));
  std::vector<RegionPtr> parts;
  for (int i = 0; i < count; ++i) {
    Vec lo(d), hi(d);
    for (int k = 0; k < d; ++k) {
      const double side = rng.uniform(0.25, 2.0);
      lo(k) = rng.uniform(-2.0, 2.0 - side);
      hi(k) = lo(k) + side;
    }
    lo(d - 1) += lift;
    hi(d - 1) += lift;
    parts.push_back(std::make_shared<BoxRegion>(Box{lo, hi}));
  }
  return std::make_shared<UnionRegion>(std::move(parts));
}

// Voxel unions live on a coarser lattice than the region families: each voxel is a set feature of its own.
std::vector<double> voxel_spacing(int d) { return d == 2 ? std::vector<double>{1.0 / 16, 1.0 / 32} : std::vector<double>{1.0 / 8, 1.0 / 8, 1.0 / 16}; }

GridSet random_voxels(int d, double lift, CounterRng& rng) {
  const std::vector<double> h = voxel_spacing(d);
  Vec lo = Vec::Constant(d, -1.0), hi = Vec::Constant(d, 1.0);
  lo(d - 1) += lift;
  hi(d - 1) += lift;
  const GridGeometry g = GridGeometry::covering(Box{lo, hi}, h);
  const double density = rng.uniform(0.05, 0.5);
  GridSetBuilder b(g);
  for (std::int64_t c = 0; c < g.column_count(); ++c)
    for (std::int64_t k = 0; k < g.depth(); ++k)
      if (rng.uniform() < density) b.add_voxel(c, k);
  GridSet s = b.build();
  if (s.empty()) {
    GridSetBuilder one(g);
    one.add_voxel(0, 0);
    s = one.build();
  }
  return s;
}

SymmetryElement random_word(int d, std::uint64_t seed) {
  CounterRng rng(seed, 0x3070);
  SymmetryElement g = SymmetryElement::identity(d);
  for (int i = 0; i < 2; ++i) {
    const auto kind = static_cast<SymmetryKind>(rng.below(5));
    g = compose(random_generator(kind, d, mix64(seed + static_cast<std::uint64_t>(i))), g);
  }
  return g;
}

}  // namespace

BallParams random_ball(int d, CounterRng& rng) { return ball_in_range(d, 0.125, 8.0, 0.0, 4.0, rng); }

BallParams random_corpus_ball(int d, CounterRng& rng) { return ball_in_range(d, 0.25, 2.0, 0.25, 1.0, rng); }

std::string family_name(RandomFamily f) {
  switch (f) {
    case RandomFamily::VoxelUnion: return "voxel_union";
    case RandomFamily::Boxes: return "boxes";
    case RandomFamily::BallEnvelope: return "ball_envelope";
    case RandomFamily::TransformedEnvelope: return "transformed_envelope";
  }
  return "";
}

RandomFamily family_from_name(const std::string& name) {
  for (RandomFamily f : kRandomFamilies)
    if (family_name(f) == name) return f;
  throw Error(ErrorKind::ConfigInvalid, "unknown random family '" + name + "'");
}

std::vector<double> corpus_spacing(int d) {
  if (d == 2) return {1.0 / 16, 1.0 / 32};
  if (d == 3) return {1.0 / 32, 1.0 / 32, 1.0 / 16};
  throw Error(ErrorKind::DimensionUnsupported, "corpus generators support d in {2, 3}");
}

RegionPair random_regions(RandomFamily family, int d, std::uint64_t seed) {
  CounterRng rng(seed, 0x4e6);
  switch (family) {
    case RandomFamily::Boxes: {
      RegionPtr E = random_boxes(d, 0.0, rng);
      return {E, random_boxes(d, -rng.uniform(0.0, 2.0), rng)};
    }
    case RandomFamily::BallEnvelope: {
      const EnvelopePair env = envelope(random_corpus_ball(d, rng));
      return {env.E_env, env.Estar_env};
    }
    case RandomFamily::TransformedEnvelope: {
      const EnvelopePair env = envelope(random_corpus_ball(d, rng));
      const SymmetryElement g = random_word(d, rng.next_u64());
      return {std::make_shared<TransformedRegion>(env.E_env, g, TransformedRegion::Factor::First),
              std::make_shared<TransformedRegion>(env.Estar_env, g, TransformedRegion::Factor::Second)};
    }
    case RandomFamily::VoxelUnion: break;
  }
  throw Error(ErrorKind::InvalidArgument, "voxel unions have no analytic description");
}

SetPair gen_random_sets(RandomFamily family, int d, std::uint64_t seed) {
  if (family == RandomFamily::VoxelUnion) {
    CounterRng rng(seed, 0x4e6);
    GridSet E = random_voxels(d, 0.0, rng);
    return {E, random_voxels(d, -rng.uniform(0.0, 1.0), rng)};
  }
  // Region pairs are redrawn until both rasters resolve the sets (dilations can shrink them below the lattice).
  const std::vector<double> h = corpus_spacing(d);
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    const RegionPair p = random_regions(family, d, attempt == 0 ? seed : mix64(seed + attempt));
    SetPair out{rasterize(*p.E, h), rasterize(*p.Estar, h)};
    if (out.E.voxel_count() >= kMinCorpusVoxels && out.Estar.voxel_count() >= kMinCorpusVoxels) return out;
  }
  throw Error(ErrorKind::ResolutionTooCoarse, "no resolved pair of family " + family_name(family));
}

Box ParaboloidTubeRegion::bounds() const {
  const int d = dim();
  const double pad = 2.0 * delta_ * std::sqrt(5.0);
  Box b{apex_, apex_};
  b.lo.head(d - 1).array() -= 1.0;
  b.hi.head(d - 1).array() += 1.0;
  b.lo(d - 1) -= 1.0 + pad;
  b.hi(d - 1) += pad;
  return b;
}

bool ParaboloidTubeRegion::contains(const SpacePoint& p) const {
  const double t2 = (head(p) - head(apex_)).squaredNorm();
  if (t2 >= 1.0) return false;
  return std::abs(last(p) - (last(apex_) - t2)) < 2.0 * delta_ * std::sqrt(1.0 + 4.0 * t2);
}

void ParaboloidTubeRegion::column(const Vec& xp, std::vector<Interval>& out) const {
  const double t2 = (xp - head(apex_)).squaredNorm();
  if (t2 >= 1.0) return;
  const double c = last(apex_) - t2;
  const double w = 2.0 * delta_ * std::sqrt(1.0 + 4.0 * t2);
  out.push_back({c - w, c + w});
}

ClusterPair gen_paraboloid_cluster(int d, int N, double delta, std::uint64_t seed, double spread, double cells_per_delta,
                                   int max_retries) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "cluster needs at least one center");
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
  CounterRng rng(seed, 0xc1u);
  ClusterPair out;
  for (int j = 0; j < N; ++j) {
    bool placed = false;
    for (int attempt = 0; attempt < max_retries && !placed; ++attempt) {
      const SpacePoint z = uniform_vec(d, -spread, spread, rng);
      placed = std::all_of(out.centers.begin(), out.centers.end(),
                           [&](const SpacePoint& c) { return (c - z).norm() >= 4.0 * delta; });
      if (placed) out.centers.push_back(z);
    }
    if (!placed)
      throw Error(ErrorKind::SeparationFailed, "could not place center " + std::to_string(j + 1) + " of " +
                                                   std::to_string(N) + " at separation 4 delta");
  }
  std::vector<RegionPtr> balls, tubes;
  for (const SpacePoint& z : out.centers) {
    balls.push_back(std::make_shared<EuclideanBallRegion>(z, delta));
    tubes.push_back(std::make_shared<ParaboloidTubeRegion>(z, delta));
  }
  const std::vector<double> h(static_cast<std::size_t>(d), delta / cells_per_delta);
  out.sets.E = rasterize(UnionRegion(std::move(balls)), h);
  out.sets.Estar = rasterize(UnionRegion(std::move(tubes)), h);
  return out;
}

double paraboloid_tube_measure(int d, double delta) {
  if (d == 2) return 4.0 * delta * (std::sqrt(5.0) + 0.5 * std::asinh(2.0));
  if (d == 3) return 4.0 * delta * std::numbers::pi * (5.0 * std::sqrt(5.0) - 1.0) / 6.0;
  throw Error(ErrorKind::DimensionUnsupported, "paraboloid tube measure is tabulated for d in {2, 3}");
}

namespace {

// Copy of S on a lattice extended along the last axis, plus `voxels` cells spread over the occupied columns and
// stacked entirely below `level` (below = true) or above it.
GridSet add_block(const GridSet& S, std::int64_t voxels, double level, bool below) {
  const GridGeometry& g = S.geometry();
  const int a = g.dim - 1;
  const double h = g.spacing[a];
  const auto cols = static_cast<std::int64_t>(S.column_slots());
  const std::int64_t tall = voxels / cols + 1;
  std::vector<double> origin = g.origin;
  std::vector<std::int64_t> shape = g.shape;
  std::int64_t shift = 0;
  if (below) {
    shift = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil((g.origin[a] - (level - tall * h)) / h)));
    origin[a] -= shift * h;
    shape[a] += shift;
  } else {
    const double top = g.origin[a] + g.shape[a] * h;
    shape[a] += std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil((level + tall * h - top) / h)));
  }
  GridGeometry ext(origin, g.spacing, shape);
  GridSetBuilder b(ext);
  for (std::size_t slot = 0; slot < S.column_slots(); ++slot) {
    for (const Run& r : S.column_runs(slot)) b.add(S.column_id(slot), r.lo + shift, r.hi + shift);
    const auto i = static_cast<std::int64_t>(slot);
    const std::int64_t len = voxels / cols + (i < voxels % cols ? 1 : 0);
    if (len == 0) continue;
    if (below)
      b.add(S.column_id(slot), 0, len);
    else
      b.add(S.column_id(slot), shape[a] - len, shape[a]);
  }
  return b.build();
}

}  // namespace

SetPair dilute(const SetPair& p, double lambda) {
  if (!(lambda >= 1.0)) throw Error(ErrorKind::InvalidArgument, "dilution factor must be >= 1");
  if (p.E.empty() || p.Estar.empty()) throw Error(ErrorKind::EmptySet, "cannot dilute an empty set");
  const int a = p.E.dim() - 1;
  double Y = 0.0;
  for (const GridSet* s : {&p.E, &p.Estar}) {
    const Box b = s->occupied_bounds();
    Y = std::max({Y, std::abs(b.lo(a)), std::abs(b.hi(a))});
  }
  Y += 1.0;
  auto extra = [&](const GridSet& s) {
    return static_cast<std::int64_t>(std::llround((lambda - 1.0) * static_cast<double>(s.voxel_count())));
  };
  // Incidences need x*_d <= x_d: nothing in E reaches above Y and nothing in E* reaches below -Y.
  return {add_block(p.E, extra(p.E), -Y, true), add_block(p.Estar, extra(p.Estar), Y, false)};
}

namespace {

std::vector<std::int64_t> level_counts(int d, std::int64_t n0, int levels) {
  const double p = (d + 1.0) / d;
  std::vector<std::int64_t> n;
  for (int l = 0; l < levels; ++l)
    n.push_back(std::max<std::int64_t>(1, std::llround(static_cast<double>(n0) * std::pow(2.0, -l * p))));
  return n;
}

double level_value(int l) { return std::ldexp(1.0, l + 1) * (1.0 - 1e-6); }

}  // namespace

GridFunction flat_function(const GridGeometry& g, std::int64_t n0, int levels, std::uint64_t seed) {
  const std::vector<std::int64_t> n = level_counts(g.dim, n0, levels);
  std::int64_t total = 1;
  for (std::int64_t s : g.shape) total *= s;
  std::int64_t need = 0;
  for (std::int64_t c : n) need += c;
  if (need > total) throw Error(ErrorKind::InvalidArgument, "lattice too small for the requested levels");
  std::vector<std::pair<std::uint64_t, std::int64_t>> order(static_cast<std::size_t>(total));
  for (std::int64_t i = 0; i < total; ++i) order[static_cast<std::size_t>(i)] = {mix64(seed ^ mix64(static_cast<std::uint64_t>(i))), i};
  std::nth_element(order.begin(), order.begin() + need, order.end());
  std::sort(order.begin(), order.begin() + need);
  GridFunction f(g);
  std::size_t pos = 0;
  for (int l = 0; l < levels; ++l)
    for (std::int64_t i = 0; i < n[static_cast<std::size_t>(l)]; ++i)
      f.values()[static_cast<std::size_t>(order[pos++].second)] = level_value(l);
  return f;
}

double flat_level_ratio(const GridGeometry& g, std::int64_t n0, int levels) {
  const double p = (g.dim + 1.0) / g.dim;
  const std::vector<std::int64_t> n = level_counts(g.dim, n0, levels);
  double mass = 0.0, worst = 0.0;
  for (int l = 0; l < levels; ++l) {
    const double c = static_cast<double>(n[static_cast<std::size_t>(l)]);
    mass += std::pow(level_value(l), p) * c;
    worst = std::max(worst, std::ldexp(1.0, l) * std::pow(c, 1.0 / p));
  }
  return worst / std::pow(mass, 1.0 / p);
}

double lambda0(double t, double tstar, int d) {
  return std::min({t, tstar, std::pow(t * tstar, static_cast<double>(d) / (d + 1))});
}

}  // namespace rlt
