#include "rlt/combinatorics/tower.hpp"

#include <algorithm>
#include <cmath>

#include "rlt/core/error.hpp"
#include "rlt/core/io.hpp"
#include "rlt/core/rng.hpp"
#include "rlt/transform/incidence.hpp"

namespace rlt {

namespace {

struct Range {
  double lo;
  double hi;
};

// Exact range of 2 s u + u^2 over [s.lo, s.hi] x [u.lo, u.hi].
Range cross_range(Range s, Range u) {
  Range out{INFINITY, -INFINITY};
  auto take = [&](double v) {
    out.lo = std::min(out.lo, v);
    out.hi = std::max(out.hi, v);
  };
  for (double sv : {s.lo, s.hi}) {
    for (double uv : {u.lo, u.hi}) take(2.0 * sv * uv + uv * uv);
    if (-sv >= u.lo && -sv <= u.hi) take(-sv * sv);
  }
  return out;
}

Range square_range(Range s) {
  const double a = s.lo * s.lo, b = s.hi * s.hi;
  const double lo = (s.lo <= 0.0 && s.hi >= 0.0) ? 0.0 : std::min(a, b);
  return {lo, std::max(a, b)};
}

// True when [a, b] lies inside a single run of the column (in coordinates).
bool inside_runs(std::span<const Run> runs, double o, double h, double a, double b) {
  const auto ka = static_cast<std::int64_t>(std::floor((a - o) / h));
  auto it = std::upper_bound(runs.begin(), runs.end(), ka, [](std::int64_t k, const Run& r) { return k < r.hi; });
  if (it == runs.end() || it->lo > ka) return false;
  return b <= o + static_cast<double>(it->hi) * h;
}

struct SubLattice {
  int lead = 0;
  std::vector<double> origin;
  std::vector<double> spacing;
  std::vector<std::int64_t> shape;

  GridGeometry geometry() const { return GridGeometry(origin, spacing, shape); }
};

struct SubVoxel {
  std::vector<std::int64_t> index;  // lattice multi-index
  std::size_t slot;                 // source column slot
};

// Subcolumns of every occupied source column, indexed by their global subdivided multi-index.
std::vector<SubVoxel> subvoxels(const GridSet& src, const std::vector<int>& m) {
  const GridGeometry& g = src.geometry();
  const int lead = g.dim - 1;
  std::vector<SubVoxel> out;
  for (std::size_t slot = 0; slot < src.column_slots(); ++slot) {
    const auto multi = g.column_multi_index(src.column_id(slot));
    std::vector<int> a(lead, 0);
    while (true) {
      SubVoxel v{std::vector<std::int64_t>(lead), slot};
      for (int k = 0; k < lead; ++k) v.index[k] = multi[k] * m[k] + a[k];
      out.push_back(std::move(v));
      int k = lead - 1;
      while (k >= 0 && ++a[k] == m[k]) a[k--] = 0;
      if (k < 0) break;
    }
  }
  return out;
}

std::int64_t linear_index(const std::vector<std::int64_t>& shape, const std::vector<std::int64_t>& multi) {
  std::int64_t idx = 0;
  for (std::size_t k = 0; k < shape.size(); ++k) idx = idx * shape[k] + multi[k];
  return idx;
}

void add_linear(GridSetBuilder& b, const GridGeometry& g, std::int64_t index) {
  b.add_voxel(index / g.depth(), index % g.depth());
}

constexpr double kVoxelSpread = 0.25;    // allowed vertical spread per lattice voxel, in vertical voxel units
constexpr double kPairBudget = 1.5e8;   // cap on s-voxel x u-voxel tests

// Refines the s and u lattices until the vertical coordinate of every tested point varies by at most a quarter of
// the vertical spacing across one lattice voxel, so the conservative membership tests lose little.
void refine_lattices(const GridSet& Estar1, const GridSet& E, const Vec& xbp, std::vector<int>& ms, std::vector<int>& mu) {
  const GridGeometry& gs = Estar1.geometry();
  const GridGeometry& ge = E.geometry();
  const int n = gs.dim - 1;
  const Box bs = Estar1.occupied_bounds(), be = E.occupied_bounds();
  std::vector<double> smax(n), umax(n);
  for (int k = 0; k < n; ++k) {
    smax[k] = std::max(std::abs(xbp(k) - bs.lo(k)), std::abs(xbp(k) - bs.hi(k)));
    umax[k] = std::max(std::abs(be.lo(k) - xbp(k)), std::abs(be.hi(k) - xbp(k)));
  }
  const double cols_s = static_cast<double>(Estar1.column_slots()), cols_u = static_cast<double>(E.column_slots());
  auto pairs = [&] {
    double p = cols_s * cols_u;
    for (int k = 0; k < n; ++k) p *= static_cast<double>(ms[k]) * mu[k];
    return p;
  };
  for (int it = 0; it < 40; ++it) {
    double spread_s = 0.0, spread_x = 0.0;
    int worst_s = 0, worst_u = 0;
    double ws = -1.0, wu = -1.0;
    for (int k = 0; k < n; ++k) {
      const double hs = gs.spacing[k] / ms[k], hu = ge.spacing[k] / mu[k];
      const double ts = 2.0 * smax[k] * hs + hs * hs;
      const double tu = 2.0 * (smax[k] + umax[k]) * hu + hu * hu;
      const double tsx = 2.0 * umax[k] * hs;
      spread_s += ts;
      spread_x += tu + tsx;
      if (std::max(ts, tsx) > ws) ws = std::max(ts, tsx), worst_s = k;
      if (tu > wu) wu = tu, worst_u = k;
    }
    const bool s_ok = spread_s <= kVoxelSpread * gs.spacing[n] && spread_x - wu <= 0.5 * kVoxelSpread * ge.spacing[n];
    const bool u_ok = spread_x <= kVoxelSpread * ge.spacing[n];
    if (s_ok && u_ok) return;
    if (2.0 * pairs() > kPairBudget) return;
    if (!s_ok) ms[worst_s] *= 2;
    else mu[worst_u] *= 2;
  }
}

}  // namespace

std::int64_t voxel_index(const GridGeometry& g, const Vec& p) {
  std::int64_t idx = 0;
  for (int k = 0; k < g.dim; ++k) {
    auto i = g.locate(k, p(k));
    if (!i) return -1;
    idx = idx * g.shape[k] + *i;
  }
  return idx;
}

Vec voxel_center(const GridGeometry& g, std::int64_t index) {
  Vec c(g.dim);
  for (int k = g.dim - 1; k >= 0; --k) {
    c(k) = g.center(k, index % g.shape[k]);
    index /= g.shape[k];
  }
  return c;
}

const GridSet* TowerData::fiber_at(const Vec& s) const {
  if (omega1.empty()) return nullptr;
  const std::int64_t idx = voxel_index(omega1.geometry(), s);
  auto it = std::lower_bound(fibers.begin(), fibers.end(), idx,
                             [](const TowerFiber& f, std::int64_t i) { return f.s_voxel < i; });
  if (idx < 0 || it == fibers.end() || it->s_voxel != idx) return nullptr;
  return &it->set;
}

double TowerData::fiber_measure() const { return fibers.empty() ? 0.0 : fibers.front().set.measure(); }

TowerData build_tower(const GridSet& E, const GridSet& Estar, const QuadratureSpec& q) {
  if (E.dim() != Estar.dim() || E.dim() < 2) throw Error(ErrorKind::InvalidArgument, "tower needs two sets in R^d, d >= 2");
  const int d = E.dim();
  const int n = d - 1;
  const double total = bilinear(E, Estar, q);
  if (!(total > 0.0)) throw Error(ErrorKind::NoIncidences, "the pair has no incidences");

  TowerData tower;
  tower.alpha = total / E.measure();
  tower.alpha_star = total / Estar.measure();

  // First pruning: E*_1 = {T* chi_E >= alpha* / 2}.
  const GridGeometry& gs = Estar.geometry();
  const std::vector<double> adj = indicator_transform(E, Estar, q, Direction::Adjoint);
  GridSetBuilder b1(gs);
  {
    std::size_t i = 0;
    for (std::size_t slot = 0; slot < Estar.column_slots(); ++slot)
      for (const Run& r : Estar.column_runs(slot))
        for (std::int64_t k = r.lo; k < r.hi; ++k, ++i)
          if (adj[i] >= 0.5 * tower.alpha_star) b1.add_voxel(Estar.column_id(slot), k);
  }
  const GridSet Estar1 = b1.build();
  if (Estar1.empty()) throw Error(ErrorKind::TowerFailed, "first-generation superlevel set is empty");

  // Base point: the first maximizer of T chi_{E*_1} over E in row-major order.
  const std::vector<double> fwd = indicator_transform(Estar1, E, q, Direction::Forward);
  const std::size_t best = static_cast<std::size_t>(std::max_element(fwd.begin(), fwd.end()) - fwd.begin());
  {
    std::size_t i = 0;
    E.for_each_voxel([&](const SpacePoint& p) {
      if (i++ == best) tower.base_point = p;
    });
  }
  const SpacePoint& xb = tower.base_point;
  const Vec xbp = head(xb);
  const double xbd = last(xb);

  const GridGeometry& ge = E.geometry();
  std::vector<int> ms = t_subdivisions(gs, q);
  std::vector<int> mu = t_subdivisions(ge, q);
  refine_lattices(Estar1, E, xbp, ms, mu);

  // s-lattice: s = x_bar' - y' with y' on the subdivided E* columns (index reversed).
  SubLattice sl;
  for (int k = 0; k < n; ++k) {
    const double h = gs.spacing[k] / ms[k];
    const std::int64_t N = gs.shape[k] * ms[k];
    sl.spacing.push_back(h);
    sl.shape.push_back(N);
    sl.origin.push_back(xbp(k) - gs.origin[k] - static_cast<double>(N) * h);
  }
  // Trailing axis of an (n)-dimensional GridSet; for n = 1 the single axis.
  const GridGeometry s_geom = sl.geometry();

  // u-lattice: x' = x_bar' + u on the subdivided E columns.
  SubLattice ul;
  for (int k = 0; k < n; ++k) {
    ul.spacing.push_back(ge.spacing[k] / mu[k]);
    ul.shape.push_back(ge.shape[k] * mu[k]);
    ul.origin.push_back(ge.origin[k] - xbp(k));
  }
  const GridGeometry u_geom = ul.geometry();
  const std::vector<SubVoxel> us = subvoxels(E, mu);
  const double od = ge.origin[d - 1], hd = ge.spacing[d - 1];
  std::vector<double> col_lo(E.column_slots()), col_hi(E.column_slots());
  std::vector<std::vector<Range>> col_box(E.column_slots(), std::vector<Range>(n));
  std::vector<std::size_t> us_begin(E.column_slots() + 1, us.size());
  for (std::size_t i = us.size(); i-- > 0;) us_begin[us[i].slot] = i;
  for (std::size_t slot = 0; slot < E.column_slots(); ++slot) {
    const auto multi = ge.column_multi_index(E.column_id(slot));
    for (int k = 0; k < n; ++k) {
      const double lo = ge.origin[k] + static_cast<double>(multi[k]) * ge.spacing[k] - xbp(k);
      col_box[slot][k] = {lo, lo + ge.spacing[k]};
    }
    const auto runs = E.column_runs(slot);
    col_lo[slot] = od + static_cast<double>(runs.front().lo) * hd;
    col_hi[slot] = od + static_cast<double>(runs.back().hi) * hd;
  }

  const double ods = gs.origin[d - 1], hds = gs.spacing[d - 1];
  std::vector<Range> s_box(n), u_box(n);
  std::vector<std::int64_t> s_multi(n);
  struct Candidate {
    std::int64_t s_voxel;
    std::vector<std::int64_t> u_voxels;
  };
  std::vector<Candidate> kept;
  for (const SubVoxel& yv : subvoxels(Estar1, ms)) {
    Range sq{0.0, 0.0};
    for (int k = 0; k < n; ++k) {
      s_multi[k] = sl.shape[k] - 1 - yv.index[k];
      const double lo = sl.origin[k] + static_cast<double>(s_multi[k]) * sl.spacing[k];
      s_box[k] = {lo, lo + sl.spacing[k]};
      const Range r = square_range(s_box[k]);
      sq.lo += r.lo;
      sq.hi += r.hi;
    }
    // y_d = x_bar_d - |s|^2 over the whole s-voxel.
    if (!inside_runs(Estar1.column_runs(yv.slot), ods, hds, xbd - sq.hi, xbd - sq.lo)) continue;

    Candidate c{linear_index(sl.shape, s_multi), {}};
    for (std::size_t slot = 0; slot < E.column_slots(); ++slot) {
      // Whole-column reject before the per-subvoxel tests.
      Range xc{xbd, xbd};
      for (int k = 0; k < n; ++k) {
        const Range g = cross_range(s_box[k], col_box[slot][k]);
        xc.lo += g.lo;
        xc.hi += g.hi;
      }
      if (xc.hi < col_lo[slot] || xc.lo > col_hi[slot]) continue;
      for (std::size_t i = us_begin[slot]; i < us_begin[slot + 1]; ++i) {
        const SubVoxel& uv = us[i];
        Range x{xbd, xbd};
        for (int k = 0; k < n; ++k) {
          const double lo = ul.origin[k] + static_cast<double>(uv.index[k]) * ul.spacing[k];
          const Range g = cross_range(s_box[k], {lo, lo + ul.spacing[k]});
          x.lo += g.lo;
          x.hi += g.hi;
        }
        if (x.lo < col_lo[slot] || x.hi > col_hi[slot]) continue;
        if (inside_runs(E.column_runs(slot), od, hd, x.lo, x.hi)) c.u_voxels.push_back(linear_index(ul.shape, uv.index));
      }
    }
    if (static_cast<double>(c.u_voxels.size()) * u_geom.voxel_volume() >= kTowerFiberFraction * tower.alpha_star)
      kept.push_back(std::move(c));
  }
  if (kept.empty()) throw Error(ErrorKind::TowerFailed, "no s-voxel keeps a fiber of measure alpha*/2");

  // Equal fiber measures: keep the hash-smallest voxels of each fiber.
  std::size_t common = kept.front().u_voxels.size();
  for (const Candidate& c : kept) common = std::min(common, c.u_voxels.size());
  std::sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) { return a.s_voxel < b.s_voxel; });
  GridSetBuilder ob(s_geom);
  for (Candidate& c : kept) {
    add_linear(ob, s_geom, c.s_voxel);
    auto& v = c.u_voxels;
    auto rank = [&](std::int64_t i) { return mix64(static_cast<std::uint64_t>(i) ^ (static_cast<std::uint64_t>(c.s_voxel) << 32)); };
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(common), v.end(),
                     [&](std::int64_t a, std::int64_t b) { return rank(a) < rank(b); });
    GridSetBuilder fb(u_geom);
    for (std::size_t i = 0; i < common; ++i) add_linear(fb, u_geom, v[i]);
    tower.fibers.push_back({c.s_voxel, fb.build()});
  }
  tower.omega1 = ob.build();
  return tower;
}

InclusionReport verify_tower_inclusions(const TowerData& t, const GridSet& E, const GridSet& Estar, std::size_t n,
                                        std::uint64_t seed) {
  InclusionReport rep;
  if (t.omega1.empty()) return rep;
  const VoxelSampler s_sampler(t.omega1);
  const Vec xbp = head(t.base_point);
  const double xbd = last(t.base_point);
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng(seed, i);
    const Vec s = s_sampler(rng);
    const GridSet* fiber = t.fiber_at(s);
    if (!fiber) throw Error(ErrorKind::InvalidArgument, "tower has an s-voxel without a fiber");
    const Vec u = VoxelSampler(*fiber)(rng);
    const Vec tt = s + u;
    const SpacePoint y = join(xbp - s, xbd - s.squaredNorm());
    const SpacePoint x = join(head(y) + tt, last(y) + tt.squaredNorm());
    ++rep.checked;
    if (!Estar.contains(y)) ++rep.first_failures;
    if (!E.contains(x)) ++rep.second_failures;
  }
  return rep;
}

nlohmann::json to_json(const TowerData& t) {
  nlohmann::json fibers = nlohmann::json::array();
  for (const TowerFiber& f : t.fibers) fibers.push_back({{"s_voxel", f.s_voxel}, {"set", to_json(f.set)}});
  return {{"base_point", to_std(t.base_point)},
          {"omega1", to_json(t.omega1)},
          {"fibers", fibers},
          {"alpha", t.alpha},
          {"alpha_star", t.alpha_star}};
}

TowerData tower_from_json(const nlohmann::json& j) {
  TowerData t;
  t.base_point = to_vec(j.at("base_point").get<std::vector<double>>());
  t.omega1 = grid_set_from_json(j.at("omega1"));
  for (const auto& f : j.at("fibers")) t.fibers.push_back({f.at("s_voxel").get<std::int64_t>(), grid_set_from_json(f.at("set"))});
  std::sort(t.fibers.begin(), t.fibers.end(), [](const TowerFiber& a, const TowerFiber& b) { return a.s_voxel < b.s_voxel; });
  t.alpha = j.at("alpha").get<double>();
  t.alpha_star = j.at("alpha_star").get<double>();
  return t;
}

}  // namespace rlt
