#include "rlt/transform/incidence.hpp"

#include <algorithm>
#include <cmath>

#include "rlt/core/error.hpp"
#include "rlt/core/rng.hpp"

namespace rlt {

namespace {

struct Segment {
  double lo;
  double hi;
  double value;
};

// Columns of a source as coordinate segments, sampled at the (sub)column points of the t-grid.
struct ColumnSample {
  int lead = 0;
  double weight = 0.0;               // leading-coordinate measure per point
  std::vector<double> coords;        // point-major, `lead` values per point
  std::vector<std::uint32_t> slot;   // column slot of each point
  std::vector<std::size_t> offsets;  // per slot into segments
  std::vector<Segment> segments;
  std::vector<double> lo, hi;        // vertical extent per slot

  std::size_t size() const { return slot.size(); }
  const double* point(std::size_t i) const { return coords.data() + i * static_cast<std::size_t>(lead); }
};

void add_points(ColumnSample& cs, const GridGeometry& g, std::int64_t column, const std::vector<int>& m, std::uint32_t slot_index) {
  const int lead = g.dim - 1;
  const auto multi = g.column_multi_index(column);
  std::vector<int> j(lead, 0);
  while (true) {
    for (int k = 0; k < lead; ++k)
      cs.coords.push_back(g.origin[k] + (static_cast<double>(multi[k]) + (j[k] + 0.5) / m[k]) * g.spacing[k]);
    cs.slot.push_back(slot_index);
    int k = lead - 1;
    while (k >= 0 && ++j[k] == m[k]) j[k--] = 0;
    if (k < 0) break;
  }
}

double point_weight(const GridGeometry& g, const std::vector<int>& m) {
  double w = 1.0;
  for (int k = 0; k + 1 < g.dim; ++k) w *= g.spacing[k] / m[k];
  return w;
}

void finish_slot(ColumnSample& cs) {
  const std::size_t begin = cs.offsets.back();
  cs.offsets.push_back(cs.segments.size());
  cs.lo.push_back(cs.segments[begin].lo);
  cs.hi.push_back(cs.segments.back().hi);
}

ColumnSample sample_set(const GridSet& s, const std::vector<int>& m) {
  const GridGeometry& g = s.geometry();
  const int d = g.dim;
  ColumnSample cs;
  cs.lead = d - 1;
  cs.weight = point_weight(g, m);
  cs.offsets.push_back(0);
  for (std::size_t slot = 0; slot < s.column_slots(); ++slot) {
    for (const Run& r : s.column_runs(slot))
      cs.segments.push_back({g.origin[d - 1] + static_cast<double>(r.lo) * g.spacing[d - 1],
                             g.origin[d - 1] + static_cast<double>(r.hi) * g.spacing[d - 1], 1.0});
    finish_slot(cs);
    add_points(cs, g, s.column_id(slot), m, static_cast<std::uint32_t>(slot));
  }
  return cs;
}

ColumnSample sample_function(const GridFunction& f, const std::vector<int>& m) {
  const GridGeometry& g = f.geometry();
  const int d = g.dim;
  const std::int64_t depth = g.depth();
  ColumnSample cs;
  cs.lead = d - 1;
  cs.weight = point_weight(g, m);
  cs.offsets.push_back(0);
  std::uint32_t slot = 0;
  for (std::int64_t c = 0; c < g.column_count(); ++c) {
    const std::size_t before = cs.segments.size();
    std::int64_t k = 0;
    while (k < depth) {
      const double v = f.at(c, k);
      std::int64_t e = k + 1;
      while (e < depth && f.at(c, e) == v) ++e;
      if (v > 0.0)
        cs.segments.push_back({g.origin[d - 1] + static_cast<double>(k) * g.spacing[d - 1],
                               g.origin[d - 1] + static_cast<double>(e) * g.spacing[d - 1], v});
      k = e;
    }
    if (cs.segments.size() == before) continue;
    finish_slot(cs);
    add_points(cs, g, c, m, slot++);
  }
  return cs;
}

inline double squared_distance(const double* a, const double* b, int lead) {
  double s = 0.0;
  for (int k = 0; k < lead; ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

// Length of (union of a-segments) intersected with (b-segments shifted up by `shift`).
inline double overlap(const Segment* a, const Segment* a_end, const Segment* b, const Segment* b_end, double shift) {
  double total = 0.0;
  while (a != a_end && b != b_end) {
    const double blo = b->lo + shift;
    const double bhi = b->hi + shift;
    const double lo = std::max(a->lo, blo);
    const double hi = std::min(a->hi, bhi);
    if (hi > lo) total += hi - lo;
    if (a->hi < bhi)
      ++a;
    else
      ++b;
  }
  return total;
}

// sum over a-points p and b-points r of |col_a(p) cap (col_b(r) + |p - r|^2)|.
double incidence_sum(const ColumnSample& a, const ColumnSample& b, std::optional<double> bound) {
  const int lead = a.lead;
  const double bound2 = bound ? *bound * *bound : INFINITY;
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::uint32_t sa = a.slot[i];
    const double* p = a.point(i);
    const double alo = a.lo[sa], ahi = a.hi[sa];
    const Segment* a0 = a.segments.data() + a.offsets[sa];
    const Segment* a1 = a.segments.data() + a.offsets[sa + 1];
    double row = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double s = squared_distance(p, b.point(j), lead);
      const std::uint32_t sb = b.slot[j];
      if (s > bound2 || ahi <= b.lo[sb] + s || alo >= b.hi[sb] + s) continue;
      row += overlap(a0, a1, b.segments.data() + b.offsets[sb], b.segments.data() + b.offsets[sb + 1], s);
    }
    total += row;
  }
  return total * a.weight * b.weight;
}

std::optional<double> effective_bound(const QuadratureSpec& q, bool localized) {
  if (localized) return q.t_bound ? std::min(1.0, *q.t_bound) : 1.0;
  return q.t_bound;
}

// Adds `value` on voxel indices whose centers lie in [lo, hi) to a difference array covering [k0, k0 + n).
inline void add_range(std::vector<double>& diff, std::int64_t k0, std::int64_t n, double o, double h, double lo, double hi,
                      double value) {
  auto kl = static_cast<std::int64_t>(std::ceil((lo - o) / h - 0.5)) - k0;
  auto kh = static_cast<std::int64_t>(std::ceil((hi - o) / h - 0.5)) - k0;
  kl = std::max<std::int64_t>(kl, 0);
  kh = std::min(kh, n);
  if (kl >= kh) return;
  diff[static_cast<std::size_t>(kl)] += value;
  diff[static_cast<std::size_t>(kh)] -= value;
}

void check_dims(int a, int b) {
  if (a != b) throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
  if (a < 2) throw Error(ErrorKind::DimensionUnsupported, "incidence geometry needs d >= 2");
}

}  // namespace

GridFunction apply_T(const GridFunction& f, const GridGeometry& out, const QuadratureSpec& q, bool localized) {
  check_dims(f.dim(), out.dim);
  const ColumnSample src = sample_function(f, t_subdivisions(f.geometry(), q));
  const auto bound = effective_bound(q, localized);
  const double bound2 = bound ? *bound * *bound : INFINITY;
  const int d = out.dim;
  const std::int64_t depth = out.depth();
  const double o = out.origin[d - 1];
  const double h = out.spacing[d - 1];
  const double top = o + static_cast<double>(depth) * h;
  GridFunction result(out);
  std::vector<double> diff(static_cast<std::size_t>(depth + 1));
  for (std::int64_t c = 0; c < out.column_count(); ++c) {
    const Vec xp = out.column_center(c);
    std::fill(diff.begin(), diff.end(), 0.0);
    bool touched = false;
    for (std::size_t j = 0; j < src.size(); ++j) {
      const double s = squared_distance(xp.data(), src.point(j), src.lead);
      const std::uint32_t sb = src.slot[j];
      if (s > bound2 || src.lo[sb] + s >= top || src.hi[sb] + s <= o) continue;
      for (std::size_t g = src.offsets[sb]; g < src.offsets[sb + 1]; ++g) {
        const Segment& seg = src.segments[g];
        add_range(diff, 0, depth, o, h, seg.lo + s, seg.hi + s, seg.value * src.weight);
      }
      touched = true;
    }
    if (!touched) continue;
    double acc = 0.0;
    for (std::int64_t k = 0; k < depth; ++k) {
      acc += diff[static_cast<std::size_t>(k)];
      result.at(c, k) = acc > 0.0 ? acc : 0.0;
    }
  }
  return result;
}

std::vector<double> evaluate_T(const GridFunction& f, const std::vector<SpacePoint>& points, const QuadratureSpec& q,
                               bool localized) {
  const GridGeometry& g = f.geometry();
  const std::vector<int> m = t_subdivisions(g, q);
  const ColumnSample src = sample_function(f, m);
  const auto bound = effective_bound(q, localized);
  const double bound2 = bound ? *bound * *bound : INFINITY;
  const int lead = g.dim - 1;
  std::vector<double> out;
  out.reserve(points.size());
  for (const SpacePoint& x : points) {
    check_dims(static_cast<int>(x.size()), g.dim);
    double sum = 0.0;
    for (std::size_t j = 0; j < src.size(); ++j) {
      const double s = squared_distance(x.data(), src.point(j), lead);
      if (s > bound2) continue;
      const double y = last(x) - s;
      const std::uint32_t sb = src.slot[j];
      for (std::size_t k = src.offsets[sb]; k < src.offsets[sb + 1]; ++k)
        if (src.segments[k].lo <= y && y < src.segments[k].hi) {
          sum += src.segments[k].value;
          break;
        }
    }
    out.push_back(sum * src.weight);
  }
  return out;
}

std::vector<double> indicator_transform(const GridSet& source, const GridSet& targets, const QuadratureSpec& q,
                                        Direction direction) {
  check_dims(source.dim(), targets.dim());
  const ColumnSample src = sample_set(source, t_subdivisions(source.geometry(), q));
  const double bound2 = q.t_bound ? *q.t_bound * *q.t_bound : INFINITY;
  const double sign = direction == Direction::Forward ? 1.0 : -1.0;
  const GridGeometry& g = targets.geometry();
  const int d = g.dim;
  const double o = g.origin[d - 1];
  const double h = g.spacing[d - 1];
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(targets.voxel_count()));
  std::vector<double> diff;
  for (std::size_t slot = 0; slot < targets.column_slots(); ++slot) {
    const Vec xp = g.column_center(targets.column_id(slot));
    const auto runs = targets.column_runs(slot);
    const std::int64_t k0 = runs.front().lo;
    const std::int64_t n = runs.back().hi - k0;
    const double lo = o + static_cast<double>(k0) * h;
    const double hi = o + static_cast<double>(runs.back().hi) * h;
    diff.assign(static_cast<std::size_t>(n + 1), 0.0);
    for (std::size_t j = 0; j < src.size(); ++j) {
      const double s = squared_distance(xp.data(), src.point(j), src.lead);
      const std::uint32_t sb = src.slot[j];
      // Forward: x_d - s in source segment; adjoint: y_d + s in source segment.
      const double shift = sign * s;
      if (s > bound2 || src.lo[sb] + shift >= hi || src.hi[sb] + shift <= lo) continue;
      for (std::size_t k = src.offsets[sb]; k < src.offsets[sb + 1]; ++k)
        add_range(diff, k0, n, o, h, src.segments[k].lo + shift, src.segments[k].hi + shift, src.weight);
    }
    double acc = 0.0;
    std::int64_t k = k0;
    for (const Run& r : runs) {
      for (; k < r.lo; ++k) acc += diff[static_cast<std::size_t>(k - k0)];
      for (; k < r.hi; ++k) {
        acc += diff[static_cast<std::size_t>(k - k0)];
        out.push_back(std::max(acc, 0.0));
      }
    }
  }
  return out;
}

double bilinear(const GridSet& E, const GridSet& Estar, const QuadratureSpec& q) {
  check_dims(E.dim(), Estar.dim());
  const auto m = t_subdivisions(Estar.geometry(), q);
  if (E.empty() || Estar.empty()) return 0.0;
  const std::vector<int> ones(E.dim() - 1, 1);
  return incidence_sum(sample_set(E, ones), sample_set(Estar, m), q.t_bound);
}

double bilinear_transpose(const GridSet& E, const GridSet& Estar, const QuadratureSpec& q) {
  check_dims(E.dim(), Estar.dim());
  const auto m = t_subdivisions(E.geometry(), q);
  if (E.empty() || Estar.empty()) return 0.0;
  const std::vector<int> ones(E.dim() - 1, 1);
  return incidence_sum(sample_set(E, m), sample_set(Estar, ones), q.t_bound);
}

McEstimate bilinear_mc(const GridSet& E, const GridSet& Estar, std::uint64_t seed, std::size_t n) {
  check_dims(E.dim(), Estar.dim());
  if (E.empty()) throw Error(ErrorKind::EmptySet, "bilinear_mc needs |E| > 0");
  if (Estar.empty() || n == 0) return {};
  const int lead = E.dim() - 1;
  const Box sb = Estar.occupied_bounds();
  // t-box for x: x' minus the E* box, padded by one E* spacing.
  Vec tlo(lead), width(lead);
  double volume = 1.0;
  for (int k = 0; k < lead; ++k) {
    const double pad = Estar.geometry().spacing[k];
    tlo(k) = -sb.hi(k) - pad;
    width(k) = sb.hi(k) - sb.lo(k) + 2.0 * pad;
    volume *= width(k);
  }
  const VoxelSampler sampler(E);
  constexpr std::size_t kBlock = 1 << 16;
  std::uint64_t hits = 0;
  SpacePoint y(E.dim());
  for (std::size_t block = 0, done = 0; done < n; ++block) {
    CounterRng rng(seed, block);
    const std::size_t count = std::min(kBlock, n - done);
    for (std::size_t i = 0; i < count; ++i) {
      const SpacePoint x = sampler(rng);
      double t2 = 0.0;
      for (int k = 0; k < lead; ++k) {
        const double t = x(k) + tlo(k) + width(k) * rng.uniform();
        y(k) = x(k) - t;
        t2 += t * t;
      }
      y(lead) = x(lead) - t2;
      hits += Estar.contains(y) ? 1 : 0;
    }
    done += count;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  const double scale = E.measure() * volume;
  const double var = n > 1 ? p * (1.0 - p) * static_cast<double>(n) / static_cast<double>(n - 1) : 0.0;
  return {scale * p, scale * std::sqrt(var / static_cast<double>(n))};
}

ScorePair make_score(double incidence, double measure_E, double measure_Estar, int d) {
  ScorePair s;
  s.incidence = incidence;
  s.alpha = incidence / measure_E;
  s.alpha_star = incidence / measure_Estar;
  const double power = static_cast<double>(d) / (d + 1);
  s.epsilon = incidence / (std::pow(measure_E, power) * std::pow(measure_Estar, power));
  return s;
}

ScorePair score(const GridSet& E, const GridSet& Estar, const QuadratureSpec& q) {
  if (E.empty() || Estar.empty()) throw Error(ErrorKind::EmptySet, "score needs two sets of positive measure");
  return make_score(bilinear(E, Estar, q), E.measure(), Estar.measure(), E.dim());
}

}  // namespace rlt
