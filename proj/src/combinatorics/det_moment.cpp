#include "rlt/combinatorics/det_moment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "rlt/core/error.hpp"
#include "rlt/core/rng.hpp"

namespace rlt {

double WeightedPoints::total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

WeightedPoints lebesgue_points(const GridSet& S) {
  WeightedPoints mu;
  const double vol = S.geometry().voxel_volume();
  S.for_each_voxel([&](const SpacePoint& p) {
    mu.points.push_back(p);
    mu.weights.push_back(vol);
  });
  return mu;
}

namespace {

void check_n(int n) {
  if (n > 2) throw Error(ErrorKind::DimensionUnsupported, "determinant moment is implemented for n <= 2, got n = " + std::to_string(n));
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "determinant moment needs n >= 1");
}

}  // namespace

double slab_exclusion_mass(const WeightedPoints& mu, const ConvexApprox& C, double delta, int directions) {
  const int n = C.dim();
  check_n(n);
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::InvalidArgument, "delta must lie in (0, 1)");
  std::vector<Vec> dirs;
  if (n == 1) {
    dirs.push_back(Vec::Ones(1));
  } else {
    for (int k = 0; k < directions; ++k) {
      Vec v(2);
      v << std::cos(k * std::numbers::pi / directions), std::sin(k * std::numbers::pi / directions);
      dirs.push_back(v);
    }
  }
  double best = INFINITY;
  for (const Vec& theta : dirs) {
    double reach = 0.0;
    for (const Vec& v : convex_vertices(C.slabs, n)) reach = std::max(reach, std::abs(v.dot(theta)));
    double lo = 0.0, hi = reach;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      std::vector<Slab> s = C.slabs;
      s.push_back({theta, mid});
      (make_convex(s, C.center_offset).measure > delta * C.measure ? hi : lo) = mid;
    }
    const double w = 0.5 * (lo + hi);
    double outside = 0.0;
    for (std::size_t i = 0; i < mu.points.size(); ++i)
      if (std::abs((mu.points[i] - C.center_offset).dot(theta)) >= w) outside += mu.weights[i];
    best = std::min(best, outside);
  }
  return best;
}

DetMomentResult det_moment(const WeightedPoints& mu, const ConvexApprox& C, double delta, double lambda, double c,
                           std::uint64_t seed, std::size_t m) {
  const int n = C.dim();
  check_n(n);
  if (mu.points.empty() || mu.points.size() != mu.weights.size())
    throw Error(ErrorKind::InvalidArgument, "measure needs matching points and weights");
  if (m < 2) throw Error(ErrorKind::InvalidArgument, "need at least two Monte Carlo tuples");
  for (const Vec& p : mu.points) {
    if (p.size() != n) throw Error(ErrorKind::InvalidArgument, "point dimension differs from the convex set");
    if (!C.contains(p)) throw Error(ErrorKind::HypothesisViolated, "measure is not supported in the convex set");
  }
  std::vector<double> cumulative(mu.weights.size());
  std::partial_sum(mu.weights.begin(), mu.weights.end(), cumulative.begin());
  const double total = cumulative.back();
  auto draw = [&](CounterRng& rng) -> const Vec& {
    const double x = rng.uniform() * total;
    const auto i = std::upper_bound(cumulative.begin(), cumulative.end(), x) - cumulative.begin();
    return mu.points[static_cast<std::size_t>(std::min<std::ptrdiff_t>(i, static_cast<std::ptrdiff_t>(cumulative.size()) - 1))];
  };
  constexpr std::size_t kBlock = 65536;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t start = 0; start < m; start += kBlock) {
    CounterRng rng(seed, start / kBlock);
    const std::size_t stop = std::min(m, start + kBlock);
    for (std::size_t i = start; i < stop; ++i) {
      double v;
      if (n == 1) {
        v = std::abs(draw(rng)(0));
      } else {
        const Vec a = draw(rng);
        const Vec& b = draw(rng);
        v = std::abs(a(0) * b(1) - a(1) * b(0));
      }
      sum += v;
      sum2 += v * v;
    }
  }
  const double mean = sum / static_cast<double>(m);
  const double var = std::max(0.0, (sum2 / static_cast<double>(m) - mean * mean)) * static_cast<double>(m) / static_cast<double>(m - 1);
  const double scale = std::pow(total, n);
  DetMomentResult r;
  r.estimate = scale * mean;
  r.std_error = scale * std::sqrt(var / static_cast<double>(m));
  r.bound = c * std::pow(delta, n) * std::pow(lambda, n) * C.measure;
  r.ok = r.estimate >= r.bound;
  r.min_outside = slab_exclusion_mass(mu, C, delta);
  r.hypothesis_ok = r.min_outside >= lambda;
  return r;
}

}  // namespace rlt
