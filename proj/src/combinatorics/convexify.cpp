#include "rlt/combinatorics/convexify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rlt/core/error.hpp"

namespace rlt {

namespace {

constexpr int kDirections = 8;

struct WeightedPoint {
  Vec p;
  double half = 0.0;  // half voxel width along the single axis (n = 1)
  double w = 0.0;
};

std::vector<WeightedPoint> voxel_points(const GridSet& S) {
  std::vector<WeightedPoint> out;
  const double vol = S.geometry().voxel_volume();
  const double half = 0.5 * S.geometry().spacing.back();
  S.for_each_voxel([&](const SpacePoint& p) { out.push_back({p, half, vol}); });
  return out;
}

double weighted_median(std::vector<std::pair<double, double>> v) {
  std::sort(v.begin(), v.end());
  double total = 0.0;
  for (const auto& [x, w] : v) total += w;
  double acc = 0.0;
  for (const auto& [x, w] : v) {
    acc += w;
    if (acc >= 0.5 * total) return x;
  }
  return v.back().first;
}

using Polygon = std::vector<Eigen::Vector2d>;

Polygon clip(const Polygon& poly, const Eigen::Vector2d& n, double c) {
  // Keeps {x : <x, n> <= c}.
  Polygon out;
  const std::size_t k = poly.size();
  for (std::size_t i = 0; i < k; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % k];
    const double fa = a.dot(n) - c, fb = b.dot(n) - c;
    if (fa <= 0.0) out.push_back(a);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) out.push_back(a + (b - a) * (fa / (fa - fb)));
  }
  return out;
}

Polygon slab_polygon(const std::vector<Slab>& slabs) {
  double R = 1.0;
  for (const Slab& s : slabs) R = std::max(R, 2.0 * s.half_width);
  Polygon poly{{-R, -R}, {R, -R}, {R, R}, {-R, R}};
  for (const Slab& s : slabs) {
    const Eigen::Vector2d n(s.direction(0), s.direction(1));
    poly = clip(poly, n, s.half_width);
    poly = clip(poly, -n, s.half_width);
    if (poly.empty()) break;
  }
  return poly;
}

double polygon_area(const Polygon& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& u = p[i];
    const auto& v = p[(i + 1) % p.size()];
    a += u.x() * v.y() - v.x() * u.y();
  }
  return 0.5 * std::abs(a);
}

double slab_measure(const std::vector<Slab>& slabs, int n) {
  if (n == 1) {
    double w = INFINITY;
    for (const Slab& s : slabs) w = std::min(w, s.half_width / std::abs(s.direction(0)));
    return 2.0 * w;
  }
  return polygon_area(slab_polygon(slabs));
}

void check_dimension(int n) {
  if (n > 2) throw Error(ErrorKind::DimensionUnsupported, "convexification is implemented for n <= 2, got n = " + std::to_string(n));
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "convexification needs n >= 1");
}

// n = 1: symmetric intervals, mass by exact overlap.
ConvexApprox convexify_1d(const std::vector<WeightedPoint>& pts, double total, double eta, double c0) {
  auto mass = [&](double a) {
    double m = 0.0;
    for (const WeightedPoint& q : pts) {
      const double lo = std::max(-a, q.p(0) - q.half), hi = std::min(a, q.p(0) + q.half);
      if (hi > lo) m += q.w * (hi - lo) / (2.0 * q.half);
    }
    return m;
  };
  int m = 0;
  double a = 0.5 * total;
  while (mass(a) < 0.75 * total) {
    a *= 2.0;
    ++m;
  }
  while (m > 0 && mass(0.5 * a) >= (1.0 - c0 * std::pow(2.0, -eta * m)) * mass(a)) {
    a *= 0.5;
    --m;
  }
  ConvexApprox c;
  Vec e(1);
  e(0) = 1.0;
  c.slabs = {{e, a}};
  c.measure = 2.0 * a;
  c.exclusion_constant = (mass(a) - mass(0.5 * a)) / total;
  c.m = m;
  return c;
}

// n = 2: intersections of slabs in the directions k pi / 8.
ConvexApprox convexify_2d(const std::vector<WeightedPoint>& pts, double total, double eta, double c0) {
  std::vector<Vec> dirs;
  for (int k = 0; k < kDirections; ++k) {
    Vec v(2);
    v << std::cos(k * std::numbers::pi / kDirections), std::sin(k * std::numbers::pi / kDirections);
    dirs.push_back(v);
  }
  std::vector<std::array<double, kDirections>> proj(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int k = 0; k < kDirections; ++k) proj[i][k] = std::abs(pts[i].p.dot(dirs[k]));
  using Widths = std::array<double, kDirections>;
  auto mass = [&](const Widths& w) {
    double m = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      bool in = true;
      for (int k = 0; k < kDirections && in; ++k) in = proj[i][k] <= w[k];
      if (in) m += pts[i].w;
    }
    return m;
  };
  auto slabs_of = [&](const Widths& w) {
    std::vector<Slab> s;
    for (int k = 0; k < kDirections; ++k) s.push_back({dirs[k], w[k]});
    return s;
  };
  auto area = [&](const Widths& w) { return polygon_area(slab_polygon(slabs_of(w))); };
  // Half-area candidates: one slab pulled in, or a uniform shrink by 1/sqrt(2).
  auto candidates = [&](const Widths& w) {
    const double target = 0.5 * area(w);
    std::vector<Widths> out;
    for (int k = 0; k < kDirections; ++k) {
      Widths c = w;
      double lo = 0.0, hi = w[k];
      for (int it = 0; it < 60; ++it) {
        c[k] = 0.5 * (lo + hi);
        (area(c) > target ? hi : lo) = c[k];
      }
      c[k] = 0.5 * (lo + hi);
      out.push_back(c);
    }
    Widths s = w;
    for (double& x : s) x /= std::numbers::sqrt2;
    out.push_back(s);
    return out;
  };

  const double octagon = 8.0 * std::tan(std::numbers::pi / 8.0);
  int m = 0;
  Widths w;
  auto regular = [&](double a) {
    Widths r;
    r.fill(std::sqrt(a / octagon));
    return r;
  };
  w = regular(total);
  while (mass(w) < 0.75 * total) w = regular(total * std::pow(2.0, ++m));
  while (m > 0) {
    const double cur = mass(w);
    double best_mass = -1.0;
    Widths best{};
    for (const Widths& c : candidates(w)) {
      const double cm = mass(c);
      if (cm > best_mass) best_mass = cm, best = c;
    }
    if (best_mass < (1.0 - c0 * std::pow(2.0, -eta * m)) * cur) break;
    w = best;
    --m;
  }
  ConvexApprox c;
  c.slabs = slabs_of(w);
  c.measure = area(w);
  const double cur = mass(w);
  c.exclusion_constant = INFINITY;
  for (const Widths& cand : candidates(w)) c.exclusion_constant = std::min(c.exclusion_constant, (cur - mass(cand)) / total);
  c.m = m;
  return c;
}

}  // namespace

bool ConvexApprox::contains(const Vec& p) const {
  const Vec x = p - center_offset;
  for (const Slab& s : slabs)
    if (std::abs(x.dot(s.direction)) > s.half_width) return false;
  return true;
}

ConvexApprox convexify(const GridSet& S, const ConvexifyOptions& opt) {
  const int n = S.dim();
  check_dimension(n);
  if (S.empty()) throw Error(ErrorKind::EmptySet, "cannot convexify an empty set");
  if (!(opt.eta > 0.0 && opt.eta < 1.0)) throw Error(ErrorKind::InvalidArgument, "eta must lie in (0, 1)");
  const double c0 = opt.c0 > 0.0 ? opt.c0 : 0.25 * (1.0 - std::pow(2.0, -opt.eta));
  std::vector<WeightedPoint> pts = voxel_points(S);
  Vec offset = Vec::Zero(n);
  if (!opt.balanced) {
    for (int k = 0; k < n; ++k) {
      std::vector<std::pair<double, double>> v;
      v.reserve(pts.size());
      for (const WeightedPoint& q : pts) v.emplace_back(q.p(k), q.w);
      offset(k) = weighted_median(std::move(v));
    }
    for (WeightedPoint& q : pts) q.p -= offset;
  }
  ConvexApprox c = n == 1 ? convexify_1d(pts, S.measure(), opt.eta, c0) : convexify_2d(pts, S.measure(), opt.eta, c0);
  c.center_offset = offset;
  return c;
}

ConvexApprox make_convex(const std::vector<Slab>& slabs, const Vec& center_offset) {
  const int n = static_cast<int>(center_offset.size());
  check_dimension(n);
  if (slabs.empty()) throw Error(ErrorKind::InvalidArgument, "a convex set needs at least one slab");
  ConvexApprox c;
  c.center_offset = center_offset;
  c.slabs = slabs;
  c.measure = slab_measure(slabs, n);
  return c;
}

std::vector<Vec> convex_vertices(const std::vector<Slab>& slabs, int n) {
  check_dimension(n);
  std::vector<Vec> out;
  if (n == 1) {
    const double a = 0.5 * slab_measure(slabs, 1);
    Vec v(1);
    v(0) = -a;
    out.push_back(v);
    v(0) = a;
    out.push_back(v);
    return out;
  }
  for (const auto& p : slab_polygon(slabs)) {
    Vec v(2);
    v << p.x(), p.y();
    out.push_back(v);
  }
  return out;
}

Ellipsoid mvee(const std::vector<Vec>& points, double tolerance) {
  if (points.empty()) throw Error(ErrorKind::ExtractionFailed, "no points for the enclosing ellipsoid");
  const int n = static_cast<int>(points.front().size());
  const int N = static_cast<int>(points.size());
  if (N < n + 1) throw Error(ErrorKind::ExtractionFailed, "too few points for an enclosing ellipsoid");
  Eigen::MatrixXd P(n, N), Q(n + 1, N);
  for (int i = 0; i < N; ++i) {
    P.col(i) = Eigen::VectorXd(points[i]);
    Q.col(i) << Eigen::VectorXd(points[i]), 1.0;
  }
  Eigen::VectorXd u = Eigen::VectorXd::Constant(N, 1.0 / N);
  for (int it = 0; it < 100000; ++it) {
    const Eigen::MatrixXd X = Q * u.asDiagonal() * Q.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(X);
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-14)
      throw Error(ErrorKind::ExtractionFailed, "points do not span the space");
    const Eigen::VectorXd M = (Q.array() * ldlt.solve(Q).array()).colwise().sum().transpose();
    Eigen::Index j;
    const double Mj = M.maxCoeff(&j);
    const double step = (Mj - n - 1.0) / ((n + 1.0) * (Mj - 1.0));
    Eigen::VectorXd next = (1.0 - step) * u;
    next(j) += step;
    const double err = (next - u).norm();
    u = next;
    if (err < tolerance) break;
  }
  const Eigen::VectorXd c = P * u;
  const Eigen::MatrixXd cov = P * u.asDiagonal() * P.transpose() - c * c.transpose();
  const Eigen::MatrixXd M = cov.inverse() / n;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw Error(ErrorKind::ExtractionFailed, "degenerate enclosing ellipsoid");
  Ellipsoid e;
  e.center = c;
  e.M = M;
  e.axes = es.eigenvectors();
  e.radii = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return e;
}

nlohmann::json to_json(const ConvexApprox& c) {
  nlohmann::json slabs = nlohmann::json::array();
  for (const Slab& s : c.slabs) slabs.push_back({{"direction", to_std(s.direction)}, {"half_width", s.half_width}});
  return {{"center_offset", to_std(c.center_offset)},
          {"slabs", slabs},
          {"measure", c.measure},
          {"exclusion_constant", c.exclusion_constant},
          {"m", c.m}};
}

ConvexApprox convex_from_json(const nlohmann::json& j) {
  ConvexApprox c;
  c.center_offset = to_vec(j.at("center_offset").get<std::vector<double>>());
  for (const auto& s : j.at("slabs"))
    c.slabs.push_back({to_vec(s.at("direction").get<std::vector<double>>()), s.at("half_width").get<double>()});
  c.measure = j.at("measure").get<double>();
  c.exclusion_constant = j.at("exclusion_constant").get<double>();
  c.m = j.value("m", 0);
  return c;
}

}  // namespace rlt
