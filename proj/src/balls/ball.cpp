#include "rlt/balls/ball.hpp"

#include <cmath>

#include "rlt/core/error.hpp"

namespace rlt {

BallParams make_ball(const IncidencePoint& center, const Mat& basis, const Vec& r, const Vec& r_star) {
  const int d = center.dim();
  const int n = d - 1;
  if (d < 2 || center.second.size() != d || r.size() != n || r_star.size() != n || basis.rows() != n || basis.cols() != n)
    throw Error(ErrorKind::InvalidArgument, "ball vectors must have length d-1");
  for (int j = 0; j < n; ++j)
    if (!(r(j) > 0.0) || !(r_star(j) > 0.0) || !std::isfinite(r(j)) || !std::isfinite(r_star(j)))
      throw Error(ErrorKind::InvalidArgument, "radii must be positive and finite");
  const Mat gram = basis * basis.transpose();
  if ((gram - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > kBasisTolerance)
    throw Error(ErrorKind::BasisNotOrthonormal, "basis Gram matrix deviates from identity");
  const double rho = r(0) * r_star(0);
  for (int j = 0; j < n; ++j)
    if (std::abs(r(j) * r_star(j) - rho) > kDualityTolerance * rho)
      throw Error(ErrorKind::DualityViolated, "r_j r*_j differs from rho at j=" + std::to_string(j));
  if (!is_incident(center))
    throw Error(ErrorKind::OffManifold, "center residual " + std::to_string(center.residual()));
  return {center, basis, r, r_star, rho};
}

BallParams unit_ball(int d) {
  const Vec zero = Vec::Zero(d);
  return make_ball({zero, zero}, Mat::Identity(d - 1, d - 1), Vec::Ones(d - 1), Vec::Ones(d - 1));
}

bool ball_membership(const BallParams& b, const IncidencePoint& z) {
  if (z.dim() != b.dim() || !is_incident(z)) return false;
  const Vec& xb = b.center.first;
  const Vec& yb = b.center.second;
  const Vec xp = head(z.first), yp = head(z.second);
  const Vec cx = b.basis * (xp - head(xb));
  const Vec cy = b.basis * (yp - head(yb));
  for (int j = 0; j < b.r.size(); ++j)
    if (!(std::abs(cx(j)) < b.r(j)) || !(std::abs(cy(j)) < b.r_star(j))) return false;
  return std::abs(last(z.first) - last(yb) - (xp - head(yb)).squaredNorm()) < b.rho &&
         std::abs(last(z.second) - last(xb) + (yp - head(xb)).squaredNorm()) < b.rho;
}

EnvelopeRegion::EnvelopeRegion(Vec box_center, Mat basis, Vec half_widths, SpacePoint apex, double sign, double rho)
    : box_center_(std::move(box_center)),
      basis_(std::move(basis)),
      half_widths_(std::move(half_widths)),
      apex_(std::move(apex)),
      sign_(sign),
      rho_(rho) {}

bool EnvelopeRegion::in_box(const Vec& xp) const {
  const Vec c = basis_ * (xp - box_center_);
  for (int j = 0; j < c.size(); ++j)
    if (!(std::abs(c(j)) < half_widths_(j))) return false;
  return true;
}

double EnvelopeRegion::slab_center(const Vec& xp) const { return last(apex_) + sign_ * (xp - head(apex_)).squaredNorm(); }

bool EnvelopeRegion::contains(const SpacePoint& p) const {
  return in_box(head(p)) && std::abs(last(p) - slab_center(head(p))) < rho_;
}

void EnvelopeRegion::column(const Vec& xp, std::vector<Interval>& out) const {
  if (!in_box(xp)) return;
  const double c = slab_center(xp);
  out.push_back({c - rho_, c + rho_});
}

double EnvelopeRegion::exact_measure() const { return std::pow(2.0, dim()) * rho_ * half_widths_.prod(); }

Box EnvelopeRegion::bounds() const {
  const int n = dim() - 1;
  Box b{Vec(n + 1), Vec(n + 1)};
  // Leading extent of the rotated box: sum_j |e_j[i]| w_j.
  for (int i = 0; i < n; ++i) {
    double ext = 0.0;
    for (int j = 0; j < n; ++j) ext += std::abs(basis_(j, i)) * half_widths_(j);
    b.lo(i) = box_center_(i) - ext;
    b.hi(i) = box_center_(i) + ext;
  }
  // |x' - apex'|^2 over the box: max at a corner, min at the clamped projection (in frame coordinates).
  const Vec a = basis_ * (head(apex_) - box_center_);
  double dmin = 0.0, dmax = 0.0;
  for (int j = 0; j < n; ++j) {
    const double clamped = std::clamp(a(j), -half_widths_(j), half_widths_(j));
    dmin += (a(j) - clamped) * (a(j) - clamped);
    const double far = std::abs(a(j)) + half_widths_(j);
    dmax += far * far;
  }
  const double lo = sign_ > 0 ? dmin : -dmax;
  const double hi = sign_ > 0 ? dmax : -dmin;
  b.lo(n) = last(apex_) + lo - rho_;
  b.hi(n) = last(apex_) + hi + rho_;
  return b;
}

EnvelopePair envelope(const BallParams& b) {
  const Vec& xb = b.center.first;
  const Vec& yb = b.center.second;
  auto e = std::make_shared<EnvelopeRegion>(head(xb), b.basis, b.r, yb, 1.0, b.rho);
  auto es = std::make_shared<EnvelopeRegion>(head(yb), b.basis, b.r_star, xb, -1.0, b.rho);
  return {e, es, e->exact_measure(), es->exact_measure()};
}

EnvelopeRegion shrunk_envelope(const BallParams& b, double eps) {
  return EnvelopeRegion(head(b.center.first), b.basis, eps * b.r, b.center.second, 1.0, eps * b.rho);
}

namespace {

double default_cells(int d) { return d == 2 ? 64.0 : 8.0; }

std::vector<double> envelope_spacing(const Vec& radii, double rho, const RasterSpec& spec) {
  const int n = static_cast<int>(radii.size());
  const double cells = spec.cells_per_radius > 0 ? spec.cells_per_radius : default_cells(n + 1);
  std::vector<double> h(n + 1, radii.minCoeff() / cells);
  h[n] = rho / spec.cells_per_rho;
  return h;
}

}  // namespace

EnvelopeRaster rasterize_envelope(const BallParams& b, const RasterSpec& spec) {
  const EnvelopePair env = envelope(b);
  return {rasterize(*env.E_env, envelope_spacing(b.r, b.rho, spec)),
          rasterize(*env.Estar_env, envelope_spacing(b.r_star, b.rho, spec))};
}

ScorePair verify_quasiextremal(const BallParams& b, const QuadratureSpec& q, const RasterSpec& spec) {
  const EnvelopeRaster raster = rasterize_envelope(b, spec);
  return score(raster.E, raster.Estar, q);
}

bool in_shrunk_set(const BallParams& b, double eps, const SpacePoint& x) {
  return shrunk_envelope(b, eps).contains(x);
}

double shrunk_slice_measure(const BallParams& b, double eps, const SpacePoint& x, const QuadratureSpec& q) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0, 1)");
  if (!in_shrunk_set(b, eps, x)) throw Error(ErrorKind::NotInShrunkSet, "x violates the shrunk envelope conditions");
  const int n = b.dim() - 1;
  std::vector<int> cells(n);
  for (int j = 0; j < n; ++j)
    cells[j] = q.t_resolution ? std::max(1, static_cast<int>(std::ceil(2.0 * b.r_star(j) / *q.t_resolution))) : 64;
  // Midpoint sweep over the dual box in frame coordinates.
  std::vector<int> idx(n, 0);
  std::int64_t hits = 0, total = 0;
  const Vec yc = head(b.center.second);
  while (true) {
    Vec u(n);
    for (int j = 0; j < n; ++j) u(j) = b.r_star(j) * (-1.0 + (2.0 * idx[j] + 1.0) / cells[j]);
    const Vec yp = yc + b.basis.transpose() * u;
    const IncidencePoint z = on_manifold(x, yp);
    hits += ball_membership(b, z) ? 1 : 0;
    ++total;
    int j = n - 1;
    while (j >= 0 && ++idx[j] == cells[j]) idx[j--] = 0;
    if (j < 0) break;
  }
  return std::pow(2.0, n) * b.r_star.prod() * static_cast<double>(hits) / static_cast<double>(total);
}

nlohmann::json to_json(const BallParams& b) {
  const int n = b.dim() - 1;
  std::vector<double> basis;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) basis.push_back(b.basis(i, j));
  return {{"center_x", to_std(b.center.first)}, {"center_xstar", to_std(b.center.second)},
          {"basis", basis},                     {"r", to_std(b.r)},
          {"r_star", to_std(b.r_star)},         {"rho", b.rho}};
}

BallParams ball_from_json(const nlohmann::json& j) {
  try {
    const Vec x = to_vec(j.at("center_x").get<std::vector<double>>());
    const Vec xs = to_vec(j.at("center_xstar").get<std::vector<double>>());
    const auto flat = j.at("basis").get<std::vector<double>>();
    const int n = static_cast<int>(x.size()) - 1;
    if (static_cast<int>(flat.size()) != n * n) throw Error(ErrorKind::InvalidArgument, "basis must hold (d-1)^2 entries");
    Mat e(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) e(r, c) = flat[r * n + c];
    BallParams b = make_ball({x, xs}, e, to_vec(j.at("r").get<std::vector<double>>()),
                             to_vec(j.at("r_star").get<std::vector<double>>()));
    if (j.contains("rho") && std::abs(j.at("rho").get<double>() - b.rho) > kDualityTolerance * b.rho)
      throw Error(ErrorKind::DualityViolated, "rho does not equal r_1 r*_1");
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed ball: ") + e.what());
  }
}

}  // namespace rlt
