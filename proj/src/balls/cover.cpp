#include "rlt/balls/cover.hpp"

#include <cmath>

#include "rlt/core/error.hpp"
#include "rlt/core/rng.hpp"

namespace rlt {

SymmetryElement normalizing_symmetry(const BallParams& b) {
  const int d = b.dim();
  const int n = d - 1;
  const double root = std::sqrt(b.rho);
  Mat stretch = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) stretch(j, j) = b.r(j) / root;
  const Vec& xb = b.center.first;
  const Vec& yb = b.center.second;
  SymmetryElement g = SymmetryElement::sheared_linear(stretch);
  g = compose(SymmetryElement::parabolic_dilation(d, root), g);
  g = compose(SymmetryElement::rotation(b.basis.transpose()), g);
  g = compose(SymmetryElement::shear(head(xb) - head(yb)), g);
  g = compose(SymmetryElement::translation(yb), g);
  return g;
}

namespace {

constexpr std::int64_t kOffset = 1 << 20;

// Range of |x'|^2 over the cube a + [-h, h]^n.
std::pair<double, double> square_range(const Vec& a, double h) {
  double lo = 0.0, hi = 0.0;
  for (int k = 0; k < a.size(); ++k) {
    const double near = std::max(0.0, std::abs(a(k)) - h);
    const double far = std::abs(a(k)) + h;
    lo += near * near;
    hi += far * far;
  }
  return {lo, hi};
}

}  // namespace

BallCover::BallCover(const BallParams& b, double delta, double net_scale)
    : parent_(b), g_(normalizing_symmetry(b)), g_inv_(inverse(g_)) {
  if (!(delta > 0.0 && delta <= 1.0)) throw Error(ErrorKind::DeltaOutOfRange, "delta must lie in (0, 1]");
  if (!(net_scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "net scale must be positive");
  const int d = b.dim();
  const int n = d - 1;
  if (delta == 1.0) {
    balls_.push_back(b);
    return;
  }
  eta_ = std::pow(delta, 1.0 / (d + 1));
  const double sigma1 = net_scale * 0.8 / std::sqrt(static_cast<double>(n));
  const double sigma2 = 1.28 * net_scale * net_scale;
  n1_ = static_cast<std::int64_t>(std::ceil(2.0 / (sigma1 * eta_) - 1e-9));
  s1_ = 2.0 / static_cast<double>(n1_);
  sd_ = sigma2 * eta_ * eta_;

  std::int64_t cells = 1;
  for (int k = 0; k < n; ++k) cells *= n1_;
  std::vector<std::int64_t> ia(n), ib(n);
  for (std::int64_t ca = 0; ca < cells; ++ca) {
    Vec a(n);
    std::int64_t rest = ca;
    for (int k = n - 1; k >= 0; --k) {
      ia[k] = rest % n1_;
      rest /= n1_;
      a(k) = -1.0 + (static_cast<double>(ia[k]) + 0.5) * s1_;
    }
    const auto [sq_lo, sq_hi] = square_range(a, 0.5 * s1_);
    for (std::int64_t cb = 0; cb < cells; ++cb) {
      Vec bb(n);
      rest = cb;
      for (int k = n - 1; k >= 0; --k) {
        ib[k] = rest % n1_;
        rest /= n1_;
        bb(k) = -1.0 + (static_cast<double>(ib[k]) + 0.5) * s1_;
      }
      const Vec w = a - bb;
      // Targets x_d - 2 alpha.w - |alpha|^2 reachable from this cell pair.
      const double spread = s1_ * w.cwiseAbs().sum() + n * 0.25 * s1_ * s1_;
      const auto k_lo = static_cast<std::int64_t>(std::floor((sq_lo - 1.0 - spread) / sd_ - 0.5));
      const auto k_hi = static_cast<std::int64_t>(std::ceil((sq_hi + 1.0 + spread) / sd_ + 0.5));
      for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        const double c = static_cast<double>(k) * sd_;
        const IncidencePoint z{join(a, c), join(bb, c - w.squaredNorm())};
        const BallParams unit_sub = make_ball(z, Mat::Identity(n, n), Vec::Constant(n, eta_), Vec::Constant(n, eta_));
        index_[key(ia, ib, k)] = balls_.size();
        balls_.push_back(apply_ball(g_, unit_sub));
      }
    }
  }
}

std::uint64_t BallCover::key(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b, std::int64_t k) const {
  std::uint64_t h = static_cast<std::uint64_t>(k + kOffset);
  for (auto v : a) h = h * static_cast<std::uint64_t>(n1_) + static_cast<std::uint64_t>(v);
  for (auto v : b) h = h * static_cast<std::uint64_t>(n1_) + static_cast<std::uint64_t>(v);
  return h;
}

std::optional<std::size_t> BallCover::find(const IncidencePoint& z) const {
  if (balls_.size() == 1) return ball_membership(balls_[0], z) ? std::optional<std::size_t>(0) : std::nullopt;
  const int n = parent_.dim() - 1;
  const SpacePoint x = g_inv_.map_first(z.first);
  const SpacePoint y = g_inv_.map_second(z.second);
  std::vector<std::int64_t> ia(n), ib(n);
  Vec a(n), bb(n);
  for (int k = 0; k < n; ++k) {
    ia[k] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((x(k) + 1.0) / s1_)), 0, n1_ - 1);
    ib[k] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((y(k) + 1.0) / s1_)), 0, n1_ - 1);
    a(k) = -1.0 + (static_cast<double>(ia[k]) + 0.5) * s1_;
    bb(k) = -1.0 + (static_cast<double>(ib[k]) + 0.5) * s1_;
  }
  const Vec alpha = head(x) - a;
  const double target = last(x) - 2.0 * alpha.dot(a - bb) - alpha.squaredNorm();
  const auto k0 = static_cast<std::int64_t>(std::llround(target / sd_));
  auto probe = [&](const std::vector<std::int64_t>& pa, const std::vector<std::int64_t>& pb, std::int64_t k) -> std::optional<std::size_t> {
    auto it = index_.find(key(pa, pb, k));
    if (it != index_.end() && ball_membership(balls_[it->second], z)) return it->second;
    return std::nullopt;
  };
  if (auto hit = probe(ia, ib, k0)) return hit;
  // Neighbouring lattice cells.
  const int dims = 2 * n + 1;
  int combos = 1;
  for (int i = 0; i < dims; ++i) combos *= 3;
  std::vector<std::int64_t> pa(n), pb(n);
  for (int c = 0; c < combos; ++c) {
    int rest = c;
    bool valid = true;
    for (int k = 0; k < n; ++k) {
      pa[k] = ia[k] + rest % 3 - 1;
      rest /= 3;
      pb[k] = ib[k] + rest % 3 - 1;
      rest /= 3;
      valid = valid && pa[k] >= 0 && pa[k] < n1_ && pb[k] >= 0 && pb[k] < n1_;
    }
    const std::int64_t k = k0 + rest % 3 - 1;
    if (!valid) continue;
    if (auto hit = probe(pa, pb, k)) return hit;
  }
  return std::nullopt;
}

std::vector<BallParams> cover(const BallParams& b, double delta, double net_scale) {
  return BallCover(b, delta, net_scale).balls();
}

std::vector<IncidencePoint> sample_ball(const BallParams& b, std::size_t count, std::uint64_t seed) {
  const int n = b.dim() - 1;
  const Vec xc = head(b.center.first), yc = head(b.center.second);
  CounterRng rng(seed, 0xba11);
  std::vector<IncidencePoint> out;
  out.reserve(count);
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 1000 * count + 1000) throw Error(ErrorKind::InvalidArgument, "ball rejection sampler stalled");
    Vec u(n), v(n);
    for (int j = 0; j < n; ++j) {
      u(j) = rng.uniform(-b.r(j), b.r(j));
      v(j) = rng.uniform(-b.r_star(j), b.r_star(j));
    }
    const Vec xp = xc + b.basis.transpose() * u;
    const Vec yp = yc + b.basis.transpose() * v;
    const double xd = last(b.center.second) + (xp - yc).squaredNorm() + rng.uniform(-b.rho, b.rho);
    const IncidencePoint z = on_manifold(join(xp, xd), yp);
    if (ball_membership(b, z)) out.push_back(z);
  }
  return out;
}

double cover_coverage(const BallCover& c, const std::vector<IncidencePoint>& points) {
  std::size_t hit = 0;
  for (const auto& z : points) hit += c.find(z) ? 1 : 0;
  return points.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(points.size());
}

}  // namespace rlt
