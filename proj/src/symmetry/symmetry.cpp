#include "rlt/symmetry/symmetry.hpp"

#include <cmath>
#include <numbers>

#include "rlt/core/error.hpp"
#include "rlt/core/rng.hpp"

namespace rlt {

namespace {

constexpr double kConditionLimit = 1e12;

void check_square(const Mat& M, int n) {
  if (M.rows() != n || M.cols() != n) throw Error(ErrorKind::InvalidArgument, "matrix must be (d-1)x(d-1)");
}

SpacePoint first_map(const Generator& g, SpacePoint x) {
  const int n = static_cast<int>(x.size()) - 1;
  switch (g.kind) {
    case SymmetryKind::Translation:
      return x + g.v;
    case SymmetryKind::Shear: {
      const Vec xp = x.head(n);
      x(n) += 2.0 * g.v.dot(xp) + g.v.squaredNorm();
      x.head(n) = xp + g.v;
      return x;
    }
    case SymmetryKind::Rotation:
      x.head(n) = (g.M * x.head(n)).eval();
      return x;
    case SymmetryKind::ParabolicDilation:
      x.head(n) *= g.lambda;
      x(n) *= g.lambda * g.lambda;
      return x;
    case SymmetryKind::ShearedLinear: {
      const Vec xp = x.head(n);
      const Vec ax = g.M * xp;
      x(n) += ax.squaredNorm() - xp.squaredNorm();
      x.head(n) = ax;
      return x;
    }
  }
  return x;
}

SpacePoint second_map(const Generator& g, SpacePoint y) {
  const int n = static_cast<int>(y.size()) - 1;
  switch (g.kind) {
    case SymmetryKind::Translation:
      return y + g.v;
    case SymmetryKind::Shear:
      y(n) += 2.0 * g.v.dot(y.head(n));
      return y;
    case SymmetryKind::Rotation:
      y.head(n) = (g.M * y.head(n)).eval();
      return y;
    case SymmetryKind::ParabolicDilation:
      y.head(n) *= g.lambda;
      y(n) *= g.lambda * g.lambda;
      return y;
    case SymmetryKind::ShearedLinear: {
      const Vec yp = y.head(n);
      const Vec ay = g.M_inv_t * yp;
      y(n) += yp.squaredNorm() - ay.squaredNorm();
      y.head(n) = ay;
      return y;
    }
  }
  return y;
}

Generator inverse_generator(const Generator& g) {
  Generator inv = g;
  switch (g.kind) {
    case SymmetryKind::Translation:
    case SymmetryKind::Shear:
      inv.v = -g.v;
      break;
    case SymmetryKind::Rotation:
      inv.M = g.M.transpose();
      break;
    case SymmetryKind::ParabolicDilation:
      inv.lambda = 1.0 / g.lambda;
      break;
    case SymmetryKind::ShearedLinear:
      inv.M = g.M.inverse();
      inv.M_inv_t = g.M.transpose();
      break;
  }
  return inv;
}

double first_jacobian(const Generator& g, int d) {
  switch (g.kind) {
    case SymmetryKind::ParabolicDilation: return std::pow(g.lambda, d + 1);
    case SymmetryKind::ShearedLinear: return std::abs(g.M.determinant());
    default: return 1.0;
  }
}

double second_jacobian(const Generator& g, int d) {
  switch (g.kind) {
    case SymmetryKind::ParabolicDilation: return std::pow(g.lambda, d + 1);
    case SymmetryKind::ShearedLinear: return 1.0 / std::abs(g.M.determinant());
    default: return 1.0;
  }
}

BallParams ball_step(const Generator& g, const BallParams& b) {
  BallParams out = b;
  out.center = {first_map(g, b.center.first), second_map(g, b.center.second)};
  const int n = b.dim() - 1;
  switch (g.kind) {
    case SymmetryKind::Translation:
    case SymmetryKind::Shear:
      break;
    case SymmetryKind::Rotation:
      out.basis = b.basis * g.M.transpose();  // rows e_j -> R e_j
      break;
    case SymmetryKind::ParabolicDilation:
      out.r *= g.lambda;
      out.r_star *= g.lambda;
      out.rho *= g.lambda * g.lambda;
      break;
    case SymmetryKind::ShearedLinear: {
      // Balls map to balls only when the images A e_j stay mutually orthogonal.
      const Mat images = g.M * b.basis.transpose();  // columns A e_j
      const Mat gram = images.transpose() * images;
      const double scale = gram.diagonal().maxCoeff();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j && std::abs(gram(i, j)) > 1e-9 * scale)
            throw Error(ErrorKind::NotBallPreserving, "A does not keep the ball frame orthogonal");
      for (int j = 0; j < n; ++j) {
        const double sigma = std::sqrt(gram(j, j));
        out.basis.row(j) = images.col(j).transpose() / sigma;
        out.r(j) = b.r(j) * sigma;
        out.r_star(j) = b.r_star(j) / sigma;
      }
      break;
    }
  }
  return out;
}

}  // namespace

SymmetryElement SymmetryElement::translation(const Vec& v) {
  SymmetryElement e(static_cast<int>(v.size()));
  e.word_.push_back({SymmetryKind::Translation, v, Mat(), Mat(), 1.0});
  return e;
}

SymmetryElement SymmetryElement::shear(const Vec& delta) {
  SymmetryElement e(static_cast<int>(delta.size()) + 1);
  e.word_.push_back({SymmetryKind::Shear, delta, Mat(), Mat(), 1.0});
  return e;
}

SymmetryElement SymmetryElement::rotation(const Mat& R) {
  const int n = static_cast<int>(R.rows());
  check_square(R, n);
  if ((R * R.transpose() - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorKind::InvalidArgument, "rotation matrix must be orthogonal");
  SymmetryElement e(n + 1);
  e.word_.push_back({SymmetryKind::Rotation, Vec(), R, Mat(), 1.0});
  return e;
}

SymmetryElement SymmetryElement::parabolic_dilation(int d, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::InvalidArgument, "dilation factor must be positive");
  SymmetryElement e(d);
  e.word_.push_back({SymmetryKind::ParabolicDilation, Vec(), Mat(), Mat(), lambda});
  return e;
}

SymmetryElement SymmetryElement::sheared_linear(const Mat& A) {
  const int n = static_cast<int>(A.rows());
  check_square(A, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd{Eigen::MatrixXd(A)};
  const auto& sv = svd.singularValues();
  if (!(sv(n - 1) > 0.0) || sv(0) / sv(n - 1) > kConditionLimit)
    throw Error(ErrorKind::NonInvertible, "sheared-linear matrix is singular to working precision");
  SymmetryElement e(n + 1);
  e.word_.push_back({SymmetryKind::ShearedLinear, Vec(), A, A.inverse().transpose(), 1.0});
  return e;
}

SpacePoint SymmetryElement::map_first(SpacePoint x) const {
  for (const Generator& g : word_) x = first_map(g, x);
  return x;
}

SpacePoint SymmetryElement::map_second(SpacePoint y) const {
  for (const Generator& g : word_) y = second_map(g, y);
  return y;
}

SpacePoint SymmetryElement::unmap_first(SpacePoint x) const {
  for (auto it = word_.rbegin(); it != word_.rend(); ++it) x = first_map(inverse_generator(*it), x);
  return x;
}

SpacePoint SymmetryElement::unmap_second(SpacePoint y) const {
  for (auto it = word_.rbegin(); it != word_.rend(); ++it) y = second_map(inverse_generator(*it), y);
  return y;
}

double SymmetryElement::first_scale() const {
  double s = 1.0;
  for (const Generator& g : word_) s *= first_jacobian(g, dim_);
  return s;
}

double SymmetryElement::second_scale() const {
  double s = 1.0;
  for (const Generator& g : word_) s *= second_jacobian(g, dim_);
  return s;
}

IncidencePoint apply_pair(const SymmetryElement& g, const IncidencePoint& z) {
  if (z.dim() != g.dim()) throw Error(ErrorKind::InvalidArgument, "point dimension differs from the element's");
  if (!is_incident(z, kSymmetryTolerance))
    throw Error(ErrorKind::OffManifold, "input residual " + std::to_string(z.residual()));
  return {g.map_first(z.first), g.map_second(z.second)};
}

BallParams apply_ball(const SymmetryElement& g, const BallParams& b) {
  if (b.dim() != g.dim()) throw Error(ErrorKind::InvalidArgument, "ball dimension differs from the element's");
  BallParams out = b;
  for (const Generator& gen : g.word()) out = ball_step(gen, out);
  return make_ball(out.center, out.basis, out.r, out.r_star);
}

SymmetryElement compose(const SymmetryElement& g, const SymmetryElement& h) {
  if (g.dim() != h.dim()) throw Error(ErrorKind::InvalidArgument, "cannot compose elements of different dimension");
  SymmetryElement out = h;
  out.word_.insert(out.word_.end(), g.word_.begin(), g.word_.end());
  return out;
}

SymmetryElement inverse(const SymmetryElement& g) {
  SymmetryElement out(g.dim());
  for (auto it = g.word_.rbegin(); it != g.word_.rend(); ++it) out.word_.push_back(inverse_generator(*it));
  return out;
}

InvarianceReport check_invariance(const SymmetryElement& g, std::size_t samples, std::uint64_t seed) {
  const int d = g.dim();
  const int n = d - 1;
  InvarianceReport rep;
  CounterRng rng(seed);
  for (std::size_t i = 0; i < samples; ++i) {
    SpacePoint x(d);
    Vec yp(n);
    // Dyadic coordinates with 13 significant bits keep the sample exactly on the manifold.
    for (int k = 0; k < d; ++k) x(k) = std::round(rng.uniform(-4.0, 4.0) * 1024.0) / 1024.0;
    for (int k = 0; k < n; ++k) yp(k) = std::round(rng.uniform(-4.0, 4.0) * 1024.0) / 1024.0;
    const IncidencePoint z = on_manifold(x, yp);
    const IncidencePoint w = {g.map_first(z.first), g.map_second(z.second)};
    rep.max_residual = std::max(rep.max_residual, std::abs(w.residual()));
  }
  // Probe box [-1/2, 1/2]^d: rasterize both images at a fine spacing and compare with the declared Jacobians.
  auto probe = std::make_shared<BoxRegion>(Box{Vec::Constant(d, -0.5), Vec::Constant(d, 0.5)});
  rep.first_scale_expected = g.first_scale();
  rep.second_scale_expected = g.second_scale();
  auto observed = [&](TransformedRegion::Factor f, double expected) {
    TransformedRegion image(probe, g, f);
    const Box b = image.bounds();
    // Aim for about 2^(18/d) cells per axis of the image.
    const double cells = std::pow(2.0, 18.0 / d);
    std::vector<double> h(d);
    for (int k = 0; k < d; ++k) h[k] = (b.hi(k) - b.lo(k)) / cells;
    const double m = rasterize(image, h).measure();
    rep.scale_error = std::max(rep.scale_error, std::abs(m - expected) / expected);
    return m;
  };
  rep.first_scale_observed = observed(TransformedRegion::Factor::First, rep.first_scale_expected);
  rep.second_scale_observed = observed(TransformedRegion::Factor::Second, rep.second_scale_expected);
  return rep;
}

TransformedRegion::TransformedRegion(RegionPtr base, SymmetryElement g, Factor factor)
    : base_(std::move(base)), g_(std::move(g)), factor_(factor) {
  const int d = base_->dim();
  const int n = d - 1;
  const Box bb = base_->bounds();
  // Map the sections of the base on a lattice over its bounds; pad the result.
  constexpr int kLattice = 33;
  const std::int64_t columns = static_cast<std::int64_t>(std::pow(kLattice, n));
  Vec lo = Vec::Constant(d, INFINITY), hi = Vec::Constant(d, -INFINITY);
  std::vector<Interval> ivs;
  for (std::int64_t c = 0; c < columns; ++c) {
    Vec xp(n);
    std::int64_t rest = c;
    for (int k = 0; k < n; ++k) {
      xp(k) = bb.lo(k) + (bb.hi(k) - bb.lo(k)) * static_cast<double>(rest % kLattice) / (kLattice - 1);
      rest /= kLattice;
    }
    ivs.clear();
    base_->column(xp, ivs);
    for (const Interval& iv : ivs)
      for (double t : {iv.lo, iv.hi}) {
        const SpacePoint p = forward(join(xp, t));
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
      }
  }
  if (!std::isfinite(lo(0))) {
    // Base sections missed by the lattice: fall back to the mapped corners of the base bounds.
    for (int corner = 0; corner < (1 << d); ++corner) {
      SpacePoint p(d);
      for (int k = 0; k < d; ++k) p(k) = (corner >> k) & 1 ? bb.hi(k) : bb.lo(k);
      p = forward(p);
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  }
  const Vec pad = 0.05 * (hi - lo) + Vec::Constant(d, 1e-9);
  bounds_ = {lo - pad, hi + pad};
}

SpacePoint TransformedRegion::forward(const SpacePoint& p) const {
  return factor_ == Factor::First ? g_.map_first(p) : g_.map_second(p);
}

SpacePoint TransformedRegion::backward(const SpacePoint& p) const {
  return factor_ == Factor::First ? g_.unmap_first(p) : g_.unmap_second(p);
}

bool TransformedRegion::contains(const SpacePoint& p) const { return base_->contains(backward(p)); }

void TransformedRegion::column(const Vec& xp, std::vector<Interval>& out) const {
  // Every generator maps columns to columns and acts on x_d by an increasing affine map.
  const SpacePoint src = backward(join(xp, 0.0));
  const Vec sp = head(src);
  std::vector<Interval> ivs;
  base_->column(sp, ivs);
  for (const Interval& iv : ivs) out.push_back({last(forward(join(sp, iv.lo))), last(forward(join(sp, iv.hi)))});
}

BilinearCoordinates to_bilinear_coordinates(const IncidencePoint& z) {
  const Vec xp = head(z.first), yp = head(z.second);
  return {xp, last(z.first) - xp.squaredNorm(), yp, last(z.second) + yp.squaredNorm()};
}

namespace {

std::vector<double> flatten(const Mat& M) {
  std::vector<double> out;
  for (int r = 0; r < M.rows(); ++r)
    for (int c = 0; c < M.cols(); ++c) out.push_back(M(r, c));
  return out;
}

Mat unflatten(const std::vector<double>& v, int n) {
  if (static_cast<int>(v.size()) != n * n) throw Error(ErrorKind::InvalidArgument, "matrix needs (d-1)^2 entries");
  Mat M(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) M(r, c) = v[r * n + c];
  return M;
}

}  // namespace

nlohmann::json to_json(const SymmetryElement& g) {
  nlohmann::json word = nlohmann::json::array();
  for (const Generator& gen : g.word()) {
    switch (gen.kind) {
      case SymmetryKind::Translation: word.push_back({{"kind", "translation"}, {"v", to_std(gen.v)}}); break;
      case SymmetryKind::Shear: word.push_back({{"kind", "shear"}, {"delta", to_std(gen.v)}}); break;
      case SymmetryKind::Rotation: word.push_back({{"kind", "rotation"}, {"R", flatten(gen.M)}}); break;
      case SymmetryKind::ParabolicDilation: word.push_back({{"kind", "parabolic_dilation"}, {"lambda", gen.lambda}}); break;
      case SymmetryKind::ShearedLinear: word.push_back({{"kind", "sheared_linear"}, {"A", flatten(gen.M)}}); break;
    }
  }
  return word;
}

SymmetryElement element_from_json(const nlohmann::json& j, int d) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidArgument, "symmetry word must be a JSON array");
  SymmetryElement out = SymmetryElement::identity(d);
  try {
    for (const auto& rec : j) {
      const std::string kind = rec.at("kind").get<std::string>();
      SymmetryElement g(d);
      if (kind == "translation") g = SymmetryElement::translation(to_vec(rec.at("v").get<std::vector<double>>()));
      else if (kind == "shear") g = SymmetryElement::shear(to_vec(rec.at("delta").get<std::vector<double>>()));
      else if (kind == "rotation") g = SymmetryElement::rotation(unflatten(rec.at("R").get<std::vector<double>>(), d - 1));
      else if (kind == "parabolic_dilation") g = SymmetryElement::parabolic_dilation(d, rec.at("lambda").get<double>());
      else if (kind == "sheared_linear") g = SymmetryElement::sheared_linear(unflatten(rec.at("A").get<std::vector<double>>(), d - 1));
      else throw Error(ErrorKind::InvalidArgument, "unknown generator kind " + kind);
      out = compose(g, out);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed symmetry word: ") + e.what());
  }
  return out;
}

SymmetryElement random_generator(SymmetryKind kind, int d, std::uint64_t seed) {
  CounterRng rng(seed, 0x5e77);
  const int n = d - 1;
  auto random_vec = [&](int len, double scale) {
    Vec v(len);
    for (int k = 0; k < len; ++k) v(k) = rng.uniform(-scale, scale);
    return v;
  };
  switch (kind) {
    case SymmetryKind::Translation: return SymmetryElement::translation(random_vec(d, 2.0));
    case SymmetryKind::Shear: return SymmetryElement::shear(random_vec(n, 1.5));
    case SymmetryKind::Rotation: {
      Eigen::MatrixXd G(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = rng.normal();
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
      Eigen::MatrixXd Q = qr.householderQ();
      return SymmetryElement::rotation(Mat(Q));
    }
    case SymmetryKind::ParabolicDilation: return SymmetryElement::parabolic_dilation(d, std::exp(rng.uniform(-1.0, 1.0)));
    case SymmetryKind::ShearedLinear: {
      Mat A(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = (i == j ? 1.0 : 0.0) + rng.uniform(-0.5, 0.5);
      return SymmetryElement::sheared_linear(A);
    }
  }
  return SymmetryElement::identity(d);
}

}  // namespace rlt
