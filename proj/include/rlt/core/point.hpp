#pragma once

#include <Eigen/Dense>
#include <vector>

namespace rlt {

// Small stack-allocated vectors and matrices; d <= 3 keeps everything under the caps.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 8, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 4, 4>;

using SpacePoint = Vec;

// Primed part x' (all but the last coordinate).
inline Vec head(const Vec& x) { return x.head(x.size() - 1); }
inline double last(const Vec& x) { return x(x.size() - 1); }

inline Vec join(const Vec& xp, double xd) {
  Vec out(xp.size() + 1);
  out.head(xp.size()) = xp;
  out(xp.size()) = xd;
  return out;
}

inline Vec to_vec(const std::vector<double>& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

inline std::vector<double> to_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

struct IncidencePoint {
  SpacePoint first;   // x
  SpacePoint second;  // x*

  int dim() const { return static_cast<int>(first.size()); }

  // Signed residual x*_d - x_d + |x*' - x'|^2; zero on the incidence manifold.
  double residual() const {
    return last(second) - last(first) + (head(second) - head(first)).squaredNorm();
  }

  // Magnitude scale for relative residual tests.
  double residual_scale() const {
    return 1.0 + std::abs(last(second)) + std::abs(last(first)) + (head(second) - head(first)).squaredNorm();
  }
};

// Solves the manifold equation for x*_d.
inline IncidencePoint on_manifold(const SpacePoint& x, const Vec& xstar_prime) {
  return {x, join(xstar_prime, last(x) - (xstar_prime - head(x)).squaredNorm())};
}

constexpr double kManifoldTolerance = 1e-12;

inline bool is_incident(const IncidencePoint& z, double tol = kManifoldTolerance) {
  return std::abs(z.residual()) <= tol * z.residual_scale();
}

}  // namespace rlt
