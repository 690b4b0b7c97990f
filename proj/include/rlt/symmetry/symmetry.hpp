#pragma once

#include <json.hpp>
#include <vector>

#include "rlt/balls/ball.hpp"
#include "rlt/core/region.hpp"

namespace rlt {

enum class SymmetryKind { Translation, Shear, Rotation, ParabolicDilation, ShearedLinear };

struct Generator {
  SymmetryKind kind;
  Vec v;            // translation (length d) or shear (length d-1)
  Mat M;            // rotation R or sheared-linear A
  Mat M_inv_t;      // A^{-T} (sheared linear only)
  double lambda = 1.0;
};

// A word of generators, applied first to last. Each generator acts on the two factors by its own exact maps.
class SymmetryElement {
 public:
  explicit SymmetryElement(int d = 2) : dim_(d) {}

  static SymmetryElement identity(int d) { return SymmetryElement(d); }
  static SymmetryElement translation(const Vec& v);
  static SymmetryElement shear(const Vec& delta);
  static SymmetryElement rotation(const Mat& R);
  static SymmetryElement parabolic_dilation(int d, double lambda);
  static SymmetryElement sheared_linear(const Mat& A);

  int dim() const { return dim_; }
  const std::vector<Generator>& word() const { return word_; }

  SpacePoint map_first(SpacePoint x) const;
  SpacePoint map_second(SpacePoint y) const;
  SpacePoint unmap_first(SpacePoint x) const;
  SpacePoint unmap_second(SpacePoint y) const;

  // Jacobian determinants of the two factor maps (constant for every generator).
  double first_scale() const;
  double second_scale() const;

 private:
  friend SymmetryElement compose(const SymmetryElement& g, const SymmetryElement& h);
  friend SymmetryElement inverse(const SymmetryElement& g);
  friend SymmetryElement element_from_json(const nlohmann::json& j, int d);

  int dim_;
  std::vector<Generator> word_;
};

constexpr double kSymmetryTolerance = 1e-9;

IncidencePoint apply_pair(const SymmetryElement& g, const IncidencePoint& z);
BallParams apply_ball(const SymmetryElement& g, const BallParams& b);
// compose(g, h) acts as g after h.
SymmetryElement compose(const SymmetryElement& g, const SymmetryElement& h);
SymmetryElement inverse(const SymmetryElement& g);

struct InvarianceReport {
  double max_residual = 0.0;
  double first_scale_expected = 1.0;
  double first_scale_observed = 1.0;
  double second_scale_expected = 1.0;
  double second_scale_observed = 1.0;
  double scale_error = 0.0;  // max relative error of the probe-box measures
};

InvarianceReport check_invariance(const SymmetryElement& g, std::size_t samples, std::uint64_t seed);

// Image of a region under one factor map.
class TransformedRegion : public Region {
 public:
  enum class Factor { First, Second };
  TransformedRegion(RegionPtr base, SymmetryElement g, Factor factor);

  int dim() const override { return base_->dim(); }
  Box bounds() const override { return bounds_; }
  bool contains(const SpacePoint& p) const override;
  void column(const Vec& xp, std::vector<Interval>& out) const override;

 private:
  SpacePoint forward(const SpacePoint& p) const;
  SpacePoint backward(const SpacePoint& p) const;

  RegionPtr base_;
  SymmetryElement g_;
  Factor factor_;
  Box bounds_;
};

// Coordinates (x', x_d - |x'|^2 ; y', y_d + |y'|^2) in which the manifold reads tau* - tau = 2 x'.y'.
struct BilinearCoordinates {
  Vec xp;
  double tau;
  Vec yp;
  double tau_star;
};
BilinearCoordinates to_bilinear_coordinates(const IncidencePoint& z);

nlohmann::json to_json(const SymmetryElement& g);
SymmetryElement element_from_json(const nlohmann::json& j, int d);

// Random generator of each kind, used by tests and suites.
SymmetryElement random_generator(SymmetryKind kind, int d, std::uint64_t seed);

}  // namespace rlt
