#pragma once

#include <json.hpp>
#include <memory>

#include "rlt/core/grid_set.hpp"
#include "rlt/core/point.hpp"
#include "rlt/core/region.hpp"
#include "rlt/transform/incidence.hpp"

namespace rlt {

struct BallParams {
  IncidencePoint center;  // (x_bar, x_bar*)
  Mat basis;              // rows are e_1 .. e_{d-1}
  Vec r;
  Vec r_star;
  double rho = 0.0;

  int dim() const { return center.dim(); }
};

constexpr double kDualityTolerance = 1e-12;
constexpr double kBasisTolerance = 1e-12;

// Validates duality r_j r*_j = rho, orthonormality, and that the center is incident.
BallParams make_ball(const IncidencePoint& center, const Mat& basis, const Vec& r, const Vec& r_star);

// Unit parameters centered at the origin: e = I, r = r* = rho = 1.
BallParams unit_ball(int d);

bool ball_membership(const BallParams& b, const IncidencePoint& z);

// {x : |<x' - c', e_j>| < w_j, |x_d - apex_d - sign |x' - apex'|^2| < rho}.
class EnvelopeRegion : public Region {
 public:
  EnvelopeRegion(Vec box_center, Mat basis, Vec half_widths, SpacePoint apex, double sign, double rho);

  int dim() const override { return static_cast<int>(apex_.size()); }
  Box bounds() const override;
  bool contains(const SpacePoint& p) const override;
  void column(const Vec& xp, std::vector<Interval>& out) const override;

  bool in_box(const Vec& xp) const;
  double slab_center(const Vec& xp) const;
  double exact_measure() const;

 private:
  Vec box_center_;
  Mat basis_;
  Vec half_widths_;
  SpacePoint apex_;
  double sign_;
  double rho_;
};

struct EnvelopePair {
  std::shared_ptr<const EnvelopeRegion> E_env;
  std::shared_ptr<const EnvelopeRegion> Estar_env;
  double measure_E = 0.0;
  double measure_Estar = 0.0;
};

EnvelopePair envelope(const BallParams& b);
// Conditions on x with radii scaled by eps (the shrunk set E_eps).
EnvelopeRegion shrunk_envelope(const BallParams& b, double eps);

// Rasterization resolution relative to the ball: leading spacing min(r)/cells_per_radius, vertical rho/cells_per_rho.
struct RasterSpec {
  double cells_per_radius = 0.0;  // 0 picks a dimension default
  double cells_per_rho = 16.0;
};

struct EnvelopeRaster {
  GridSet E;
  GridSet Estar;
};

EnvelopeRaster rasterize_envelope(const BallParams& b, const RasterSpec& spec = {});

ScorePair verify_quasiextremal(const BallParams& b, const QuadratureSpec& q, const RasterSpec& spec = {});

bool in_shrunk_set(const BallParams& b, double eps, const SpacePoint& x);

// Measure of {y' : (x, (y', x_d - |y' - x'|^2)) in the ball}, by a midpoint sweep over the dual box
// (t_resolution sets the sweep step; default 64 cells per axis).
double shrunk_slice_measure(const BallParams& b, double eps, const SpacePoint& x, const QuadratureSpec& q);

nlohmann::json to_json(const BallParams& b);
BallParams ball_from_json(const nlohmann::json& j);

}  // namespace rlt
