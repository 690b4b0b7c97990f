#include "rlt/combinatorics/extract.hpp"

#include <cmath>

#include "rlt/core/error.hpp"
#include "rlt/transform/incidence.hpp"

namespace rlt {

namespace {

constexpr int kRecenterSteps = 16;

ConvexApprox hull_of(const GridSet& S, double eta, const char* what) {
  try {
    ConvexifyOptions o;
    o.eta = eta;
    o.balanced = false;
    return convexify(S, o);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DimensionUnsupported) throw;
    throw Error(ErrorKind::ExtractionFailed, std::string(what) + ": " + e.what());
  }
}

}  // namespace

ExtractReport extract_ball(const GridSet& E, const GridSet& Estar, const QuadratureSpec& q, const ExtractOptions& opt) {
  const TowerData tower = build_tower(E, Estar, q);
  const int d = tower.dim();
  const int n = d - 1;

  GridSetBuilder union_builder(tower.fibers.front().set.geometry());
  for (const TowerFiber& f : tower.fibers)
    for (std::size_t slot = 0; slot < f.set.column_slots(); ++slot)
      for (const Run& r : f.set.column_runs(slot)) union_builder.add(f.set.column_id(slot), r.lo, r.hi);
  const GridSet fibers = union_builder.build();

  ExtractReport rep;
  rep.base_point = tower.base_point;
  rep.fiber_hull = hull_of(fibers, opt.eta, "fiber union");
  rep.s_hull = hull_of(tower.omega1, opt.eta, "omega1");

  Ellipsoid ell;
  try {
    ell = mvee(convex_vertices(rep.fiber_hull.slabs, n));
  } catch (const Error& e) {
    throw Error(ErrorKind::ExtractionFailed, std::string("enclosing ellipsoid: ") + e.what());
  }
  // The box with the ellipsoid's semi-axes as half-widths contains the ellipsoid.
  Mat basis = ell.axes.transpose();
  Vec r = ell.radii;
  const double rho = std::pow(rep.s_hull.measure * r.prod() / std::pow(2.0, n), 1.0 / n);
  if (!(rho > 0.0) || !std::isfinite(rho) || !(r.minCoeff() > 0.0))
    throw Error(ErrorKind::ExtractionFailed, "degenerate radii");
  Vec r_star = r.cwiseInverse() * rho;

  const Vec xbp = head(tower.base_point);
  const double xbd = last(tower.base_point);
  const Vec& sbar = rep.s_hull.center_offset;
  const SpacePoint ybar = join(xbp - sbar, xbd - sbar.squaredNorm());
  const Vec xcp = xbp + rep.fiber_hull.center_offset;
  const SpacePoint xc = join(xcp, last(ybar) + (xcp - head(ybar)).squaredNorm());
  // Duality holds to rounding; pass r* recomputed from r so make_ball sees an exact product.
  for (int j = 0; j < n; ++j) r_star(j) = rho / r(j);
  // The base point is the first maximizer in row-major order and may sit at the edge of the slab; slide the ball
  // vertically (a translation symmetry) to the offset that covers the most of E and E*.
  double best_cover = -1.0;
  for (int i = 0; i <= 2 * kRecenterSteps; ++i) {
    const int k = (i + 1) / 2 * (i % 2 ? 1 : -1);
    const double c = rho * k / kRecenterSteps;
    SpacePoint x = xc, y = ybar;
    x(n) += c;
    y(n) += c;
    const BallParams cand = make_ball({x, y}, basis, r, r_star);
    const EnvelopePair env = envelope(cand);
    const double cover = E.intersect(rasterize(*env.E_env, E.geometry())).measure() / E.measure() +
                         Estar.intersect(rasterize(*env.Estar_env, Estar.geometry())).measure() / Estar.measure();
    if (cover > best_cover) {
      best_cover = cover;
      rep.ball = cand;
    }
  }

  const EnvelopePair env = envelope(rep.ball);
  rep.envelope_ratio_E = env.measure_E / E.measure();
  rep.envelope_ratio_Estar = env.measure_Estar / Estar.measure();
  rep.incidence = bilinear(E, Estar, q);
  const GridSet Ek = E.intersect(rasterize(*env.E_env, E.geometry()));
  const GridSet Esk = Estar.intersect(rasterize(*env.Estar_env, Estar.geometry()));
  rep.retained_incidence = (Ek.empty() || Esk.empty()) ? 0.0 : bilinear(Ek, Esk, q);
  rep.retention = rep.retained_incidence / rep.incidence;
  return rep;
}

nlohmann::json to_json(const ExtractReport& r) {
  return {{"ball", to_json(r.ball)},
          {"envelope_ratio_E", r.envelope_ratio_E},
          {"envelope_ratio_Estar", r.envelope_ratio_Estar},
          {"retention", r.retention},
          {"incidence", r.incidence},
          {"retained_incidence", r.retained_incidence},
          {"fiber_hull", to_json(r.fiber_hull)},
          {"s_hull", to_json(r.s_hull)},
          {"base_point", to_std(r.base_point)}};
}

}  // namespace rlt
