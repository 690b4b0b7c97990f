#include <algorithm>
#include <cmath>
#include <numbers>

#include "rlt/balls/ball.hpp"
#include "rlt/combinatorics/convexify.hpp"
#include "rlt/combinatorics/det_moment.hpp"
#include "rlt/combinatorics/extract.hpp"
#include "rlt/combinatorics/image.hpp"
#include "rlt/combinatorics/tower.hpp"
#include "rlt/core/error.hpp"
#include "rlt/experiment/generators.hpp"
#include "rlt/transform/incidence.hpp"
#include "suite_impl.hpp"

namespace rlt::detail {

namespace {

Vec filled(int n, double v) { return Vec::Constant(n, v); }

GridSet box_union(const std::vector<Box>& boxes, const std::vector<double>& spacing) {
  std::vector<RegionPtr> parts;
  for (const Box& b : boxes) parts.push_back(std::make_shared<BoxRegion>(b));
  return rasterize(UnionRegion(parts), spacing);
}

}  // namespace

TowerSweep tower_sweep(const ExperimentConfig& cfg, ReportBuilder* out) {
  const int d = cfg.dimension;
  TowerSweep sw;
  std::vector<BallParams> balls{unit_ball(d)};
  QuadratureSpec q;
  if (d == 2) {
    CounterRng rng(derive_seed(cfg.seeds[0], "tower/balls", 0));
    for (int i = 0; i < cfg.param<int>("tower", "balls", 20); ++i) balls.push_back(random_ball(d, rng));
  } else {
    q.t_resolution = cfg.param<double>("tower", "t_resolution_d3", 1.0 / 16.0);
  }
  const int cells = cfg.param<int>("tower", "image_cells", 64);
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const std::string item = i == 0 ? std::string("unit") : item_name("ball", i);
    ++sw.attempted;
    try {
      const EnvelopeRaster ras = rasterize_envelope(balls[i]);
      const TowerData t = build_tower(ras.E, ras.Estar, q);
      const InclusionReport inc =
          verify_tower_inclusions(t, ras.E, ras.Estar, cfg.param<std::size_t>("tower", "inclusion_samples", 1000),
                                  derive_seed(cfg.seeds[0], "tower/inclusions", i));
      sw.inclusion_checked += inc.checked;
      sw.inclusion_failures += inc.first_failures + inc.second_failures;
      const PhiImageReport phi = phi_image_report(t, phi_image_raster(t, cells));
      sw.omega_ratio.push_back(t.omega1.measure() / t.alpha);
      sw.fiber_ratio.push_back(t.fiber_measure() / t.alpha_star);
      sw.phi_ratio.push_back(phi.ratio);
      if (i == 0) {
        const double coarse = phi_image_report(t, phi_image_raster(t, cells / 2)).measure;
        sw.phi_convergence = std::abs(phi.measure / coarse - 1.0);
      }
      if (out) {
        out->row(item, "alpha", t.alpha);
        out->row(item, "alpha_star", t.alpha_star);
        out->row(item, "omega1_ratio", sw.omega_ratio.back());
        out->row(item, "fiber_ratio", sw.fiber_ratio.back());
        out->row(item, "phi_measure", phi.measure);
        out->row(item, "phi_ratio", phi.ratio);
        out->row(item, "inclusion_failures", static_cast<double>(inc.first_failures + inc.second_failures));
      }
    } catch (const Error& e) {
      sw.failures.push_back(item + ": " + e.what());
    }
  }
  return sw;
}

SuiteReport suite_tower(const ExperimentConfig& cfg) {
  const int d = cfg.dimension;
  ReportBuilder rep("tower", d);
  const double kappa1 = cfg.constant(dim_key("kappa1", d));
  const double kappa2 = cfg.constant("kappa2");
  const double kappa3 = cfg.constant(dim_key("kappa3", d));
  const TowerSweep sw = tower_sweep(cfg, &rep);
  rep.check("towers_build", sw.failures.empty(), {{"attempted", sw.attempted}, {"failures", sw.failures}});
  rep.check("inclusions_hold", sw.inclusion_failures == 0 && sw.inclusion_checked > 0,
            {{"checked", sw.inclusion_checked}, {"failures", sw.inclusion_failures}});
  rep.check("omega1_lower_bound", !sw.omega_ratio.empty() && min_of(sw.omega_ratio) >= kappa1,
            {{"min_ratio", min_of(sw.omega_ratio)}, {"kappa1", kappa1}});
  rep.check("fiber_lower_bound", !sw.fiber_ratio.empty() && min_of(sw.fiber_ratio) >= kappa2 * (1.0 - 1e-12),
            {{"min_ratio", min_of(sw.fiber_ratio)}, {"kappa2", kappa2}});
  rep.check("phi_image_lower_bound", !sw.phi_ratio.empty() && min_of(sw.phi_ratio) >= cfg.tol("kappa3_fraction") * kappa3,
            {{"min_ratio", min_of(sw.phi_ratio)}, {"kappa3", kappa3}});
  rep.check("phi_image_converged", sw.phi_convergence <= cfg.tol("raster_convergence"),
            {{"relative_change", sw.phi_convergence}});
  return rep.take();
}

namespace {

struct SlicingDraw {
  Mat A;
  std::vector<Box> boxes;  // s axes first, then u axes
};

SlicingDraw random_slicing_draw(int n, std::uint64_t seed, double h) {
  CounterRng rng(seed);
  SlicingDraw dr;
  Vec a(n);
  for (int j = 0; j < n; ++j) a(j) = std::exp(rng.uniform(std::log(0.5), std::log(2.0)));
  Mat R = Mat::Identity(n, n);
  if (n == 2) {
    const double th = rng.uniform(0.0, std::numbers::pi);
    R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  }
  dr.A = R * a.asDiagonal() * R.transpose();
  // |A^{-1} s| <= |s| / min a, so s-boxes inside the cube of half side min a / sqrt(n) (less a voxel) are admissible.
  const double lim = 0.999 * a.minCoeff() / std::sqrt(static_cast<double>(n)) - h;
  const int count = 1 + static_cast<int>(rng.below(3));
  for (int k = 0; k < count; ++k) {
    Box b{Vec(2 * n), Vec(2 * n)};
    for (int j = 0; j < n; ++j) {
      const double c = rng.uniform(-lim, lim), w = rng.uniform(0.1, 0.5) * lim;
      b.lo(j) = std::max(-lim, c - w);
      b.hi(j) = std::min(lim, c + w);
      const double cu = rng.uniform(-0.5, 0.5), wu = rng.uniform(0.1, 0.5);
      b.lo(n + j) = cu - wu;
      b.hi(n + j) = cu + wu;
    }
    dr.boxes.push_back(b);
  }
  return dr;
}

// omega with its s axes stretched by `scale`, on the correspondingly stretched lattice.
GridSet slicing_omega(const SlicingDraw& dr, int n, double h, double scale) {
  std::vector<Box> boxes = dr.boxes;
  for (Box& b : boxes) {
    b.lo.head(n) *= scale;
    b.hi.head(n) *= scale;
  }
  std::vector<double> spacing(2 * n, h);
  for (int j = 0; j < n; ++j) spacing[j] *= scale;
  return box_union(boxes, spacing);
}

}  // namespace

std::vector<double> slicing_ratios(const ExperimentConfig& cfg, ReportBuilder* out) {
  const int n = cfg.dimension - 1;
  const double h = cfg.param<double>("slicing", "spacing", 1.0 / 16.0);
  const int cells = cfg.param<int>("slicing", "image_cells", 64);
  std::vector<double> ratios;
  for (int i = 0; i < cfg.param<int>("slicing", "count", 50); ++i) {
    const SlicingDraw dr = random_slicing_draw(n, derive_seed(cfg.seeds[0], "slicing", i), h);
    const GridSet omega = slicing_omega(dr, n, h, 1.0);
    const SlicingResult r = slicing_bound(omega, dr.A, slicing_raster(omega, cells));
    ratios.push_back(r.lhs / r.rhs);
    if (out) {
      out->row(item_name("omega", i), "lhs", r.lhs);
      out->row(item_name("omega", i), "rhs", r.rhs);
      out->row(item_name("omega", i), "ratio", r.lhs / r.rhs);
    }
  }
  return ratios;
}

SuiteReport suite_slicing(const ExperimentConfig& cfg) {
  const int d = cfg.dimension, n = d - 1;
  ReportBuilder rep("slicing", d);
  const double c = cfg.constant(dim_key("slicing_c", d));
  const std::vector<double> ratios = slicing_ratios(cfg, &rep);
  rep.check("lower_bound", min_of(ratios) >= c, {{"min_ratio", min_of(ratios)}, {"c", c}, {"count", ratios.size()}});

  if (d == 2) {
    // Unit square with A = I: the image is the triangle 0 <= v <= u <= 1 and int |u| = 1/2.
    const GridSet sq = box_union({Box{filled(2, 0.0), filled(2, 1.0)}}, {1.0 / 64, 1.0 / 64});
    const SlicingResult r = slicing_bound(sq, Mat::Identity(1, 1), slicing_raster(sq, 256));
    const double dev = std::max(std::abs(r.lhs - 0.5), std::abs(r.rhs - 0.5)) / 0.5;
    rep.row("unit_square", "lhs", r.lhs);
    rep.row("unit_square", "rhs", r.rhs);
    rep.check("closed_form", dev <= cfg.tol("closed_form_rel"), {{"lhs", r.lhs}, {"rhs", r.rhs}});
  }

  // A -> 2A with the s axes stretched by 2: both sides double.
  const double h = cfg.param<double>("slicing", "spacing", 1.0 / 16.0);
  const int cells = cfg.param<int>("slicing", "image_cells", 64);
  double worst = 0.0;
  for (int i = 0; i < cfg.param<int>("slicing", "law_count", 5); ++i) {
    const SlicingDraw dr = random_slicing_draw(n, derive_seed(cfg.seeds[0], "slicing", i), h);
    const GridSet w1 = slicing_omega(dr, n, h, 1.0), w2 = slicing_omega(dr, n, h, 2.0);
    const SlicingResult r1 = slicing_bound(w1, dr.A, slicing_raster(w1, cells));
    const SlicingResult r2 = slicing_bound(w2, 2.0 * dr.A, slicing_raster(w2, cells));
    const double dev = std::max({std::abs(r2.lhs / r1.lhs / 2.0 - 1.0), std::abs(r2.rhs / r1.rhs / 2.0 - 1.0),
                                 std::abs((r2.lhs / r2.rhs) / (r1.lhs / r1.rhs) - 1.0)});
    worst = std::max(worst, dev);
    rep.row(item_name("law", i), "lhs_factor", r2.lhs / r1.lhs);
    rep.row(item_name("law", i), "rhs_factor", r2.rhs / r1.rhs);
  }
  rep.check("transformation_law", worst <= cfg.tol("transform_law_rel"), {{"worst_relative_deviation", worst}});
  return rep.take();
}

namespace {

// Independent n = 1 oracle: S-mass of a centered interval from the voxel runs, with partial voxels prorated.
double interval_mass(const GridSet& S, double a) {
  const GridGeometry& g = S.geometry();
  const double h = g.spacing[0];
  double m = 0.0;
  for (std::size_t slot = 0; slot < S.column_slots(); ++slot)
    for (const Run& run : S.column_runs(slot)) {
      const double lo = std::max(-a, g.origin[0] + run.lo * h), hi = std::min(a, g.origin[0] + run.hi * h);
      if (hi > lo) m += hi - lo;
    }
  return m;
}

// Smallest S-mass left outside a symmetric interval of at most half the measure of C, over a fine family.
double exhaustive_exclusion(const GridSet& S, const ConvexApprox& C) {
  const double a = 0.5 * C.measure;
  const double inside = interval_mass(S, a);
  double worst = INFINITY;
  const int steps = 4096;
  for (int k = 0; k <= steps; ++k) worst = std::min(worst, inside - interval_mass(S, 0.5 * a * k / steps));
  return worst / S.measure();
}

GridSet interval_set(std::vector<std::pair<double, double>> parts, double lo, double hi, double h) {
  const GridGeometry g(std::vector<double>{lo}, std::vector<double>{h},
                       std::vector<std::int64_t>{static_cast<std::int64_t>(std::llround((hi - lo) / h))});
  std::vector<RegionPtr> regions;
  for (auto [a, b] : parts) regions.push_back(std::make_shared<BoxRegion>(Box{filled(1, a), filled(1, b)}));
  return rasterize(UnionRegion(regions), g);
}

}  // namespace

SuiteReport suite_convexify(const ExperimentConfig& cfg) {
  ReportBuilder rep("convexify", cfg.dimension);
  const ConvexifyOptions opt;
  const double c0 = 0.25 * (1.0 - std::pow(2.0, -opt.eta));
  const double h = 1.0 / 64.0;

  const GridSet iv = interval_set({{-1.0, 1.0}}, -20.0, 20.0, h);
  const ConvexApprox ci = convexify(iv, opt);
  const double ex_i = exhaustive_exclusion(iv, ci);
  rep.row("interval", "measure_ratio", ci.measure / iv.measure());
  rep.row("interval", "exclusion", ex_i);
  rep.check("interval", ci.measure <= 4.0 * iv.measure() && ex_i >= 0.5 * c0 && ci.exclusion_constant >= 0.5 * c0,
            {{"measure_ratio", ci.measure / iv.measure()}, {"exclusion", ex_i}});

  const GridSet pin = interval_set({{-8.5, -8.0}, {8.0, 8.5}}, -20.0, 20.0, h);
  const ConvexApprox cp = convexify(pin, opt);
  const double ex_p = exhaustive_exclusion(pin, cp);
  rep.row("pinned", "measure_ratio", cp.measure / pin.measure());
  rep.row("pinned", "exclusion", ex_p);
  rep.check("pinned", cp.measure >= pin.measure() && ex_p >= cp.exclusion_constant * (1.0 - 1e-9) && ex_p > 0.0,
            {{"measure_ratio", cp.measure / pin.measure()}, {"exclusion", ex_p}, {"reported", cp.exclusion_constant}});

  const GridSet disk = rasterize(EuclideanBallRegion(filled(2, 0.0), 1.0), {1.0 / 32, 1.0 / 32});
  const ConvexApprox cd = convexify(disk, opt);
  rep.row("disk", "measure_ratio", cd.measure / disk.measure());
  rep.check("disk", cd.measure <= 4.0 * disk.measure(), {{"measure_ratio", cd.measure / disk.measure()}});

  // Balanced output on random sets: zero offset, and the reported exclusion holds against the exhaustive family.
  bool ok = true;
  CounterRng rng(derive_seed(cfg.seeds[0], "convexify", 0));
  for (int i = 0; i < cfg.param<int>("convexify", "count", 10); ++i) {
    std::vector<std::pair<double, double>> parts;
    for (int k = 0; k < 1 + static_cast<int>(rng.below(3)); ++k) {
      const double c = rng.uniform(-6.0, 6.0), w = rng.uniform(0.1, 1.5);
      parts.emplace_back(c - w, c + w);
    }
    const GridSet S = interval_set(parts, -20.0, 20.0, h);
    const ConvexApprox C = convexify(S, opt);
    const double ex = exhaustive_exclusion(S, C);
    ok = ok && C.center_offset.norm() == 0.0 && ex >= C.exclusion_constant * (1.0 - 1e-9) &&
         interval_mass(S, 0.5 * C.measure) >= 0.75 * S.measure() * (1.0 - 1e-12);
    rep.row(item_name("random", i), "measure_ratio", C.measure / S.measure());
    rep.row(item_name("random", i), "exclusion", ex);
  }
  rep.check("random_exclusion", ok);
  return rep.take();
}

namespace {

WeightedPoints restrict_to(const WeightedPoints& mu, const ConvexApprox& C) {
  WeightedPoints out;
  for (std::size_t i = 0; i < mu.points.size(); ++i)
    if (C.contains(mu.points[i])) {
      out.points.push_back(mu.points[i]);
      out.weights.push_back(mu.weights[i]);
    }
  return out;
}

}  // namespace

DetMomentSweep detmoment_sweep(const ExperimentConfig& cfg, ReportBuilder* out) {
  const int n = cfg.dimension - 1;
  const double delta = 0.25;
  const auto m = cfg.param<std::size_t>("detmoment", "samples", 200000);
  DetMomentSweep sw;
  for (int i = 0; i < cfg.param<int>("detmoment", "count", 20); ++i) {
    CounterRng rng(derive_seed(cfg.seeds[0], "detmoment", i));
    std::vector<Box> boxes;
    for (int k = 0; k < 1 + static_cast<int>(rng.below(3)); ++k) {
      Box b{Vec(n), Vec(n)};
      for (int j = 0; j < n; ++j) {
        const double c = rng.uniform(-0.7, 0.7), w = rng.uniform(0.1, 0.3);
        b.lo(j) = c - w;
        b.hi(j) = c + w;
      }
      boxes.push_back(b);
    }
    const GridSet S = box_union(boxes, std::vector<double>(n, 1.0 / 32));
    const ConvexApprox C = convexify(S, {});
    const WeightedPoints mu = restrict_to(lebesgue_points(S), C);
    const double lambda = slab_exclusion_mass(mu, C, delta);
    const DetMomentResult r = det_moment(mu, C, delta, lambda, 1.0, derive_seed(cfg.seeds[0], "detmoment/mc", i), m);
    const double base = std::pow(delta * lambda, n) * C.measure;
    sw.estimate.push_back(r.estimate);
    sw.bound_base.push_back(base);
    sw.hypothesis_ok.push_back(r.hypothesis_ok);
    if (base > 0.0) sw.ratio.push_back(r.estimate / base);
    if (out) {
      out->row(item_name("measure", i), "estimate", r.estimate);
      out->row(item_name("measure", i), "std_error", r.std_error);
      out->row(item_name("measure", i), "lambda", lambda);
      out->row(item_name("measure", i), "measure_C", C.measure);
    }
  }
  return sw;
}

SuiteReport suite_detmoment(const ExperimentConfig& cfg) {
  const int n = cfg.dimension - 1;
  ReportBuilder rep("detmoment", cfg.dimension);
  const double c = cfg.constant("detmoment_c_n" + std::to_string(n));
  const DetMomentSweep sw = detmoment_sweep(cfg, &rep);
  bool ok = true;
  for (std::size_t i = 0; i < sw.estimate.size(); ++i) ok = ok && sw.estimate[i] >= c * sw.bound_base[i];
  rep.check("lower_bound", ok, {{"c", c}, {"draws", sw.estimate.size()}, {"min_ratio", min_of(sw.ratio)}});
  rep.check("slab_hypothesis", std::all_of(sw.hypothesis_ok.begin(), sw.hypothesis_ok.end(), [](bool b) { return b; }));

  // Lebesgue measure on [-1,1]^n against an independent continuous Monte Carlo of the same integral.
  const std::size_t m = cfg.param<std::size_t>("detmoment", "oracle_samples", 1000000);
  std::vector<Slab> slabs;
  for (int j = 0; j < n; ++j) {
    Vec e = Vec::Zero(n);
    e(j) = 1.0;
    slabs.push_back({e, 1.0});
  }
  const ConvexApprox C = make_convex(slabs, Vec::Zero(n));
  const GridSet S = box_union({Box{filled(n, -1.0), filled(n, 1.0)}}, std::vector<double>(n, n == 1 ? 1.0 / 512 : 1.0 / 64));
  const DetMomentResult r = det_moment(lebesgue_points(S), C, 0.25, 1.0, 1.0, derive_seed(cfg.seeds[0], "detmoment/cube", 0), m);
  CounterRng rng(derive_seed(cfg.seeds[0], "detmoment/oracle", 0));
  const double vol = std::pow(2.0, n);
  double sum = 0.0, sq = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    double v;
    if (n == 1) {
      v = std::abs(rng.uniform(-1.0, 1.0));
    } else {
      const double a = rng.uniform(-1.0, 1.0), b = rng.uniform(-1.0, 1.0), p = rng.uniform(-1.0, 1.0), q = rng.uniform(-1.0, 1.0);
      v = std::abs(a * q - b * p);
    }
    sum += v;
    sq += v * v;
  }
  const double mean = sum / m, sd = std::sqrt(std::max(0.0, sq / m - mean * mean) / m);
  const double oracle = std::pow(vol, n) * mean, oracle_se = std::pow(vol, n) * sd;
  const double band = cfg.tol("mc_sigma") * std::hypot(r.std_error, oracle_se);
  rep.row("lebesgue_cube", "estimate", r.estimate);
  rep.row("lebesgue_cube", "oracle", oracle);
  rep.check("lebesgue_oracle", std::abs(r.estimate - oracle) <= band,
            {{"estimate", r.estimate}, {"oracle", oracle}, {"band", band}});
  return rep.take();
}

namespace {

double rho_of_extract(const GridSet& E, const GridSet& Es) { return extract_ball(E, Es, {}).ball.rho; }

}  // namespace

SuiteReport suite_extract(const ExperimentConfig& cfg) {
  const int d = cfg.dimension;
  ReportBuilder rep("extract", d);
  const double factor = cfg.tol("envelope_factor");
  std::vector<std::pair<std::string, BallParams>> inputs{{"unit", unit_ball(d)}};
  if (d == 2) {
    CounterRng rng(derive_seed(cfg.seeds[0], "extract/balls", 0));
    for (int i = 0; i < cfg.param<int>("extract", "balls", 10); ++i) inputs.emplace_back(item_name("ball", i), random_ball(d, rng));
    const SymmetryElement g = compose(random_generator(SymmetryKind::Rotation, d, derive_seed(cfg.seeds[0], "extract/g", 0)),
                                      compose(random_generator(SymmetryKind::Shear, d, derive_seed(cfg.seeds[0], "extract/g", 1)),
                                              random_generator(SymmetryKind::Translation, d, derive_seed(cfg.seeds[0], "extract/g", 2))));
    inputs.emplace_back("transformed", apply_ball(g, inputs[1].second));
  }
  bool ok = true;
  std::vector<std::string> failures;
  for (const auto& [name, b] : inputs) {
    const EnvelopeRaster ras = rasterize_envelope(b);
    try {
      const ExtractReport r = extract_ball(ras.E, ras.Estar, {});
      const bool good = r.retention >= cfg.tol("retention_min") && r.envelope_ratio_E <= factor &&
                        r.envelope_ratio_E >= 1.0 / factor && r.envelope_ratio_Estar <= factor &&
                        r.envelope_ratio_Estar >= 1.0 / factor;
      if (!good) failures.push_back(name);
      ok = ok && good;
      rep.row(name, "retention", r.retention);
      rep.row(name, "envelope_ratio_E", r.envelope_ratio_E);
      rep.row(name, "envelope_ratio_Estar", r.envelope_ratio_Estar);
    } catch (const Error& e) {
      ok = false;
      failures.push_back(name + ": " + e.what());
    }
  }
  rep.check("round_trip", ok, {{"inputs", inputs.size()}, {"failures", failures}});
  if (d != 2) return rep.take();

  // Parabolic dilation by lambda scales rho by lambda^2.
  const EnvelopeRaster base = rasterize_envelope(inputs[1].second);
  const double rho0 = rho_of_extract(base.E, base.Estar);
  double worst = 0.0;
  for (double lam : {0.5, 2.0}) {
    const EnvelopeRaster r = rasterize_envelope(apply_ball(SymmetryElement::parabolic_dilation(d, lam), inputs[1].second));
    const double ratio = rho_of_extract(r.E, r.Estar) / rho0;
    worst = std::max(worst, std::abs(ratio / (lam * lam) - 1.0));
    rep.row("dilation=" + std::to_string(lam), "rho_ratio", ratio);
  }
  rep.check("scale_equivariance", worst <= cfg.tol("scale_equivariance"), {{"worst_relative_error", worst}});

  // Dilution sweep: epsilon = eps_0 2^{-k}; the fitted exponent A in |B_env| <= C eps^{-A} |E| per corpus seed.
  std::vector<double> exponents;
  std::vector<std::string> dil_failures;
  for (std::size_t si = 0; si < std::min<std::size_t>(2, cfg.seeds.size()); ++si) {
    CounterRng rng(derive_seed(cfg.seeds[si], "extract/dilution", 0));
    const EnvelopeRaster ras = rasterize_envelope(random_ball(d, rng));
    const SetPair p0{ras.E, ras.Estar};
    std::vector<double> le, lr;
    for (int k = 0; k <= 4; ++k) {
      const SetPair p = dilute(p0, std::pow(2.0, k * (d + 1.0) / (2.0 * d)));
      const std::string item = "seed" + std::to_string(si) + "/k=" + std::to_string(k);
      try {
        const ScorePair s = score(p.E, p.Estar, {});
        const ExtractReport r = extract_ball(p.E, p.Estar, {});
        const double ratio = envelope(r.ball).measure_E / p.E.measure();
        le.push_back(std::log(s.epsilon));
        lr.push_back(std::log(ratio));
        rep.row(item, "epsilon", s.epsilon);
        rep.row(item, "envelope_ratio_E", ratio);
        rep.row(item, "retention", r.retention);
      } catch (const Error& e) {
        dil_failures.push_back(item + ": " + e.what());
      }
    }
    exponents.push_back(-fit_slope(le, lr));
    rep.row("seed" + std::to_string(si), "exponent_A", exponents.back());
  }
  const bool finite = exponents.size() == 2 && std::isfinite(exponents[0]) && std::isfinite(exponents[1]);
  rep.check("dilution_exponent", finite && dil_failures.empty() &&
                                     std::abs(exponents[0] - exponents[1]) <= cfg.tol("exponent_stability"),
            {{"exponents", exponents}, {"failures", dil_failures}});

  // Counterexample clusters: retention reported only.
  try {
    const ClusterPair c = gen_paraboloid_cluster(d, 8, 1.0 / 128, derive_seed(cfg.seeds[0], "extract/cluster", 0));
    const ExtractReport r = extract_ball(c.sets.E, c.sets.Estar, {});
    rep.row("cluster_N8", "retention", r.retention);
    rep.row("cluster_N8", "envelope_ratio_E", r.envelope_ratio_E);
  } catch (const Error& e) {
    rep.row("cluster_N8", "extraction_failed", 1.0);
  }
  return rep.take();
}

}  // namespace rlt::detail
