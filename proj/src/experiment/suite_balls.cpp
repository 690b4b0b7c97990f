#include <algorithm>
#include <cmath>

#include "rlt/balls/ball.hpp"
#include "rlt/balls/cover.hpp"
#include "rlt/core/error.hpp"
#include "rlt/experiment/generators.hpp"
#include "rlt/transform/incidence.hpp"
#include "suite_impl.hpp"

namespace rlt::detail {

std::vector<double> rwt_epsilons(const ExperimentConfig& cfg, ReportBuilder* out) {
  const int d = cfg.dimension;
  const int per_family = cfg.param<int>("random", "per_family", 25);
  std::vector<double> eps;
  for (RandomFamily fam : kRandomFamilies)
    for (int i = 0; i < per_family; ++i) {
      const std::string name = family_name(fam);
      const SetPair p = gen_random_sets(fam, d, derive_seed(cfg.seeds[0], "rwt/" + name, i));
      const ScorePair s = score(p.E, p.Estar, cfg.quadrature);
      eps.push_back(s.epsilon);
      if (out) {
        const std::string item = item_name(name, i);
        out->row(item, "epsilon", s.epsilon);
        out->row(item, "alpha", s.alpha);
        out->row(item, "alpha_star", s.alpha_star);
        out->row(item, "incidence", s.incidence);
      }
    }
  return eps;
}

SuiteReport suite_rwt(const ExperimentConfig& cfg) {
  const int d = cfg.dimension;
  ReportBuilder rep("rwt", d);
  const double K = cfg.constant(dim_key("K", d));
  const std::vector<double> eps = rwt_epsilons(cfg, &rep);
  rep.check("epsilon_below_K", max_of(eps) <= K, {{"max_epsilon", max_of(eps)}, {"K", K}, {"pairs", eps.size()}});

  // The quadrature against an independent Monte Carlo estimate on the first pairs of each family.
  const int mc_pairs = cfg.param<int>("random", "mc_pairs", 2);
  const auto mc_samples = cfg.param<std::size_t>("random", "mc_samples", 200000);
  double worst = 0.0;
  bool agree = true;
  for (RandomFamily fam : kRandomFamilies)
    for (int i = 0; i < mc_pairs; ++i) {
      const std::string name = family_name(fam);
      const SetPair p = gen_random_sets(fam, d, derive_seed(cfg.seeds[0], "rwt/" + name, i));
      const double b = bilinear(p.E, p.Estar, cfg.quadrature);
      const McEstimate mc = bilinear_mc(p.E, p.Estar, derive_seed(cfg.seeds[1 % cfg.seeds.size()], "rwt/mc", i), mc_samples);
      const double gap = std::abs(b - mc.estimate);
      const double band = cfg.tol("mc_sigma") * mc.std_error + cfg.tol("quadrature_rel") * b;
      agree = agree && gap <= band;
      worst = std::max(worst, b > 0 ? gap / b : 0.0);
      rep.row(item_name(name, i), "mc_estimate", mc.estimate);
      rep.row(item_name(name, i), "mc_std_error", mc.std_error);
    }
  rep.check("quadrature_matches_monte_carlo", agree, {{"worst_relative_gap", worst}});
  return rep.take();
}

namespace {

// Convergence order of the envelope rasterization error. Each ball gets incommensurate spacings min r / (c1 2^l)
// and rho / (c2 2^l); the error at a level is the largest relative measure error over random lattice offsets,
// averaged over the balls. The order is the fitted slope of log2 error against the level.
struct OrderResult {
  double order_E = 0.0;
  double order_Estar = 0.0;
  std::vector<double> err_E;
  std::vector<double> err_Estar;
};

OrderResult envelope_order(int d, int balls, int offsets, std::uint64_t seed) {
  constexpr int kLevels = 3;
  CounterRng rng(seed);
  OrderResult res;
  res.err_E.assign(kLevels, 0.0);
  res.err_Estar.assign(kLevels, 0.0);
  auto worst_error = [&](const Region& region, double exact, std::vector<double> h) {
    double mx = 0.0;
    for (int k = 0; k < offsets; ++k) {
      GridGeometry g = GridGeometry::covering(region.bounds(), h);
      for (int a = 0; a < d; ++a) {
        g.origin[a] -= rng.uniform() * h[a];
        g.shape[a] += 1;
      }
      mx = std::max(mx, std::abs(rasterize(region, g).measure() - exact) / exact);
    }
    return mx;
  };
  for (int i = 0; i < balls; ++i) {
    const BallParams b = random_ball(d, rng);
    const EnvelopePair env = envelope(b);
    const double c1 = 6.0 + rng.uniform(), c2 = 3.0 + rng.uniform();
    for (int lv = 0; lv < kLevels; ++lv) {
      const double f = std::ldexp(1.0, lv);
      std::vector<double> h(d, b.r.minCoeff() / (c1 * f)), hs(d, b.r_star.minCoeff() / (c1 * f));
      h[d - 1] = hs[d - 1] = b.rho / (c2 * f);
      res.err_E[lv] += worst_error(*env.E_env, env.measure_E, h) / balls;
      res.err_Estar[lv] += worst_error(*env.Estar_env, env.measure_Estar, hs) / balls;
    }
  }
  std::vector<double> x, yE, yS;
  for (int lv = 0; lv < kLevels; ++lv) {
    x.push_back(-lv);
    yE.push_back(std::log2(res.err_E[lv]));
    yS.push_back(std::log2(res.err_Estar[lv]));
  }
  res.order_E = fit_slope(x, yE);
  res.order_Estar = fit_slope(x, yS);
  return res;
}

}  // namespace

SuiteReport suite_prop15(const ExperimentConfig& cfg) {
  const int d = cfg.dimension;
  ReportBuilder rep("prop15", d);
  const double c0 = cfg.constant(dim_key("c0", d));

  const int count = cfg.param<int>("ball", "count", 100);
  CounterRng rng(derive_seed(cfg.seeds[0], "prop15/balls", 0));
  std::vector<double> eps;
  for (int i = 0; i < count; ++i) {
    const BallParams b = random_ball(d, rng);
    const ScorePair s = verify_quasiextremal(b, {});
    eps.push_back(s.epsilon);
    rep.row(item_name("ball", i), "epsilon", s.epsilon);
    rep.row(item_name("ball", i), "alpha", s.alpha);
    rep.row(item_name("ball", i), "alpha_star", s.alpha_star);
  }
  double mean = 0.0, var = 0.0;
  for (double e : eps) mean += e / eps.size();
  for (double e : eps) var += (e - mean) * (e - mean) / eps.size();
  const double cv = std::sqrt(var) / mean;
  rep.check("epsilon_above_c0", min_of(eps) >= cfg.tol("c0_fraction") * c0,
            {{"min_epsilon", min_of(eps)}, {"c0", c0}, {"fraction", cfg.tol("c0_fraction")}});
  rep.check("epsilon_concentrated", cv <= cfg.tol("cv_max"), {{"cv", cv}, {"mean", mean}});

  const OrderResult ord = envelope_order(d, cfg.param<int>("ball", "order_balls", d == 2 ? 40 : 10),
                                         cfg.param<int>("ball", "order_offsets", 16),
                                         derive_seed(cfg.seeds[0], "prop15/order", 0));
  for (std::size_t lv = 0; lv < ord.err_E.size(); ++lv) {
    rep.row(item_name("level", lv), "raster_error_E", ord.err_E[lv]);
    rep.row(item_name("level", lv), "raster_error_Estar", ord.err_Estar[lv]);
  }
  rep.row("envelope", "order_E", ord.order_E);
  rep.row("envelope", "order_Estar", ord.order_Estar);
  rep.check("envelope_convergence_order",
            std::min(ord.order_E, ord.order_Estar) >= cfg.tol("order_min"),
            {{"order_E", ord.order_E}, {"order_Estar", ord.order_Estar}});

  // Shrunk-set slices: x sampled explicitly inside E_eps, slice measure against the full dual box.
  const double e = 1.0 / (4.0 * d);
  const int slice_balls = cfg.param<int>("ball", "slice_balls", 10);
  const int per_ball = cfg.param<int>("ball", "slice_points", 1000);
  CounterRng srng(derive_seed(cfg.seeds[0], "prop15/slice", 0));
  double worst = 0.0;
  std::size_t outside = 0;
  for (int i = 0; i < slice_balls; ++i) {
    const BallParams b = random_ball(d, srng);
    const double exact = std::pow(2.0, d - 1) * b.r_star.prod();
    const Vec xc = head(b.center.first), yc = head(b.center.second);
    const double yd = last(b.center.second);
    for (int k = 0; k < per_ball; ++k) {
      Vec xp = xc;
      for (int j = 0; j < d - 1; ++j)
        xp += (2.0 * srng.uniform() - 1.0) * (1.0 - 1e-9) * e * b.r(j) * b.basis.row(j).transpose();
      const double xd = yd + (xp - yc).squaredNorm() + (2.0 * srng.uniform() - 1.0) * (1.0 - 1e-9) * e * b.rho;
      const SpacePoint x = join(xp, xd);
      if (!in_shrunk_set(b, e, x)) {
        ++outside;
        continue;
      }
      const double m = shrunk_slice_measure(b, e, x, {});
      worst = std::max(worst, std::abs(m - exact) / exact);
    }
    rep.row(item_name("slice_ball", i), "worst_relative_error", worst);
  }
  rep.check("shrunk_slice_exact", worst <= cfg.tol("slice_rel") && outside == 0,
            {{"worst_relative_error", worst}, {"samples_outside", outside}, {"eps", e}});
  return rep.take();
}

namespace {

std::vector<BallParams> cover_balls(const ExperimentConfig& cfg) {
  std::vector<BallParams> balls{unit_ball(cfg.dimension)};
  CounterRng rng(derive_seed(cfg.seeds[0], "cover/balls", 0));
  for (int i = 1; i < cfg.param<int>("cover", "balls", 2); ++i) balls.push_back(random_ball(cfg.dimension, rng));
  return balls;
}

const std::vector<double> kCoverDeltas{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};

}  // namespace

double cover_scale_search(const ExperimentConfig& cfg) {
  const auto samples = cfg.param<std::size_t>("cover", "samples", 100000);
  const std::vector<BallParams> balls = cover_balls(cfg);
  std::vector<std::vector<IncidencePoint>> pts;
  for (std::size_t i = 0; i < balls.size(); ++i)
    pts.push_back(sample_ball(balls[i], samples, derive_seed(cfg.seeds[0], "cover/samples", i)));
  auto covers = [&](double s) {
    for (std::size_t i = 0; i < balls.size(); ++i)
      for (double delta : kCoverDeltas)
        if (cover_coverage(BallCover(balls[i], delta, s), pts[i]) < cfg.tol("coverage_min")) return false;
    return true;
  };
  double lo = 0.9, hi = 1.3;
  while (!covers(lo)) {
    hi = lo;
    lo *= 0.9;
    if (lo < 0.3) throw Error(ErrorKind::ConfigInvalid, "no net scale reaches the coverage tolerance");
  }
  for (int it = 0; it < 8; ++it) {
    const double mid = 0.5 * (lo + hi);
    (covers(mid) ? lo : hi) = mid;
  }
  return lo;
}

SuiteReport suite_cover(const ExperimentConfig& cfg) {
  const int d = cfg.dimension;
  ReportBuilder rep("cover", d);
  const double s = cfg.constant(dim_key("cover_net_scale", d));
  const auto samples = cfg.param<std::size_t>("cover", "samples", 100000);
  const std::vector<BallParams> balls = cover_balls(cfg);
  double min_cov = 1.0, worst_sub = 0.0;
  bool slopes_ok = true;
  nlohmann::json slopes = nlohmann::json::array();
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const std::vector<IncidencePoint> pts = sample_ball(balls[i], samples, derive_seed(cfg.seeds[0], "cover/samples", i));
    const double parent = envelope(balls[i]).measure_E;
    std::vector<double> logd, logj;
    for (double delta : kCoverDeltas) {
      const BallCover c(balls[i], delta, s);
      const double cov = cover_coverage(c, pts);
      min_cov = std::min(min_cov, cov);
      const std::size_t n = c.balls().size();
      for (std::size_t k = 0; k < std::min<std::size_t>(n, 64); ++k)
        worst_sub = std::max(worst_sub, std::abs(envelope(c.balls()[k]).measure_E / parent - delta) / delta);
      logd.push_back(std::log(delta));
      logj.push_back(std::log(static_cast<double>(n)));
      const std::string item = "ball#" + std::to_string(i) + "/delta=" + std::to_string(delta);
      rep.row(item, "count", static_cast<double>(n));
      rep.row(item, "coverage", cov);
    }
    const double a1 = -fit_slope({logd.begin(), logd.begin() + 3}, {logj.begin(), logj.begin() + 3});
    const double a2 = -fit_slope({logd.begin() + 3, logd.end()}, {logj.begin() + 3, logj.end()});
    slopes_ok = slopes_ok && std::isfinite(a1) && std::isfinite(a2) && std::abs(a1 - a2) <= cfg.tol("slope_stability");
    rep.row(item_name("ball", i), "exponent_coarse", a1);
    rep.row(item_name("ball", i), "exponent_fine", a2);
    slopes.push_back({a1, a2});
  }
  rep.check("coverage", min_cov >= cfg.tol("coverage_min"), {{"min_coverage", min_cov}, {"net_scale", s}});
  rep.check("count_exponent_stable", slopes_ok, {{"exponents", slopes}});
  rep.check("sub_ball_measure", worst_sub <= 1e-9, {{"worst_relative_error", worst_sub}});
  return rep.take();
}

SuiteReport suite_symmetry(const ExperimentConfig& cfg) {
  const int d = cfg.dimension;
  ReportBuilder rep("symmetry", d);
  const auto samples = cfg.param<std::size_t>("symmetry", "samples", 10000);
  const char* names[] = {"translation", "shear", "rotation", "parabolic_dilation", "sheared_linear"};
  double worst = 0.0;
  SymmetryElement composite = SymmetryElement::identity(d);
  for (int k = 0; k < 5; ++k) {
    const SymmetryElement g = random_generator(static_cast<SymmetryKind>(k), d, derive_seed(cfg.seeds[0], "symmetry/gen", k));
    const InvarianceReport r = check_invariance(g, samples, derive_seed(cfg.seeds[0], "symmetry/points", k));
    worst = std::max(worst, r.max_residual);
    rep.row(names[k], "max_residual", r.max_residual);
    rep.row(names[k], "scale_error", r.scale_error);
    composite = compose(g, composite);
  }
  rep.check("generator_invariance", worst <= cfg.tol("symmetry_residual"), {{"max_residual", worst}});
  const InvarianceReport rc = check_invariance(composite, samples, derive_seed(cfg.seeds[0], "symmetry/points", 5));
  rep.row("composite", "max_residual", rc.max_residual);
  rep.check("composite_invariance", rc.max_residual <= cfg.tol("composite_residual"), {{"max_residual", rc.max_residual}});

  // Epsilon of analytic pairs before and after each generator, both rasterized on a fine lattice. Parabolic dilations
  // carry the lattice along (lambda, lambda^2) so both rasters are images of each other.
  const int pairs = cfg.param<int>("symmetry", "pairs", 10);
  const std::vector<double> h = cfg.param<std::vector<double>>(
      "symmetry", "spacing", d == 2 ? std::vector<double>{1.0 / 128, 1.0 / 256} : std::vector<double>{1.0 / 64, 1.0 / 64, 1.0 / 128});
  const RandomFamily fams[] = {RandomFamily::Boxes, RandomFamily::BallEnvelope, RandomFamily::TransformedEnvelope};
  double worst_dev = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const RegionPair p = random_regions(fams[i % 3], d, derive_seed(cfg.seeds[0], "symmetry/pair", i));
    const double e0 = score(rasterize(*p.E, h), rasterize(*p.Estar, h), {}).epsilon;
    const std::string item = item_name(family_name(fams[i % 3]), i);
    rep.row(item, "epsilon", e0);
    for (int k = 0; k < 5; ++k) {
      const SymmetryElement g =
          random_generator(static_cast<SymmetryKind>(k), d, derive_seed(cfg.seeds[0], "symmetry/pair_gen", i * 5 + k));
      std::vector<double> hg = h;
      if (static_cast<SymmetryKind>(k) == SymmetryKind::ParabolicDilation) {
        const double lam = std::pow(g.first_scale(), 1.0 / (d + 1));
        for (int a = 0; a < d; ++a) hg[a] *= a == d - 1 ? lam * lam : lam;
      }
      const TransformedRegion E(p.E, g, TransformedRegion::Factor::First);
      const TransformedRegion S(p.Estar, g, TransformedRegion::Factor::Second);
      const double e1 = score(rasterize(E, hg), rasterize(S, hg), {}).epsilon;
      worst_dev = std::max(worst_dev, std::abs(e1 / e0 - 1.0));
      rep.row(item, std::string("relative_change_") + names[k], e1 / e0 - 1.0);
    }
  }
  rep.check("epsilon_invariance", worst_dev <= cfg.tol("epsilon_invariance"), {{"worst_relative_change", worst_dev}});
  return rep.take();
}

}  // namespace rlt::detail
