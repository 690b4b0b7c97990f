#include <algorithm>
#include <cmath>
#include <numbers>

#include "rlt/balls/ball.hpp"
#include "rlt/core/error.hpp"
#include "rlt/experiment/generators.hpp"
#include "rlt/transform/incidence.hpp"
#include "rlt/transform/lorentz.hpp"
#include "suite_impl.hpp"

namespace rlt::detail {

TrilinearSweep trilinear_sweep(const ExperimentConfig& cfg, ReportBuilder* out) {
  const int d = cfg.dimension;
  TrilinearSweep sw;
  std::vector<BallParams> balls{unit_ball(d)};
  CounterRng rng(derive_seed(cfg.seeds[0], "trilinear/balls", 0));
  for (int i = 0; i < cfg.param<int>("trilinear", "balls", 10); ++i) balls.push_back(random_ball(d, rng));
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const BallParams& b = balls[i];
    const EnvelopeRaster ras = rasterize_envelope(b);
    const GridSet& S = ras.Estar;
    const double beta = std::pow(2.0, d - 1) * b.r_star.prod();
    for (double e : {1.0 / (4.0 * d), 1.0 / (8.0 * d)}) {
      // The shrunk set is thin; refine its own lattice until it is resolved.
      auto spacing = ras.E.geometry().spacing;
      GridSet G = rasterize(shrunk_envelope(b, e), spacing);
      for (int k = 0; k < 4 && G.voxel_count() < 256; ++k) {
        for (double& h : spacing) h /= 2.0;
        G = rasterize(shrunk_envelope(b, e), spacing);
      }
      const std::vector<double> vals = indicator_transform(S, G, {}, Direction::Forward);
      // On the raster the slices of the shrunk set are full up to voxel rounding; beta' takes the smaller value.
      const double beta_prime = std::min(beta, min_of(vals));
      const TrilinearReport r = trilinear_check(S, S, G, beta_prime, {});
      sw.ratio.push_back(r.ratio);
      sw.hypothesis_ok.push_back(r.hypothesis_ok);
      if (out) {
        const std::string item = (i == 0 ? std::string("unit") : item_name("ball", i)) + "/eps=" + std::to_string(e);
        out->row(item, "beta_prime_fraction", beta_prime / beta);
        out->row(item, "lhs", r.lhs);
        out->row(item, "rhs", r.rhs);
        out->row(item, "ratio", r.ratio);
      }
    }
    // Adversarial third sets: the unshrunk envelope claims the full slice everywhere, a far box claims any slice.
    ++sw.adversarial;
    sw.detected += trilinear_check(S, S, ras.E, beta, {}).hypothesis_ok ? 0 : 1;
    Box far = ras.E.occupied_bounds();
    far.lo(d - 1) += 100.0 + 10.0 * b.rho;
    far.hi(d - 1) += 100.0 + 10.0 * b.rho;
    ++sw.adversarial;
    sw.detected += trilinear_check(S, S, rasterize(BoxRegion(far), ras.E.geometry().spacing), 0.5 * beta, {}).hypothesis_ok ? 0 : 1;
  }
  return sw;
}

SuiteReport suite_trilinear(const ExperimentConfig& cfg) {
  const int d = cfg.dimension;
  ReportBuilder rep("trilinear", d);
  const double bound = cfg.constant(dim_key("trilinear_bound", d));
  const TrilinearSweep sw = trilinear_sweep(cfg, &rep);
  rep.check("ratio_bound", max_of(sw.ratio) <= bound, {{"max_ratio", max_of(sw.ratio)}, {"bound", bound}});
  rep.check("hypothesis_holds", std::all_of(sw.hypothesis_ok.begin(), sw.hypothesis_ok.end(), [](bool b) { return b; }));
  rep.check("violations_detected", sw.detected == sw.adversarial,
            {{"adversarial", sw.adversarial}, {"detected", sw.detected}});
  return rep.take();
}

namespace {

GridFunction grid_values(const std::vector<double>& v) {
  const auto n = static_cast<std::int64_t>(v.size());
  return GridFunction(GridGeometry({0.0, 0.0}, {1.0, 1.0}, {1, n}), v);
}

double rel(double a, double b) { return b == 0.0 ? std::abs(a) : std::abs(a / b - 1.0); }

}  // namespace

SuiteReport suite_lorentz(const ExperimentConfig& cfg) {
  const int d = cfg.dimension;
  ReportBuilder rep("lorentz", d);
  const double tol = cfg.tol("lorentz_rel");
  const double p = (d + 1.0) / d;
  const double inf = std::numeric_limits<double>::infinity();

  // chi_E with |E| = 5: one level, norm |E|^{1/p} for every r.
  double worst = 0.0;
  const GridFunction chi = grid_values({1, 1, 1, 1, 1, 0, 0});
  for (double r : {1.0, 2.0, inf}) worst = std::max(worst, rel(lorentz_norm(chi, {p, r}).norm, std::pow(5.0, 1.0 / p)));
  // 2 chi_A + chi_B with |A| = 3, |B| = 4: levels k = 1 and k = 0.
  const GridFunction two = grid_values({2, 2, 2, 1, 1, 1, 1, 0});
  const double a = 2.0 * std::pow(3.0, 1.0 / p), b = std::pow(4.0, 1.0 / p);
  worst = std::max(worst, rel(lorentz_norm(two, {p, 1.0}).norm, a + b));
  worst = std::max(worst, rel(lorentz_norm(two, {p, 2.0}).norm, std::hypot(a, b)));
  worst = std::max(worst, rel(lorentz_norm(two, {p, inf}).norm, std::max(a, b)));
  worst = std::max(worst, lorentz_norm(grid_values({0, 0, 0}), {p, 1.0}).norm);
  rep.row("closed_forms", "worst_relative_error", worst);
  rep.check("closed_forms", worst <= tol, {{"worst_relative_error", worst}});

  // r = p is the L^p norm up to the level rounding, a factor at most 2.
  const GridFunction mixed = grid_values({0.3, 0.7, 1.2, 3.9, 5.5, 0.0, 2.2});
  const double lp = lorentz_norm(mixed, {p, p}).norm / mixed.lp_norm(p);
  rep.row("r_equals_p", "ratio_to_lp", lp);
  rep.check("r_equals_p", lp >= 0.5 && lp <= 2.0, {{"ratio", lp}});

  // Spread-out corpus: f the indicator of a coarse cube, f* flat at the smallest number of levels meeting each eta.
  const std::vector<std::int64_t> shape = cfg.param<std::vector<std::int64_t>>(
      "flat", "shape", d == 3 ? std::vector<std::int64_t>{128, 128, 1024} : std::vector<std::int64_t>{512, 256});
  std::vector<double> h;
  for (std::int64_t s : shape) h.push_back(2.0 / static_cast<double>(s));
  const GridGeometry g(std::vector<double>(d, -1.0), h, shape);
  const auto n0 = cfg.param<std::int64_t>("flat", "n0", d == 3 ? std::int64_t{1} << 23 : std::int64_t{1} << 16);
  const std::vector<double> etas =
      cfg.param<std::vector<double>>("flat", "eta", d == 3 ? std::vector<double>{0.5, 0.25, 0.125, 0.0625}
                                                           : std::vector<double>{0.5, 0.25, 0.125});
  const GridGeometry gf(std::vector<double>(d, -1.0), std::vector<double>(d, 0.25), std::vector<std::int64_t>(d, 8));
  const GridFunction f(gf, std::vector<double>(static_cast<std::size_t>(std::pow(8, d)), 1.0));

  // Boundary case: at the exact worst level ratio the flatness check passes, just below it the input is rejected.
  const GridFunction fb = flat_function(g, n0, 2, derive_seed(cfg.seeds[0], "lorentz/flat", 0));
  const double w = flat_level_ratio(g, n0, 2);
  bool boundary = true;
  try {
    flatness_gain(f, fb, w, {});
  } catch (const Error&) {
    boundary = false;
  }
  try {
    flatness_gain(f, fb, w * (1.0 - 1e-6), {});
    boundary = false;
  } catch (const Error& e) {
    boundary = boundary && e.kind() == ErrorKind::FlatnessViolated;
  }
  rep.check("flatness_boundary", boundary, {{"level_ratio", w}});

  bool monotone = true;
  nlohmann::json sweeps = nlohmann::json::array();
  for (std::size_t si = 0; si < std::min<std::size_t>(2, cfg.seeds.size()); ++si) {
    std::vector<double> ratios;
    for (double eta : etas) {
      int L = 1;
      while (flat_level_ratio(g, n0, L) > eta) {
        if (++L > 40) throw Error(ErrorKind::ConfigInvalid, "flat corpus cannot reach eta = " + std::to_string(eta));
      }
      const GridFunction fs = flat_function(g, n0, L, derive_seed(cfg.seeds[si], "lorentz/flat", 0));
      const FlatnessReport r = flatness_gain(f, fs, eta, {});
      ratios.push_back(r.ratio);
      const std::string item = "seed" + std::to_string(si) + "/eta=" + std::to_string(eta);
      rep.row(item, "levels", L);
      rep.row(item, "level_ratio", r.worst_level_ratio);
      rep.row(item, "ratio", r.ratio);
    }
    for (std::size_t i = 1; i < ratios.size(); ++i)
      monotone = monotone && ratios[i] <= ratios[i - 1] * (1.0 + cfg.tol("monotone_noise"));
    sweeps.push_back(ratios);
  }
  rep.check("flatness_gain_nonincreasing", monotone, {{"eta", etas}, {"ratios", sweeps}});
  return rep.take();
}

ClusterSweep cluster_sweep(const ExperimentConfig& cfg, ReportBuilder* out) {
  const int d = cfg.dimension;
  if (d != 2) throw Error(ErrorKind::ConfigInvalid, "the paraboloid-cluster suite runs in d = 2");
  const double delta = cfg.param<double>("paraboloid_cluster", "delta", 1.0 / 128);
  const double spread = cfg.param<double>("paraboloid_cluster", "spread", 2.0);
  ClusterSweep sw;
  sw.N = cfg.param<std::vector<int>>("paraboloid_cluster", "N", {4, 8, 16, 32});
  QuadratureSpec q0;
  q0.t_bound = 1.0;
  for (std::size_t si = 0; si < std::min<std::size_t>(2, cfg.seeds.size()); ++si) {
    sw.epsilon.emplace_back();
    for (int N : sw.N) {
      const ClusterPair c = gen_paraboloid_cluster(d, N, delta, derive_seed(cfg.seeds[si], "lambda0", N), spread);
      const ScorePair s = score(c.sets.E, c.sets.Estar, {});
      const double T0 = bilinear(c.sets.E, c.sets.Estar, q0);
      const double L0 = lambda0(c.sets.E.measure(), c.sets.Estar.measure(), d);
      const std::vector<double> vals = indicator_transform(c.sets.Estar, c.sets.E, q0, Direction::Forward);
      sw.epsilon.back().push_back(s.epsilon);
      sw.lambda0_ratio.push_back(T0 / L0);
      sw.t_lower.push_back(min_of(vals));
      if (out) {
        const std::string item = "seed" + std::to_string(si) + "/N=" + std::to_string(N);
        out->row(item, "epsilon", s.epsilon);
        out->row(item, "measure_E", c.sets.E.measure());
        out->row(item, "measure_Estar", c.sets.Estar.measure());
        out->row(item, "T0", T0);
        out->row(item, "T0_over_Lambda0", T0 / L0);
        out->row(item, "min_T_on_E", sw.t_lower.back());
      }
    }
  }
  return sw;
}

SuiteReport suite_lambda0(const ExperimentConfig& cfg) {
  const int d = cfg.dimension;
  if (d != 2) throw Error(ErrorKind::ConfigInvalid, "the lambda0 suite runs in d = 2");
  ReportBuilder rep("lambda0", d);
  const double lower = cfg.constant("lambda0_lower_d2"), upper = cfg.constant("lambda0_upper_d2");
  const double t_lower = cfg.constant("paraboloid_T_lower_d2");
  const double c0 = cfg.constant("c0_d2");
  const ClusterSweep sw = cluster_sweep(cfg, &rep);

  bool monotone = true;
  for (const auto& e : sw.epsilon)
    for (std::size_t i = 1; i < e.size(); ++i) monotone = monotone && e[i] <= e[i - 1] * (1.0 + cfg.tol("monotone_noise"));
  rep.check("epsilon_decreasing", monotone, {{"N", sw.N}, {"epsilon", sw.epsilon}});
  rep.check("lambda0_band", min_of(sw.lambda0_ratio) >= lower && max_of(sw.lambda0_ratio) <= upper,
            {{"min", min_of(sw.lambda0_ratio)}, {"max", max_of(sw.lambda0_ratio)}, {"lower", lower}, {"upper", upper}});
  rep.check("transform_lower_bound", min_of(sw.t_lower) >= t_lower, {{"min", min_of(sw.t_lower)}, {"bound", t_lower}});
  double last_eps = 0.0;
  for (const auto& e : sw.epsilon) last_eps = std::max(last_eps, e.back());
  rep.check("sparse_penalty", last_eps <= cfg.tol("sparse_fraction") * c0, {{"epsilon", last_eps}, {"c0", c0}});

  // A single tube pair against its closed-form measures.
  const double delta = cfg.param<double>("paraboloid_cluster", "delta", 1.0 / 128);
  const ClusterPair one = gen_paraboloid_cluster(d, 1, delta, derive_seed(cfg.seeds[0], "lambda0", 1));
  const double mE = one.sets.E.measure() / (std::numbers::pi * delta * delta);
  const double mS = one.sets.Estar.measure() / paraboloid_tube_measure(d, delta);
  rep.row("N=1", "measure_E_over_disk", mE);
  rep.row("N=1", "measure_Estar_over_tube", mS);
  rep.check("measure_scaling", std::abs(mE - 1.0) <= cfg.tol("measure_scaling") && std::abs(mS - 1.0) <= cfg.tol("measure_scaling"),
            {{"E", mE}, {"Estar", mS}});
  return rep.take();
}

}  // namespace rlt::detail
