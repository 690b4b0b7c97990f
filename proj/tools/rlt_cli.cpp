#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "rlt/balls/ball.hpp"
#include "rlt/balls/cover.hpp"
#include "rlt/combinatorics/convexify.hpp"
#include "rlt/combinatorics/extract.hpp"
#include "rlt/combinatorics/tower.hpp"
#include "rlt/core/error.hpp"
#include "rlt/core/io.hpp"
#include "rlt/experiment/config.hpp"
#include "rlt/experiment/generators.hpp"
#include "rlt/experiment/suites.hpp"
#include "rlt/symmetry/symmetry.hpp"
#include "rlt/transform/incidence.hpp"

using namespace rlt;

namespace {

struct Globals {
  int dim = 2;
  std::string out;
  std::string format = "json";
};

Vec parse_vec(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) v.push_back(std::stod(tok));
  return to_vec(v);
}

// Writes to <out>/<name> when --out is set, stdout otherwise.
void emit(const Globals& g, const std::string& name, const json& j) {
  if (g.out.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::filesystem::create_directories(g.out);
  write_json_file(g.out + "/" + name, j);
  std::cout << g.out + "/" + name << "\n";
}

QuadratureSpec quadrature(double t_res, double t_bound) {
  QuadratureSpec q;
  if (t_res > 0) q.t_resolution = t_res;
  if (t_bound > 0) q.t_bound = t_bound;
  return q;
}

json score_json(const ScorePair& s) {
  return {{"incidence", s.incidence}, {"alpha", s.alpha}, {"alpha_star", s.alpha_star}, {"epsilon", s.epsilon}};
}

ExperimentConfig config_for(const std::string& path, int dim) {
  return path.empty() ? default_config(dim) : load_config(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radon-like transform toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--dim", g.dim, "Ambient dimension")->check(CLI::IsMember({2, 3}));
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv", "both"}));

  int code = 0;

  // eval
  auto* eval = app.add_subcommand("eval", "Score a pair of voxel sets");
  std::string e_path, es_path;
  double t_res = 0, t_bound = 0;
  std::size_t mc = 0;
  std::uint64_t seed = 1;
  eval->add_option("--E", e_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--Estar", es_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--t-res", t_res);
  eval->add_option("--t-bound", t_bound);
  eval->add_option("--mc", mc, "Monte Carlo samples");
  eval->add_option("--seed", seed);
  eval->callback([&] {
    const GridSet E = grid_set_from_json(read_json_file(e_path)), Es = grid_set_from_json(read_json_file(es_path));
    json j = score_json(score(E, Es, quadrature(t_res, t_bound)));
    if (mc > 0) {
      const McEstimate m = bilinear_mc(E, Es, seed, mc);
      j["mc_estimate"] = m.estimate;
      j["mc_std_error"] = m.std_error;
    }
    emit(g, "score.json", j);
  });

  // ball
  auto* ball = app.add_subcommand("ball", "Ball parameters");
  ball->require_subcommand(1);
  std::string ball_path, x_s, ys_s, r_s, rs_s;
  auto* bmake = ball->add_subcommand("make", "Build and validate ball parameters (unit ball when no radii are given)");
  bmake->add_option("--x", x_s, "x_bar, comma separated");
  bmake->add_option("--xstar", ys_s, "x_bar*' (the last coordinate is solved from the manifold)");
  bmake->add_option("--r", r_s);
  bmake->add_option("--rstar", rs_s);
  bmake->callback([&] {
    BallParams b = unit_ball(g.dim);
    if (!r_s.empty()) {
      const Vec x = x_s.empty() ? Vec::Zero(g.dim) : parse_vec(x_s);
      const Vec yp = ys_s.empty() ? Vec::Zero(g.dim - 1) : parse_vec(ys_s);
      if (x.size() != g.dim || yp.size() != g.dim - 1) throw Error(ErrorKind::InvalidArgument, "center has the wrong length");
      b = make_ball(on_manifold(x, yp), Mat::Identity(g.dim - 1, g.dim - 1), parse_vec(r_s), parse_vec(rs_s));
    }
    emit(g, "ball.json", to_json(b));
  });
  double cells = 0;
  auto* bscore = ball->add_subcommand("score", "Rasterize the envelopes and score them");
  bscore->add_option("--ball", ball_path)->required()->check(CLI::ExistingFile);
  bscore->add_option("--cells", cells, "Cells per radius");
  bscore->callback([&] {
    const BallParams b = ball_from_json(read_json_file(ball_path));
    RasterSpec spec;
    spec.cells_per_radius = cells;
    const EnvelopePair env = envelope(b);
    json j = score_json(verify_quasiextremal(b, {}, spec));
    j["exact_measure_E"] = env.measure_E;
    j["exact_measure_Estar"] = env.measure_Estar;
    emit(g, "ball_score.json", j);
  });
  double delta = 0.5, net_scale = 1.0;
  auto* bcover = ball->add_subcommand("cover", "Cover a ball by sub-balls of parameter delta");
  bcover->add_option("--ball", ball_path)->required()->check(CLI::ExistingFile);
  bcover->add_option("--delta", delta)->required();
  bcover->add_option("--net-scale", net_scale);
  bcover->callback([&] {
    const BallParams b = ball_from_json(read_json_file(ball_path));
    const BallCover c(b, delta, net_scale);
    json balls = json::array();
    for (const BallParams& s : c.balls()) balls.push_back(to_json(s));
    const double cov = cover_coverage(c, sample_ball(b, 20000, 1));
    emit(g, "cover.json", {{"count", c.balls().size()}, {"eta", c.eta()}, {"coverage", cov}, {"balls", balls}});
  });
  double eps = 0.125;
  auto* bslice = ball->add_subcommand("slice", "Slice measure of a point of the shrunk set");
  bslice->add_option("--ball", ball_path)->required()->check(CLI::ExistingFile);
  bslice->add_option("--eps", eps);
  bslice->add_option("--x", x_s)->required();
  bslice->callback([&] {
    const BallParams b = ball_from_json(read_json_file(ball_path));
    const Vec x = parse_vec(x_s);
    if (x.size() != b.dim()) throw Error(ErrorKind::InvalidArgument, "--x needs " + std::to_string(b.dim()) + " coordinates");
    const double m = shrunk_slice_measure(b, eps, x, {});
    emit(g, "slice.json", {{"slice_measure", m}, {"full_dual_box", std::pow(2.0, b.dim() - 1) * b.r_star.prod()}});
  });

  // symmetry
  auto* sym = app.add_subcommand("symmetry", "Symmetry group actions");
  sym->require_subcommand(1);
  std::string word_path, point_s, side = "first";
  auto* sapply = sym->add_subcommand("apply", "Apply a generator word to a ball or a point");
  sapply->add_option("--word", word_path)->required()->check(CLI::ExistingFile);
  sapply->add_option("--ball", ball_path)->check(CLI::ExistingFile);
  sapply->add_option("--point", point_s, "Comma-separated point on the chosen side");
  sapply->add_option("--side", side)->check(CLI::IsMember({"first", "second"}));
  sapply->callback([&] {
    const SymmetryElement w = element_from_json(read_json_file(word_path), g.dim);
    if (!ball_path.empty()) {
      emit(g, "ball.json", to_json(apply_ball(w, ball_from_json(read_json_file(ball_path)))));
    } else if (!point_s.empty()) {
      const Vec p = parse_vec(point_s);
      if (p.size() != g.dim) throw Error(ErrorKind::InvalidArgument, "--point needs " + std::to_string(g.dim) + " coordinates");
      emit(g, "point.json", {{"point", to_std(side == "first" ? w.map_first(p) : w.map_second(p))}});
    } else {
      throw Error(ErrorKind::InvalidArgument, "give --ball or --point");
    }
  });

  // tower, convexify, extract
  auto* tower = app.add_subcommand("tower", "Towers");
  tower->require_subcommand(1);
  auto* tbuild = tower->add_subcommand("build", "Build the two-generation tower of a pair");
  tbuild->add_option("--E", e_path)->required()->check(CLI::ExistingFile);
  tbuild->add_option("--Estar", es_path)->required()->check(CLI::ExistingFile);
  tbuild->add_option("--t-res", t_res);
  tbuild->callback([&] {
    const TowerData t = build_tower(grid_set_from_json(read_json_file(e_path)), grid_set_from_json(read_json_file(es_path)),
                                    quadrature(t_res, 0));
    emit(g, "tower.json", to_json(t));
  });
  std::string s_path;
  double eta = 0.5;
  bool unbalanced = false;
  auto* conv = app.add_subcommand("convexify", "Convex approximation of a set in R^n, n <= 2");
  conv->add_option("--S", s_path)->required()->check(CLI::ExistingFile);
  conv->add_option("--eta", eta);
  conv->add_flag("--unbalanced", unbalanced);
  conv->callback([&] {
    ConvexifyOptions o;
    o.eta = eta;
    o.balanced = !unbalanced;
    emit(g, "convex.json", to_json(convexify(grid_set_from_json(read_json_file(s_path)), o)));
  });
  auto* extract = app.add_subcommand("extract", "Extract a ball from a pair");
  extract->add_option("--E", e_path)->required()->check(CLI::ExistingFile);
  extract->add_option("--Estar", es_path)->required()->check(CLI::ExistingFile);
  extract->callback([&] {
    emit(g, "extract.json",
         to_json(extract_ball(grid_set_from_json(read_json_file(e_path)), grid_set_from_json(read_json_file(es_path)), {})));
  });

  // generate
  auto* gen = app.add_subcommand("generate", "Corpus generators");
  gen->require_subcommand(1);
  int N = 8;
  double gdelta = 1.0 / 128, spread = 2.0;
  std::string family = "boxes";
  auto write_pair = [&](const SetPair& p) {
    emit(g, "E.json", to_json(p.E));
    emit(g, "Estar.json", to_json(p.Estar));
  };
  auto* gpc = gen->add_subcommand("paraboloid-cluster", "Balls and paraboloid tubes through N separated centers");
  gpc->add_option("--N", N)->required();
  gpc->add_option("--delta", gdelta);
  gpc->add_option("--spread", spread);
  gpc->add_option("--seed", seed);
  gpc->callback([&] {
    if (g.out.empty()) throw Error(ErrorKind::InvalidArgument, "generate needs --out");
    write_pair(gen_paraboloid_cluster(g.dim, N, gdelta, seed, spread).sets);
  });
  auto* grand = gen->add_subcommand("random", "One pair of the random corpus");
  grand->add_option("--family", family, "voxel_union, boxes, ball_envelope or transformed_envelope");
  grand->add_option("--seed", seed);
  grand->callback([&] {
    if (g.out.empty()) throw Error(ErrorKind::InvalidArgument, "generate needs --out");
    write_pair(gen_random_sets(family_from_name(family), g.dim, seed));
  });

  // suite, calibrate
  auto* suite = app.add_subcommand("suite", "Acceptance suites");
  suite->require_subcommand(1);
  std::string suite_name, config_path;
  auto* srun = suite->add_subcommand("run", "Run a suite and write its report");
  srun->add_option("name", suite_name)->required();
  srun->add_option("--config", config_path)->check(CLI::ExistingFile);
  srun->callback([&] {
    const ExperimentConfig cfg = config_for(config_path, g.dim);
    const SuiteReport r = run_suite(suite_name, cfg);
    write_report(r, g.out.empty() ? "reports" : g.out, g.format);
    for (const Check& c : r.checks) std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " " << c.details.dump() << "\n";
    code = r.passed() ? 0 : 1;
  });
  auto* cal = app.add_subcommand("calibrate", "Derive the frozen constants from a calibration config");
  cal->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  cal->callback([&] {
    const ExperimentConfig cfg = load_config(config_path);
    const Calibration c = calibrate(cfg);
    if (!cfg.constants_path.empty()) {
      std::map<std::string, double> all = load_constants(cfg.constants_path);
      for (const auto& [k, v] : c.constants) all[k] = v;
      save_constants(cfg.constants_path, all);
    }
    json consts = json::object();
    for (const auto& [k, v] : c.constants) consts[k] = v;
    emit(g, "calibration_d" + std::to_string(cfg.dimension) + ".json", {{"constants", consts}, {"evidence", c.evidence}});
  });

  // Global flags are accepted after the subcommand names too.
  std::function<void(CLI::App*)> fall = [&](CLI::App* a) {
    a->fallthrough();
    for (CLI::App* sub : a->get_subcommands({})) fall(sub);
  };
  fall(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::UnknownSuite:
      case ErrorKind::ConfigInvalid:
      case ErrorKind::InvalidArgument:
        return 2;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return code;
}
