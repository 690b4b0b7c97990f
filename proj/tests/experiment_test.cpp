#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "rlt/core/error.hpp"
#include "rlt/core/io.hpp"
#include "rlt/experiment/config.hpp"
#include "rlt/experiment/generators.hpp"
#include "rlt/experiment/suites.hpp"
#include "rlt/transform/incidence.hpp"
#include "rlt/transform/lorentz.hpp"

using namespace rlt;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(C0Oracle, ClosedFormAndTable) {
  EXPECT_DOUBLE_EQ(c0_oracle(2), 6.0 / std::pow(4.0, 4.0 / 3.0));
  EXPECT_NEAR(c0_oracle(2), 0.944940787421155, 1e-15);
  EXPECT_NEAR(c0_oracle(3), 0.8995394817634949, 1e-12);
  EXPECT_EQ(kind_of([] { c0_oracle(4); }), ErrorKind::DimensionUnsupported);
}

TEST(Config, DefaultsLoadWithConstants) {
  for (int d : {2, 3}) {
    const ExperimentConfig c = default_config(d);
    EXPECT_EQ(c.dimension, d);
    EXPECT_EQ(c.constant(dim_key("c0", d)), c0_oracle(d));
    EXPECT_GT(c.constant(dim_key("K", d)), c.constant(dim_key("c0", d)));
    EXPECT_EQ(c.param<int>("ball", "count", 0), 100);
  }
  EXPECT_EQ(dim_key("K", 3), "K_d3");
}

TEST(Config, Validation) {
  EXPECT_EQ(kind_of([] { config_from_json({{"dimension", 4}}); }), ErrorKind::ConfigInvalid);
  EXPECT_EQ(kind_of([] { config_from_json({{"seeds", nlohmann::json::array()}}); }), ErrorKind::ConfigInvalid);
  EXPECT_EQ(kind_of([] { config_from_json({{"tolerances", {{"bogus", 1.0}}}}); }), ErrorKind::ConfigInvalid);
  EXPECT_EQ(kind_of([] { config_from_json({{"quadrature", {{"t_resolution", -1.0}}}}); }), ErrorKind::ConfigInvalid);
  EXPECT_EQ(kind_of([] { config_from_json(nlohmann::json::array()); }), ErrorKind::ConfigInvalid);
  const ExperimentConfig c = config_from_json({{"frozen_constants", {{"K_d2", 1.0}}}});
  EXPECT_EQ(c.constant("K_d2"), 1.0);
  EXPECT_EQ(kind_of([&] { c.constant("K_d3"); }), ErrorKind::ConfigInvalid);
}

TEST(Config, JsonRoundTrip) {
  const ExperimentConfig c = default_config(3);
  const ExperimentConfig d = config_from_json(to_json(c));
  EXPECT_EQ(d.dimension, 3);
  EXPECT_EQ(d.seeds, c.seeds);
  EXPECT_EQ(d.frozen_constants, c.frozen_constants);
  EXPECT_EQ(d.generators.size(), c.generators.size());
  EXPECT_EQ(d.quadrature.t_resolution, c.quadrature.t_resolution);
}

TEST(Generators, RandomSetsDeterministicAndNonempty) {
  for (int d : {2, 3})
    for (RandomFamily f : kRandomFamilies) {
      const std::uint64_t s = derive_seed(9, "test/" + family_name(f), 0);
      const SetPair a = gen_random_sets(f, d, s), b = gen_random_sets(f, d, s);
      EXPECT_EQ(a.E, b.E);
      EXPECT_EQ(a.Estar, b.Estar);
      EXPECT_GT(a.E.measure(), 0.0);
      EXPECT_GT(a.Estar.measure(), 0.0);
      if (f != RandomFamily::VoxelUnion) {
        EXPECT_GE(a.E.voxel_count(), kMinCorpusVoxels);
        EXPECT_GE(a.Estar.voxel_count(), kMinCorpusVoxels);
      }
      EXPECT_TRUE(std::isfinite(a.E.measure()));
      EXPECT_EQ(family_from_name(family_name(f)), f);
    }
  EXPECT_NE(derive_seed(1, "a", 0), derive_seed(1, "a", 1));
  EXPECT_NE(derive_seed(1, "a", 0), derive_seed(1, "b", 0));
}

TEST(Generators, SingleParaboloidTube) {
  const ClusterPair c = gen_paraboloid_cluster(2, 1, 1.0 / 64, 3);
  ASSERT_EQ(c.centers.size(), 1u);
  const double tube = paraboloid_tube_measure(2, 1.0 / 64);
  EXPECT_NEAR(c.sets.Estar.measure(), tube, 0.3 * tube);
  // Every point of E sees the whole tube parameter range, T chi_{E*} >= 1 up to the lattice.
  const auto v = indicator_transform(c.sets.Estar, c.sets.E, {}, Direction::Forward);
  for (double x : v) EXPECT_GE(x, 1.0);
}

TEST(Generators, DiluteKeepsIncidence) {
  const SetPair p = gen_random_sets(RandomFamily::BallEnvelope, 2, 5);
  const SetPair q = dilute(p, 4.0);
  EXPECT_NEAR(q.E.measure() / p.E.measure(), 4.0, 0.05);
  EXPECT_NEAR(q.Estar.measure() / p.Estar.measure(), 4.0, 0.05);
  const double a = bilinear(p.E, p.Estar, {}), b = bilinear(q.E, q.Estar, {});
  EXPECT_NEAR(b, a, 1e-9 * a);
}

TEST(Generators, FlatFunctionLevels) {
  const GridGeometry g({-1.0, -1.0}, {1.0 / 128, 1.0 / 128}, {256, 256});
  const GridFunction f = flat_function(g, 4096, 3, 1);
  const double p = 1.5;
  std::map<int, int> counts;
  for (double v : f.values())
    if (v > 0) ++counts[static_cast<int>(std::floor(std::log2(v)))];
  ASSERT_EQ(counts.size(), 3u);
  EXPECT_EQ(counts[0], 4096);
  EXPECT_EQ(counts[1], std::llround(4096 * std::pow(2.0, -p)));
  EXPECT_NEAR(flatness_gain(f, f, 1.0, {}).worst_level_ratio, flat_level_ratio(g, 4096, 3), 1e-12);
}

TEST(Generators, Lambda0) {
  EXPECT_DOUBLE_EQ(lambda0(1.0, 8.0, 2), 1.0);
  EXPECT_DOUBLE_EQ(lambda0(0.5, 0.5, 2), std::pow(0.25, 2.0 / 3.0));
  EXPECT_DOUBLE_EQ(lambda0(0.01, 100.0, 3), 0.01);
}

TEST(Suites, RegistryAndUnknownName) {
  EXPECT_EQ(suite_names().size(), 12u);
  EXPECT_EQ(kind_of([] { run_suite("nope", default_config(2)); }), ErrorKind::UnknownSuite);
  EXPECT_EQ(kind_of([] { run_suite("lambda0", default_config(3)); }), ErrorKind::ConfigInvalid);
}

TEST(Suites, Prop15ReportsPerDrawEpsilon) {
  const SuiteReport r = run_suite("prop15", default_config(2));
  EXPECT_TRUE(r.passed());
  int eps = 0;
  for (const Measurement& m : r.rows) eps += m.metric == "epsilon";
  EXPECT_EQ(eps, 100);
  ASSERT_NE(r.find("epsilon_above_c0"), nullptr);
  EXPECT_TRUE(r.find("epsilon_above_c0")->passed);
}

TEST(Suites, ReportFormats) {
  SuiteReport r{"demo", 2, {{"ok", true, {{"x", 1}}}}, {{"a,b", "m", 0.5}, {"c", "m", NAN}}};
  const nlohmann::json j = r.to_json();
  EXPECT_EQ(j["suite"], "demo");
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_EQ(j["rows"][1]["value"], "nan");
  const std::string csv = r.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "suite,dim,item,metric,value");
  EXPECT_NE(csv.find("\"a,b\""), std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "rlt_report_test";
  std::filesystem::remove_all(dir);
  write_report(r, dir.string(), "both");
  EXPECT_TRUE(std::filesystem::exists(dir / "demo_d2.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "demo_d2.csv"));
  EXPECT_EQ(read_json_file((dir / "demo_d2.json").string())["checks"][0]["name"], "ok");
  EXPECT_EQ(kind_of([&] { write_report(r, dir.string(), "xml"); }), ErrorKind::InvalidArgument);
  std::filesystem::remove_all(dir);
}

TEST(Suites, Deterministic) {
  const ExperimentConfig c = default_config(2);
  EXPECT_EQ(run_suite("convexify", c).to_csv(), run_suite("convexify", c).to_csv());
  EXPECT_EQ(run_suite("slicing", c).to_json().dump(), run_suite("slicing", c).to_json().dump());
}
