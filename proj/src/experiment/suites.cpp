#include "rlt/experiment/suites.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "rlt/core/error.hpp"
#include "rlt/combinatorics/tower.hpp"
#include "rlt/core/io.hpp"
#include "suite_impl.hpp"

namespace rlt {

namespace detail {

ReportBuilder::ReportBuilder(std::string suite, int dim) {
  rep_.suite = std::move(suite);
  rep_.dim = dim;
}

void ReportBuilder::row(const std::string& item, const std::string& metric, double value) {
  rep_.rows.push_back({item, metric, value});
}

void ReportBuilder::check(const std::string& name, bool passed, nlohmann::json details) {
  rep_.checks.push_back({name, passed, std::move(details)});
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2 || x.size() != y.size()) return std::numeric_limits<double>::quiet_NaN();
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

double min_of(const std::vector<double>& v) {
  return v.empty() ? std::numeric_limits<double>::quiet_NaN() : *std::min_element(v.begin(), v.end());
}

double max_of(const std::vector<double>& v) {
  return v.empty() ? std::numeric_limits<double>::quiet_NaN() : *std::max_element(v.begin(), v.end());
}

std::string item_name(const std::string& prefix, std::size_t i) { return prefix + "#" + std::to_string(i); }

}  // namespace detail

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* SuiteReport::find(const std::string& name) const {
  for (const Check& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

// JSON has no NaN or infinity; they are written as strings.
nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json cs = nlohmann::json::array();
  for (const Check& c : checks) cs.push_back({{"name", c.name}, {"passed", c.passed}, {"details", c.details}});
  nlohmann::json rs = nlohmann::json::array();
  for (const Measurement& m : rows) rs.push_back({{"item", m.item}, {"metric", m.metric}, {"value", number(m.value)}});
  return {{"suite", suite}, {"dim", dim}, {"passed", passed()}, {"checks", cs}, {"rows", rs}};
}

std::string SuiteReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "suite,dim,item,metric,value\n";
  for (const Measurement& m : rows)
    os << csv_field(suite) << ',' << dim << ',' << csv_field(m.item) << ',' << csv_field(m.metric) << ',' << m.value
       << '\n';
  return os.str();
}

namespace {

using SuiteFn = std::function<SuiteReport(const ExperimentConfig&)>;

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r{
      {"rwt", detail::suite_rwt},           {"prop15", detail::suite_prop15},
      {"cover", detail::suite_cover},       {"symmetry", detail::suite_symmetry},
      {"tower", detail::suite_tower},       {"slicing", detail::suite_slicing},
      {"convexify", detail::suite_convexify}, {"detmoment", detail::suite_detmoment},
      {"trilinear", detail::suite_trilinear}, {"lorentz", detail::suite_lorentz},
      {"extract", detail::suite_extract},   {"lambda0", detail::suite_lambda0},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, fn] : registry()) n.push_back(k);
    return n;
  }();
  return names;
}

SuiteReport run_suite(const std::string& name, const ExperimentConfig& cfg) {
  for (const auto& [k, fn] : registry())
    if (k == name) return fn(cfg);
  throw Error(ErrorKind::UnknownSuite, "no suite named '" + name + "'");
}

void write_report(const SuiteReport& r, const std::string& out_dir, const std::string& format) {
  if (format != "json" && format != "csv" && format != "both")
    throw Error(ErrorKind::InvalidArgument, "format must be json, csv or both");
  std::filesystem::create_directories(out_dir);
  const std::string stem = out_dir + "/" + r.suite + "_d" + std::to_string(r.dim);
  if (format != "csv") write_json_file(stem + ".json", r.to_json());
  if (format != "json") {
    std::ofstream out(stem + ".csv");
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + stem + ".csv");
    out << r.to_csv();
  }
}

double c0_oracle(int d) {
  // I_2 = int_{[-1,1]^2} max(0, 1 - |ab|) = 3. I_3 was integrated once by adaptive cubature over [-1,1]^4
  // (cross-checked by 10^8-sample Monte Carlo).
  if (d == 2) return 2.0 * 3.0 / std::pow(4.0, 4.0 / 3.0);
  if (d == 3) return 2.0 * 10.17712748 / std::pow(4.0, 9.0 / 4.0);
  throw Error(ErrorKind::DimensionUnsupported, "c0 is tabulated for d = 2, 3");
}

Calibration calibrate(const ExperimentConfig& cfg) {
  const int d = cfg.dimension;
  Calibration cal;
  cal.evidence = nlohmann::json::object();
  auto& C = cal.constants;

  C[dim_key("c0", d)] = c0_oracle(d);

  const std::vector<double> eps = detail::rwt_epsilons(cfg, nullptr);
  C[dim_key("K", d)] = 1.1 * detail::max_of(eps);
  cal.evidence["rwt_max_epsilon"] = detail::max_of(eps);

  const double s = detail::cover_scale_search(cfg);
  C[dim_key("cover_net_scale", d)] = std::min(1.0, s / 1.1);
  cal.evidence["cover_max_net_scale"] = s;

  const detail::TowerSweep t = detail::tower_sweep(cfg, nullptr);
  if (!t.failures.empty()) throw Error(ErrorKind::TowerFailed, "calibration tower failed: " + t.failures.front());
  C[dim_key("kappa1", d)] = 0.9 * detail::min_of(t.omega_ratio);
  C["kappa2"] = kTowerFiberFraction;
  C[dim_key("kappa3", d)] = detail::min_of(t.phi_ratio);
  cal.evidence["tower_min_omega_ratio"] = detail::min_of(t.omega_ratio);
  cal.evidence["tower_min_phi_ratio"] = detail::min_of(t.phi_ratio);

  const std::vector<double> sl = detail::slicing_ratios(cfg, nullptr);
  C[dim_key("slicing_c", d)] = 0.9 * detail::min_of(sl);
  cal.evidence["slicing_min_ratio"] = detail::min_of(sl);

  const detail::DetMomentSweep dm = detail::detmoment_sweep(cfg, nullptr);
  C["detmoment_c_n" + std::to_string(d - 1)] = 0.9 * detail::min_of(dm.ratio);
  cal.evidence["detmoment_min_ratio"] = detail::min_of(dm.ratio);

  const detail::TrilinearSweep tr = detail::trilinear_sweep(cfg, nullptr);
  C[dim_key("trilinear_bound", d)] = 1.1 * detail::max_of(tr.ratio);
  cal.evidence["trilinear_max_ratio"] = detail::max_of(tr.ratio);

  if (d == 2) {
    const detail::ClusterSweep cl = detail::cluster_sweep(cfg, nullptr);
    C["paraboloid_T_lower_d2"] = 0.9 * detail::min_of(cl.t_lower);
    C["lambda0_lower_d2"] = 0.9 * detail::min_of(cl.lambda0_ratio);
    C["lambda0_upper_d2"] = 1.1 * detail::max_of(cl.lambda0_ratio);
    cal.evidence["cluster_min_T"] = detail::min_of(cl.t_lower);
    cal.evidence["lambda0_ratio_range"] = {detail::min_of(cl.lambda0_ratio), detail::max_of(cl.lambda0_ratio)};
  }
  return cal;
}

}  // namespace rlt
