#pragma once

#include <string>
#include <vector>

#include "rlt/experiment/config.hpp"
#include "rlt/experiment/suites.hpp"

namespace rlt::detail {

class ReportBuilder {
 public:
  ReportBuilder(std::string suite, int dim);
  void row(const std::string& item, const std::string& metric, double value);
  void check(const std::string& name, bool passed, nlohmann::json details = nlohmann::json::object());
  SuiteReport take() { return std::move(rep_); }

 private:
  SuiteReport rep_;
};

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);
double min_of(const std::vector<double>& v);
double max_of(const std::vector<double>& v);
std::string item_name(const std::string& prefix, std::size_t i);

// Measurement sweeps shared by the suites and by calibrate. When `out` is given, per-item rows are recorded.
std::vector<double> rwt_epsilons(const ExperimentConfig& cfg, ReportBuilder* out);

struct TowerSweep {
  std::size_t attempted = 0;
  std::vector<std::string> failures;
  std::vector<double> omega_ratio;  // |Omega_1| / alpha
  std::vector<double> fiber_ratio;  // fiber measure / alpha*
  std::vector<double> phi_ratio;
  std::size_t inclusion_checked = 0;
  std::size_t inclusion_failures = 0;
  double phi_convergence = 0.0;  // relative change of the unit-ball image measure under raster doubling
};
TowerSweep tower_sweep(const ExperimentConfig& cfg, ReportBuilder* out);

std::vector<double> slicing_ratios(const ExperimentConfig& cfg, ReportBuilder* out);

struct DetMomentSweep {
  std::vector<double> ratio;  // estimate / (delta^n lambda^n |C|)
  std::vector<double> estimate;
  std::vector<double> bound_base;  // delta^n lambda^n |C|
  std::vector<bool> hypothesis_ok;
};
DetMomentSweep detmoment_sweep(const ExperimentConfig& cfg, ReportBuilder* out);

struct TrilinearSweep {
  std::vector<double> ratio;
  std::vector<bool> hypothesis_ok;
  std::size_t adversarial = 0;
  std::size_t detected = 0;
};
TrilinearSweep trilinear_sweep(const ExperimentConfig& cfg, ReportBuilder* out);

struct ClusterSweep {
  std::vector<std::vector<double>> epsilon;  // [corpus member][N index]
  std::vector<double> lambda0_ratio;
  std::vector<double> t_lower;  // smallest T chi_{E*} over E per cluster
  std::vector<int> N;
};
ClusterSweep cluster_sweep(const ExperimentConfig& cfg, ReportBuilder* out);

// Largest net scale for which every delta of the cover sweep reaches the coverage tolerance.
double cover_scale_search(const ExperimentConfig& cfg);

SuiteReport suite_rwt(const ExperimentConfig& cfg);
SuiteReport suite_prop15(const ExperimentConfig& cfg);
SuiteReport suite_cover(const ExperimentConfig& cfg);
SuiteReport suite_symmetry(const ExperimentConfig& cfg);
SuiteReport suite_tower(const ExperimentConfig& cfg);
SuiteReport suite_slicing(const ExperimentConfig& cfg);
SuiteReport suite_convexify(const ExperimentConfig& cfg);
SuiteReport suite_detmoment(const ExperimentConfig& cfg);
SuiteReport suite_trilinear(const ExperimentConfig& cfg);
SuiteReport suite_lorentz(const ExperimentConfig& cfg);
SuiteReport suite_extract(const ExperimentConfig& cfg);
SuiteReport suite_lambda0(const ExperimentConfig& cfg);

}  // namespace rlt::detail
