#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rlt/experiment/config.hpp"

namespace rlt {

struct Check {
  std::string name;
  bool passed = false;
  nlohmann::json details = nlohmann::json::object();
};

// One CSV record: (item, metric, value).
struct Measurement {
  std::string item;
  std::string metric;
  double value = 0.0;
};

struct SuiteReport {
  std::string suite;
  int dim = 2;
  std::vector<Check> checks;
  std::vector<Measurement> rows;

  bool passed() const;
  const Check* find(const std::string& name) const;
  nlohmann::json to_json() const;
  // Columns: suite,dim,item,metric,value
  std::string to_csv() const;
};

const std::vector<std::string>& suite_names();

// Runs the named suite; UnknownSuite for other names, ConfigInvalid for missing constants or unsupported dimensions.
SuiteReport run_suite(const std::string& name, const ExperimentConfig& cfg);

// Writes <out_dir>/<suite>_d<dim>.json and .csv; `format` selects "json", "csv" or "both".
void write_report(const SuiteReport& r, const std::string& out_dir, const std::string& format = "both");

struct Calibration {
  std::map<std::string, double> constants;
  nlohmann::json evidence;  // the raw extremes each constant was derived from
};

// Measures the calibration sweeps of cfg.dimension (with cfg.seeds, which must differ from the acceptance seeds)
// and derives the frozen constants.
Calibration calibrate(const ExperimentConfig& cfg);

// c0 for envelope pairs: 2 I_d / 4^{d^2/(d+1)} with I_d = int_{[-1,1]^{2(d-1)}} max(0, 1 - |a.b|).
double c0_oracle(int d);

}  // namespace rlt
