#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rlt/transform/quadrature.hpp"

namespace rlt {

// A tagged generator record; `params` holds the sweep sizes and generator arguments of that tag.
struct GeneratorSpec {
  std::string type;
  nlohmann::json params = nlohmann::json::object();
};

struct ExperimentConfig {
  int dimension = 2;
  // Used by suites whose sets live on a fixed lattice (rwt, symmetry, lambda0); ball-derived sets carry their own
  // resolution and use one t-node per source column.
  QuadratureSpec quadrature;
  std::vector<std::uint64_t> seeds{1, 2};
  std::vector<GeneratorSpec> generators;
  std::map<std::string, double> tolerances;
  std::map<std::string, double> frozen_constants;
  // File the constants were read from (calibrate writes back to it); empty when they were inline.
  std::string constants_path;

  // Tolerance by name, falling back to the built-in default.
  double tol(const std::string& name) const;
  // Frozen constant by name; ConfigInvalid when missing.
  double constant(const std::string& name) const;
  // Generator parameter `key` of the record tagged `type`, or `fallback`.
  template <typename T>
  T param(const std::string& type, const std::string& key, T fallback) const {
    for (const GeneratorSpec& g : generators)
      if (g.type == type && g.params.contains(key)) return g.params.at(key).get<T>();
    return fallback;
  }
};

const std::map<std::string, double>& default_tolerances();

// Parses and validates; relative constant paths resolve against base_dir.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);

// Directory holding the committed configs and frozen constants.
std::string config_dir();
// The committed acceptance config for dimension d.
ExperimentConfig default_config(int d);

std::map<std::string, double> load_constants(const std::string& path);
void save_constants(const std::string& path, const std::map<std::string, double>& constants);

// Name of a per-dimension constant, e.g. dim_key("K", 3) = "K_d3".
std::string dim_key(const std::string& base, int d);

}  // namespace rlt
