#include "rlt/experiment/config.hpp"

#include <cmath>
#include <filesystem>

#include "rlt/core/error.hpp"
#include "rlt/core/io.hpp"

namespace rlt {

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t{
      {"quadrature_rel", 0.02},      // bilinear vs Monte Carlo, on top of the 3 sigma band
      {"mc_sigma", 3.0},
      {"c0_fraction", 0.9},          // min epsilon >= c0_fraction * c0
      {"cv_max", 0.15},
      {"order_min", 0.9},            // envelope convergence order
      {"slice_rel", 1e-12},
      {"symmetry_residual", 1e-9},
      {"composite_residual", 1e-8},
      {"epsilon_invariance", 0.02},
      {"coverage_min", 0.999},
      {"slope_stability", 0.5},
      {"closed_form_rel", 0.02},
      {"transform_law_rel", 0.05},
      {"kappa3_fraction", 0.9},
      {"raster_convergence", 0.05},
      {"retention_min", 0.5},
      {"envelope_factor", 8.0},
      {"exponent_stability", 0.5},
      {"scale_equivariance", 0.1},
      {"monotone_noise", 0.05},
      {"measure_scaling", 0.3},
      {"sparse_fraction", 0.5},      // epsilon of the largest cluster <= sparse_fraction * c0
      {"lorentz_rel", 1e-12},
  };
  return t;
}

double ExperimentConfig::tol(const std::string& name) const {
  if (auto it = tolerances.find(name); it != tolerances.end()) return it->second;
  if (auto it = default_tolerances().find(name); it != default_tolerances().end()) return it->second;
  throw Error(ErrorKind::ConfigInvalid, "unknown tolerance '" + name + "'");
}

double ExperimentConfig::constant(const std::string& name) const {
  auto it = frozen_constants.find(name);
  if (it == frozen_constants.end())
    throw Error(ErrorKind::ConfigInvalid, "frozen constant '" + name + "' is missing (run calibrate)");
  return it->second;
}

std::string dim_key(const std::string& base, int d) { return base + "_d" + std::to_string(d); }

std::map<std::string, double> load_constants(const std::string& path) {
  std::map<std::string, double> out;
  if (!std::filesystem::exists(path)) return out;
  const nlohmann::json j = read_json_file(path);
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw Error(ErrorKind::ConfigInvalid, "frozen constant '" + k + "' is not a number");
    out[k] = v.get<double>();
  }
  return out;
}

void save_constants(const std::string& path, const std::map<std::string, double>& constants) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : constants) j[k] = v;
  write_json_file(path, j);
}

ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& base_dir) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::ConfigInvalid, what); };
  if (!j.is_object()) fail("config must be a JSON object");
  ExperimentConfig c;
  try {
    c.dimension = j.value("dimension", 2);
    if (c.dimension != 2 && c.dimension != 3) fail("dimension must be 2 or 3");
    if (j.contains("quadrature")) {
      const auto& q = j.at("quadrature");
      if (q.contains("t_resolution") && !q.at("t_resolution").is_null()) {
        const double t = q.at("t_resolution").get<double>();
        if (!(t > 0.0)) fail("quadrature.t_resolution must be positive");
        c.quadrature.t_resolution = t;
      }
      if (q.contains("t_bound") && q.at("t_bound").is_number()) {
        const double t = q.at("t_bound").get<double>();
        if (!(t > 0.0)) fail("quadrature.t_bound must be positive or \"auto\"");
        c.quadrature.t_bound = t;
      }
    }
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (c.seeds.empty()) fail("seeds must not be empty");
    if (j.contains("generators"))
      for (const auto& g : j.at("generators")) {
        if (!g.contains("type")) fail("every generator needs a type");
        GeneratorSpec s{g.at("type").get<std::string>(), g};
        s.params.erase("type");
        c.generators.push_back(std::move(s));
      }
    if (j.contains("tolerances"))
      for (const auto& [k, v] : j.at("tolerances").items()) {
        if (!default_tolerances().contains(k)) fail("unknown tolerance '" + k + "'");
        const double x = v.get<double>();
        if (!(x > 0.0) || !std::isfinite(x)) fail("tolerance '" + k + "' must be positive");
        c.tolerances[k] = x;
      }
    if (j.contains("frozen_constants")) {
      const auto& fc = j.at("frozen_constants");
      if (fc.is_string()) {
        std::filesystem::path p = fc.get<std::string>();
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        c.constants_path = p.lexically_normal().string();
        c.frozen_constants = load_constants(c.constants_path);
      } else {
        for (const auto& [k, v] : fc.items()) c.frozen_constants[k] = v.get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("malformed config: ") + e.what());
  }
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json q = nlohmann::json::object();
  q["t_resolution"] = c.quadrature.t_resolution ? nlohmann::json(*c.quadrature.t_resolution) : nlohmann::json(nullptr);
  q["t_bound"] = c.quadrature.t_bound ? nlohmann::json(*c.quadrature.t_bound) : nlohmann::json("auto");
  nlohmann::json gens = nlohmann::json::array();
  for (const GeneratorSpec& g : c.generators) {
    nlohmann::json r = g.params;
    r["type"] = g.type;
    gens.push_back(r);
  }
  nlohmann::json fc = nlohmann::json::object();
  for (const auto& [k, v] : c.frozen_constants) fc[k] = v;
  nlohmann::json tol = nlohmann::json::object();
  for (const auto& [k, v] : c.tolerances) tol[k] = v;
  return {{"dimension", c.dimension}, {"quadrature", q},      {"seeds", c.seeds},
          {"generators", gens},       {"tolerances", tol},    {"frozen_constants", fc}};
}

ExperimentConfig load_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = read_json_file(path);
  } catch (const std::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, "cannot read config '" + path + "': " + e.what());
  }
  return config_from_json(j, std::filesystem::path(path).parent_path().string());
}

std::string config_dir() {
#ifdef RLT_CONFIG_DIR
  return RLT_CONFIG_DIR;
#else
  return "config";
#endif
}

ExperimentConfig default_config(int d) {
  return load_config(config_dir() + "/acceptance_d" + std::to_string(d) + ".json");
}

}  // namespace rlt
