#include "rlt/transform/lorentz.hpp"

#include <cmath>
#include <map>

#include "rlt/core/error.hpp"
#include "rlt/transform/incidence.hpp"

namespace rlt {

namespace {

// Voxel counts of each dyadic level.
std::map<int, std::int64_t> dyadic_levels(const GridFunction& f) {
  std::map<int, std::int64_t> levels;
  for (double v : f.values())
    if (v > 0.0) ++levels[static_cast<int>(std::floor(std::log2(v)))];
  return levels;
}

}  // namespace

LorentzResult lorentz_norm(const GridFunction& f, const LorentzSpec& spec) {
  if (!(spec.p > 1.0) || !(spec.r > 0.0)) throw Error(ErrorKind::InvalidArgument, "Lorentz exponents need p > 1, r > 0");
  const double vol = f.geometry().voxel_volume();
  LorentzResult res;
  double acc = 0.0;
  for (const auto& [k, count] : dyadic_levels(f)) {
    const double measure = static_cast<double>(count) * vol;
    if (k < spec.k_min) {
      res.dropped_measure += measure;
      continue;
    }
    const double term = std::ldexp(1.0, k) * std::pow(measure, 1.0 / spec.p);
    acc = std::isinf(spec.r) ? std::max(acc, term) : acc + std::pow(term, spec.r);
  }
  res.norm = std::isinf(spec.r) ? acc : std::pow(acc, 1.0 / spec.r);
  return res;
}

TrilinearReport trilinear_check(const GridSet& E, const GridSet& Eprime, const GridSet& G, double beta_prime,
                                const QuadratureSpec& q) {
  if (E.empty() || Eprime.empty() || G.empty()) throw Error(ErrorKind::EmptySet, "trilinear_check needs nonempty sets");
  const int d = E.dim();
  TrilinearReport rep;
  const auto values = indicator_transform(Eprime, G, q, Direction::Forward);
  std::size_t worst = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] < values[worst]) worst = i;
  rep.worst_value = values[worst];
  if (rep.worst_value < beta_prime * (1.0 - 1e-12)) {
    rep.hypothesis_ok = false;
    std::size_t i = 0;
    G.for_each_voxel([&](const SpacePoint& p) {
      if (i++ == worst) rep.witness = p;
    });
  }
  rep.rhs = Eprime.measure();
  if (beta_prime > 0.0) {
    const double incidence = bilinear(G, E, q);
    rep.lhs = std::pow(incidence / E.measure(), 1.0 / (d - 1)) * std::pow(beta_prime, static_cast<double>(d) / (d - 1));
  }
  rep.ratio = rep.lhs / rep.rhs;
  return rep;
}

FlatnessReport flatness_gain(const GridFunction& f, const GridFunction& fstar, double eta, const QuadratureSpec& q) {
  if (!(eta > 0.0 && eta <= 1.0)) throw Error(ErrorKind::InvalidArgument, "eta must lie in (0, 1]");
  const int d = fstar.dim();
  const double p = (d + 1.0) / d;
  FlatnessReport rep;
  rep.norm_fstar = fstar.lp_norm(p);
  if (rep.norm_fstar == 0.0) return rep;
  const double vol = fstar.geometry().voxel_volume();
  for (const auto& [l, count] : dyadic_levels(fstar)) {
    const double level = std::ldexp(1.0, l) * std::pow(static_cast<double>(count) * vol, 1.0 / p) / rep.norm_fstar;
    rep.worst_level_ratio = std::max(rep.worst_level_ratio, level);
  }
  if (rep.worst_level_ratio > eta * (1.0 + 1e-12))
    throw Error(ErrorKind::FlatnessViolated, "level ratio " + std::to_string(rep.worst_level_ratio) + " exceeds eta " +
                                                 std::to_string(eta));
  rep.norm_f = f.lp_norm(p);
  if (rep.norm_f == 0.0) return rep;
  rep.pairing = apply_T(f, fstar.geometry(), q, false).inner(fstar);
  rep.ratio = rep.pairing / (rep.norm_f * rep.norm_fstar);
  return rep;
}

}  // namespace rlt
