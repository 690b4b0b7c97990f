#pragma once

#include <limits>

#include "rlt/core/grid_function.hpp"
#include "rlt/core/grid_set.hpp"
#include "rlt/transform/quadrature.hpp"

namespace rlt {

struct LorentzSpec {
  double p = 2.0;
  double r = std::numeric_limits<double>::infinity();
  // Levels below 2^k_min are dropped and reported.
  int k_min = -60;
};

struct LorentzResult {
  double norm = 0.0;
  double dropped_measure = 0.0;
};

// (sum_k (2^k |E_k|^{1/p})^r)^{1/r} over the dyadic levels E_k = {2^k <= f < 2^{k+1}}.
LorentzResult lorentz_norm(const GridFunction& f, const LorentzSpec& spec);

struct TrilinearReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool hypothesis_ok = true;
  double worst_value = 0.0;  // smallest T chi_{E'} found on G
  SpacePoint witness;        // where it was found (set only when the hypothesis fails)
};

// E and E' are starred-side sets, G an unstarred-side set. Checks T chi_{E'} >= beta' on G and returns
// lhs = (T(G, E) / |E|)^{1/(d-1)} beta'^{d/(d-1)}, rhs = |E'|.
TrilinearReport trilinear_check(const GridSet& E, const GridSet& Eprime, const GridSet& G, double beta_prime,
                                const QuadratureSpec& q);

struct FlatnessReport {
  double ratio = 0.0;
  double pairing = 0.0;
  double norm_f = 0.0;
  double norm_fstar = 0.0;
  double worst_level_ratio = 0.0;  // max_l 2^l |F_l|^{d/(d+1)} / ||f*||
};

// <T f, f*> / (||f||_p ||f*||_p) with p = (d+1)/d, after checking 2^l |F_l|^{d/(d+1)} <= eta ||f*||_p for every level.
FlatnessReport flatness_gain(const GridFunction& f, const GridFunction& fstar, double eta, const QuadratureSpec& q);

}  // namespace rlt
