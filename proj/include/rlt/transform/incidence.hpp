#pragma once

#include <cstdint>
#include <vector>

#include "rlt/core/grid_function.hpp"
#include "rlt/core/grid_set.hpp"
#include "rlt/transform/quadrature.hpp"

namespace rlt {

struct ScorePair {
  double incidence = 0.0;
  double alpha = 0.0;
  double alpha_star = 0.0;
  double epsilon = 0.0;
};

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// T f(x) = int f(x' - t, x_d - |t|^2) dt at every voxel center of `out`; localized keeps |t| <= 1.
GridFunction apply_T(const GridFunction& f, const GridGeometry& out, const QuadratureSpec& q, bool localized);

// Same Riemann sum evaluated at arbitrary points.
std::vector<double> evaluate_T(const GridFunction& f, const std::vector<SpacePoint>& points, const QuadratureSpec& q,
                               bool localized);

enum class Direction {
  Forward,  // T chi_source(x) = |{t : (x' - t, x_d - |t|^2) in source}|, x on the unstarred side
  Adjoint,  // T* chi_source(y) = |{t : (y' + t, y_d + |t|^2) in source}|, y on the starred side
};

// Values at the occupied voxel centers of `targets`, in GridSet::for_each_voxel order.
std::vector<double> indicator_transform(const GridSet& source, const GridSet& targets, const QuadratureSpec& q,
                                        Direction direction);

// The incidence functional: x_d is integrated exactly, x' at E column centers, t on the subdivided E* columns.
double bilinear(const GridSet& E, const GridSet& Estar, const QuadratureSpec& q);
// Same functional with the roles of the two sides swapped (t-grid on the E columns).
double bilinear_transpose(const GridSet& E, const GridSet& Estar, const QuadratureSpec& q);

McEstimate bilinear_mc(const GridSet& E, const GridSet& Estar, std::uint64_t seed, std::size_t n);

ScorePair make_score(double incidence, double measure_E, double measure_Estar, int d);
ScorePair score(const GridSet& E, const GridSet& Estar, const QuadratureSpec& q);

}  // namespace rlt
