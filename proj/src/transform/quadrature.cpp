#include "rlt/transform/quadrature.hpp"

#include <cmath>

#include "rlt/core/error.hpp"

namespace rlt {

std::vector<int> t_subdivisions(const GridGeometry& source, const QuadratureSpec& q) {
  const int lead = source.dim - 1;
  std::vector<int> m(lead, 1);
  if (!q.t_resolution) return m;
  const double step = *q.t_resolution;
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, "t_resolution must be positive");
  for (int k = 0; k < lead; ++k) {
    if (step > source.spacing[k] * (1.0 + 1e-12))
      throw Error(ErrorKind::ResolutionTooCoarse, "t_resolution " + std::to_string(step) + " exceeds source spacing " +
                                                      std::to_string(source.spacing[k]));
    m[k] = static_cast<int>(std::ceil(source.spacing[k] / step - 1e-9));
  }
  return m;
}

}  // namespace rlt
