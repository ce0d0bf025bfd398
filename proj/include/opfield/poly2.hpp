#pragma once

#include <cmath>

namespace opfield {

using Scalar = double;

/// Real polynomial p(z) = c0 + c1 z + c2 z^2.
struct Poly2 {
  Scalar c0 = 0;
  Scalar c1 = 0;
  Scalar c2 = 0;

  Scalar operator()(Scalar z) const { return c0 + z * (c1 + z * c2); }

  Scalar one_norm() const { return std::abs(c0) + std::abs(c1) + std::abs(c2); }

  bool has_critical_point() const { return c2 != 0; }
  Scalar critical_point() const { return -c1 / (2 * c2); }
};

/// p(z) = m^2 - (z - x)^2, the probe polynomial used by the ball tests.
inline Poly2 probe_poly(Scalar x, Scalar m) {
  return Poly2{m * m - x * x, 2 * x, -1};
}

}  // namespace opfield
