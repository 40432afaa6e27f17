#pragma once

#include <algorithm>
#include <cstddef>
#include <span>

namespace unibike {

/// Value and first derivative of a cubic Hermite piece.
template <class V>
struct HermiteValue {
  V value;
  V slope;
};

/// Cubic Hermite interpolation on [x0, x1] from end values and end slopes. `V` is any
/// vector-space type (double, Point2) with `+` and scalar `*`.
template <class V>
HermiteValue<V> hermite_piece(double x0, double x1, const V& v0, const V& d0, const V& v1,
                              const V& d1, double x) {
  const double h = x1 - x0;
  const double s = (x - x0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  const double g00 = 6.0 * s2 - 6.0 * s;
  const double g10 = 3.0 * s2 - 4.0 * s + 1.0;
  const double g11 = 3.0 * s2 - 2.0 * s;
  V value = v0 * h00 + d0 * (h * h10) + v1 * h01 + d1 * (h * h11);
  V slope = (v0 - v1) * (g00 / h) + d0 * g10 + d1 * g11;
  return {value, slope};
}

/// Index i of the knot interval [knots[i], knots[i+1]] containing x; x must lie within
/// [knots.front(), knots.back()] and knots must hold at least two entries.
inline std::size_t locate_interval(std::span<const double> knots, double x) {
  auto it = std::upper_bound(knots.begin(), knots.end(), x);
  std::size_t i = static_cast<std::size_t>(it - knots.begin());
  if (i == 0) return 0;
  i -= 1;
  return std::min(i, knots.size() - 2);
}

}  // namespace unibike
