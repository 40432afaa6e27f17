#pragma once

#include <limits>
#include <span>
#include <sstream>
#include <string>

#include "error.hpp"
#include "point.hpp"

namespace unibike {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr bool contains(double t) const { return t >= lo && t <= hi; }
  constexpr bool empty() const { return !(hi > lo); }
  constexpr double length() const { return hi - lo; }
};

inline std::string describe(const Interval& d) {
  std::ostringstream os;
  os.precision(17);
  os << '[' << d.lo << ", " << d.hi << ']';
  return os.str();
}

/// A smooth planar path: position and first derivative over a closed parameter interval.
///
/// Implementations are immutable once built, so a single instance may be read from many
/// threads. `breakpoints()` lists parameters where higher derivatives may jump (knots of a
/// piecewise representation); integrators avoid stepping across them.
class Curve {
 public:
  virtual ~Curve() = default;

  virtual Interval domain() const = 0;
  virtual Point2 eval(double t) const = 0;
  virtual Point2 deriv(double t) const = 0;
  virtual std::span<const double> breakpoints() const { return {}; }
};

inline void require_in_domain(const Curve& c, double t, const char* who) {
  const Interval d = c.domain();
  if (!(t >= d.lo && t <= d.hi)) {
    std::ostringstream os;
    os.precision(17);
    os << who << ": parameter " << t << " outside domain " << describe(d);
    throw DomainError(os.str());
  }
}

inline constexpr double unbounded = std::numeric_limits<double>::infinity();

}  // namespace unibike
