#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <utility>

#include "constants.hpp"
#include "curve.hpp"
#include "special.hpp"

namespace unibike {

enum class SeedFamily { F, G, K, H, custom };

inline const char* to_string(SeedFamily f) {
  switch (f) {
    case SeedFamily::F: return "F";
    case SeedFamily::G: return "G";
    case SeedFamily::K: return "K";
    case SeedFamily::H: return "H";
    case SeedFamily::custom: return "custom";
  }
  return "custom";
}

inline SeedFamily seed_family_from_string(const std::string& s) {
  if (s == "F") return SeedFamily::F;
  if (s == "G") return SeedFamily::G;
  if (s == "K") return SeedFamily::K;
  if (s == "H") return SeedFamily::H;
  if (s == "custom") return SeedFamily::custom;
  throw DomainError("unknown seed family '" + s + "'");
}

namespace detail {
inline void require_seed_domain(double t, const char* who) {
  if (!(t >= two_pi)) {
    std::ostringstream os;
    os.precision(17);
    os << who << ": t = " << t << " is below 2pi";
    throw DomainError(os.str());
  }
}
}  // namespace detail

// Polar radii of the seed spirals. All start near (1, 0) at t = 2pi.

inline double radius_F1(double t) {
  detail::require_seed_domain(t, "radius_F1");
  return std::sqrt(t / two_pi);
}

inline double radius_G1(double t) {
  detail::require_seed_domain(t, "radius_G1");
  return std::sqrt(t / two_pi) - 1.0 / (3.0 * t);
}

inline double radius_K1(double t) {
  detail::require_seed_domain(t, "radius_K1");
  return std::sqrt(t / two_pi) - 1.0 / (3.0 * t) - pi / (3.0 * t * t);
}

/// sqrt(t/2pi) - (pi / 3t^3)(t + pi) 4F3(1, a, a, a+3/2; a+1, a+1, a+1; 1), a = t/2pi.
/// Also the hypergeometric approximation to the limiting radius.
inline double radius_H1(double t, double tol = 1e-13) {
  detail::require_seed_domain(t, "radius_H1");
  const double series = hyper_4F3_unit_value(t / two_pi, tol);
  return std::sqrt(t / two_pi) - pi / (3.0 * t * t * t) * (t + pi) * series;
}

inline Point2 eval_F1(double t) {
  detail::require_seed_domain(t, "eval_F1");
  return polar(std::sqrt(t / two_pi), t);
}

/// Five-point central difference with one Richardson step-halving.
template <class F>
double richardson_derivative(F&& f, double t, double step = 1e-4) {
  auto five_point = [&](double h) {
    return (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h);
  };
  const double coarse = five_point(step);
  const double fine = five_point(0.5 * step);
  return (16.0 * fine - coarse) / 15.0;
}

/// A spiral given in polar form, parameter = polar angle: r(t) (cos t, sin t).
class PolarSeedCurve final : public Curve {
 public:
  using RadiusFn = std::function<double(double)>;

  PolarSeedCurve(SeedFamily family, RadiusFn radius, RadiusFn radius_slope,
                 Interval domain = {two_pi, unbounded})
      : family_(family),
        radius_(std::move(radius)),
        slope_(std::move(radius_slope)),
        domain_(domain) {
    if (domain_.empty()) throw DomainError("PolarSeedCurve: empty domain");
  }

  SeedFamily family() const { return family_; }
  Interval domain() const override { return domain_; }

  double radius(double t) const { return radius_(t); }
  double radius_slope(double t) const { return slope_(t); }

  Point2 eval(double t) const override {
    require_in_domain(*this, t, "PolarSeedCurve::eval");
    return polar(radius_(t), t);
  }

  Point2 deriv(double t) const override {
    require_in_domain(*this, t, "PolarSeedCurve::deriv");
    const double r = radius_(t);
    const double dr = slope_(t);
    const double c = std::cos(t);
    const double s = std::sin(t);
    return {dr * c - r * s, dr * s + r * c};
  }

 private:
  SeedFamily family_;
  RadiusFn radius_;
  RadiusFn slope_;
  Interval domain_;
};

// The radius formulas are analytic slightly below 2pi, which the finite-difference
// derivative of H1 needs at the start of the domain.
namespace detail {
inline double radius_H1_unchecked(double t) {
  return std::sqrt(t / two_pi) -
         pi / (3.0 * t * t * t) * (t + pi) * hyper_4F3_unit_value(t / two_pi, 1e-15);
}
}  // namespace detail

inline PolarSeedCurve make_seed(SeedFamily family, Interval domain = {two_pi, unbounded}) {
  switch (family) {
    case SeedFamily::F:
      return PolarSeedCurve(
          family, radius_F1, [](double t) { return 1.0 / (2.0 * std::sqrt(two_pi * t)); },
          domain);
    case SeedFamily::G:
      return PolarSeedCurve(
          family, radius_G1,
          [](double t) { return 1.0 / (2.0 * std::sqrt(two_pi * t)) + 1.0 / (3.0 * t * t); },
          domain);
    case SeedFamily::K:
      return PolarSeedCurve(
          family, radius_K1,
          [](double t) {
            return 1.0 / (2.0 * std::sqrt(two_pi * t)) + 1.0 / (3.0 * t * t) +
                   2.0 * pi / (3.0 * t * t * t);
          },
          domain);
    case SeedFamily::H:
      // No closed-form derivative of the series; differentiate numerically.
      return PolarSeedCurve(
          family, [](double t) { return radius_H1(t, 1e-15); },
          [](double t) { return richardson_derivative(detail::radius_H1_unchecked, t); },
          domain);
    case SeedFamily::custom:
      break;
  }
  throw DomainError("make_seed: no analytic seed for family 'custom'");
}

/// 4 exp(-1/(t(1-t))) on [0, 1]; 0 at both ends, where every derivative vanishes.
inline double finn_seed(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("finn_seed: t outside [0, 1]");
  if (t == 0.0 || t == 1.0) return 0.0;
  return 4.0 * std::exp(-1.0 / (t * (1.0 - t)));
}

inline double finn_seed_slope(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("finn_seed_slope: t outside [0, 1]");
  if (t == 0.0 || t == 1.0) return 0.0;
  const double u = t * (1.0 - t);
  return finn_seed(t) * (1.0 - 2.0 * t) / (u * u);
}

/// The graph (t, finn_seed(t)) over [0, 1].
class FinnSeedCurve final : public Curve {
 public:
  Interval domain() const override { return {0.0, 1.0}; }
  Point2 eval(double t) const override { return {t, finn_seed(t)}; }
  Point2 deriv(double t) const override { return {1.0, finn_seed_slope(t)}; }
};

}  // namespace unibike
