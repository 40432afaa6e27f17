#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <optional>
#include <vector>

#include "constants.hpp"
#include "curve.hpp"
#include "seeds.hpp"

namespace unibike {

/// Phi(f)(t) = f(t) + f'(t)/|f'(t)|: where the front wheel sits when the rear is at f(t).
inline Point2 front_track(const Curve& f, double t) {
  const Point2 p = f.eval(t);
  const Point2 d = f.deriv(t);
  const double speed = norm(d);
  if (!(speed > 0.0) || !std::isfinite(speed)) {
    throw NumericError("front_track: zero or non-finite derivative (curve not smooth)");
  }
  return p + d / speed;
}

enum class SearchMethod { newton, minsearch };

inline const char* to_string(SearchMethod m) {
  return m == SearchMethod::newton ? "newton" : "minsearch";
}

/// One evaluation of the unibike error: the front point, its distance to the curve, and the
/// parameter of the nearest curve point.
struct ErrorSample {
  double t = 0.0;
  Point2 front{};
  double error = 0.0;
  double s_star = 0.0;
  SearchMethod method = SearchMethod::newton;
  bool degenerate = false;  ///< distance constant along the search bracket (e.g. circles)
};

/// Polar-angle offset of the F1 front point: beta(t) in (0, pi/4) for t >= 2pi.
struct AlphaBeta {
  double alpha = 0.0;         ///< t + 2pi + beta
  double beta = 0.0;          ///< arctan form
  double beta_arccos = 0.0;   ///< law-of-cosines form
  double alpha_atan2 = 0.0;   ///< from the polar angle of the front point
};

inline AlphaBeta alpha_beta(double t) {
  if (!(t >= two_pi)) throw DomainError("alpha_beta: t must be >= 2pi");
  const double r = std::sqrt(t / two_pi);
  const double gamma = std::sqrt(1.0 + 4.0 * t * t);
  AlphaBeta out;
  out.beta = std::atan(2.0 * t / (1.0 + r * gamma));
  const double r0 = std::sqrt(1.0 + r * r + 2.0 * r / gamma);
  out.beta_arccos = std::acos(std::min(1.0, (r * gamma + 1.0) / (gamma * r0)));
  out.alpha = t + two_pi + out.beta;
  const Point2 front = polar(r, t) + polar(1.0, t) * (1.0 / gamma) + perp(polar(1.0, t)) * (2.0 * t / gamma);
  double offset = std::fmod(std::atan2(front.y, front.x) - t, two_pi);
  if (offset < 0.0) offset += two_pi;
  out.alpha_atan2 = t + two_pi + offset;
  return out;
}

/// Starting guess for the nearest-point parameter on an F1-like spiral: one loop ahead.
inline double spiral_guess(double t) { return alpha_beta(std::max(t, two_pi)).alpha; }

/// |Phi(F1)(t)| in closed form.
inline double R0_closed(double t) {
  if (!(t >= two_pi)) throw DomainError("R0_closed: t must be >= 2pi");
  const double r = std::sqrt(t / two_pi);
  const double gamma = std::sqrt(1.0 + 4.0 * t * t);
  return std::sqrt(1.0 + t / two_pi + 2.0 * r / gamma);
}

/// Distance from z to the infinite line through a and b.
inline double point_line_distance(const Point2& a, const Point2& b, const Point2& z) {
  const Point2 dir = b - a;
  const double len = norm(dir);
  if (!(len > 0.0)) throw DomainError("point_line_distance: coincident line points");
  return std::fabs(cross(dir, z - a)) / len;
}

namespace detail {

inline double clamp_to(const Interval& d, double s) { return std::clamp(s, d.lo, d.hi); }

struct NearestCandidate {
  double s;
  double dist2;
};

// g(s) = (f(s) - Q) . f'(s): negative while approaching the nearest point.
inline double perpendicularity(const Curve& f, const Point2& q, double s) {
  return dot(f.eval(s) - q, f.deriv(s));
}

// Safeguarded Newton on g within [a, b] where g(a) <= 0 <= g(b).
inline std::optional<double> refine_nearest(const Curve& f, const Point2& q, double a, double b,
                                            double ga, double gb) {
  const Interval dom = f.domain();
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  double s = 0.5 * (a + b);
  for (int iter = 0; iter < 200; ++iter) {
    const Point2 p = f.eval(s);
    const Point2 d = f.deriv(s);
    const Point2 diff = p - q;
    const double g = dot(diff, d);
    if (g == 0.0) return s;
    if (g < 0.0) a = s; else b = s;
    // g'(s) = |f'|^2 + (f - Q) . f''; f'' by a central difference of f'.
    const double h = 1e-6 * std::max(1.0, std::fabs(s));
    const double sp = std::min(s + h, dom.hi);
    const double sm = std::max(s - h, dom.lo);
    const Point2 dd = (f.deriv(sp) - f.deriv(sm)) / (sp - sm);
    const double gp = dot(d, d) + dot(diff, dd);
    double next = (gp > 0.0) ? s - g / gp : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    const double step = std::fabs(next - s);
    s = next;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(s)) ||
        (b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(s))) {
      return s;
    }
  }
  return std::nullopt;
}

inline Interval search_bracket(const Curve& f, double s_guess, double half_width) {
  const Interval dom = f.domain();
  Interval br{std::max(dom.lo, s_guess - half_width), std::min(dom.hi, s_guess + half_width)};
  if (br.empty()) throw DomainError("unibike_error: search bracket outside curve domain");
  return br;
}

}  // namespace detail

/// Result of a nearest-point search on a curve.
struct NearestPoint {
  double s = 0.0;
  double distance = 0.0;
  SearchMethod method = SearchMethod::newton;
  bool degenerate = false;  ///< distance constant along the search bracket (e.g. circles)
};

/// Nearest point of f to q by golden-section minimisation over `bracket`.
/// The bracket is pre-scanned so the global minimum inside it is found; a minimum on the
/// bracket boundary is an error unless the distance is constant (flagged as degenerate).
inline NearestPoint nearest_point_minsearch(const Curve& f, const Point2& q, Interval bracket,
                                            double s_tol = 1e-10) {
  if (bracket.empty()) throw DomainError("nearest_point_minsearch: empty bracket");
  const Interval dom = f.domain();
  if (bracket.lo < dom.lo || bracket.hi > dom.hi) {
    throw DomainError("nearest_point_minsearch: bracket outside curve domain");
  }
  NearestPoint out;
  out.method = SearchMethod::minsearch;
  auto dist2 = [&](double s) {
    const Point2 d = f.eval(s) - q;
    return dot(d, d);
  };

  constexpr int kScan = 64;
  const double h = bracket.length() / kScan;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  double worst_val = 0.0;
  for (int i = 0; i <= kScan; ++i) {
    const double v = dist2(bracket.lo + i * h);
    if (v < best_val) { best_val = v; best = i; }
    worst_val = std::max(worst_val, v);
  }
  const double scale = dot(q, q) + 1.0;
  if (worst_val - best_val <= 1e-13 * scale) {
    out.degenerate = true;
    out.s = bracket.lo;
    out.distance = std::sqrt(best_val);
    return out;
  }
  if (best == 0 || best == kScan) {
    throw NumericError("nearest_point_minsearch: minimum on bracket boundary (bracket failure)");
  }
  double a = bracket.lo + (best - 1) * h;
  double b = bracket.lo + (best + 1) * h;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = dist2(c);
  double fd = dist2(d);
  while (b - a > s_tol) {
    if (fc <= fd) {
      b = d; d = c; fd = fc;
      c = b - inv_phi * (b - a);
      fc = dist2(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + inv_phi * (b - a);
      fd = dist2(d);
    }
  }
  out.s = fc <= fd ? c : d;
  out.distance = std::sqrt(std::min(fc, fd));
  return out;
}

/// Nearest point of f to q within s_guess +- half_width.
///
/// The nearest point solves (f(s) - q) . f'(s) = 0. The bracket is scanned for sign changes
/// from - to + (distance minima), each is refined by safeguarded Newton, and the closest
/// wins; exact ties go to the smaller s. Falls back to golden-section search when no root
/// is found.
inline NearestPoint nearest_point(const Curve& f, const Point2& q, double s_guess,
                                  double half_width = pi) {
  const Interval br = detail::search_bracket(f, s_guess, half_width);

  constexpr int kScan = 32;
  const double h = br.length() / kScan;
  std::vector<double> g(kScan + 1);
  double gmax = 0.0;
  for (int i = 0; i <= kScan; ++i) {
    g[i] = detail::perpendicularity(f, q, br.lo + i * h);
    gmax = std::max(gmax, std::fabs(g[i]));
  }
  const double scale = (norm(q) + 1.0) * norm(f.deriv(detail::clamp_to(f.domain(), s_guess)));
  if (gmax <= 1e-12 * scale) return nearest_point_minsearch(f, q, br);

  std::optional<detail::NearestCandidate> best;
  for (int i = 0; i < kScan; ++i) {
    if (!(g[i] <= 0.0 && g[i + 1] > 0.0)) continue;
    const auto s = detail::refine_nearest(f, q, br.lo + i * h, br.lo + (i + 1) * h, g[i], g[i + 1]);
    if (!s) continue;
    const Point2 diff = f.eval(*s) - q;
    const double d2 = dot(diff, diff);
    if (!best || d2 < best->dist2) best = detail::NearestCandidate{*s, d2};
  }
  if (!best) return nearest_point_minsearch(f, q, br);
  return {best->s, std::sqrt(best->dist2), SearchMethod::newton, false};
}

inline ErrorSample to_error_sample(double t, const Point2& front, const NearestPoint& np) {
  ErrorSample out;
  out.t = t;
  out.front = front;
  out.error = np.distance;
  out.s_star = np.s;
  out.method = np.method;
  out.degenerate = np.degenerate;
  return out;
}

/// E(f)(t) by golden-section search for the nearest point over `bracket`.
inline ErrorSample unibike_error_minsearch(const Curve& f, double t, Interval bracket) {
  const Point2 q = front_track(f, t);
  return to_error_sample(t, q, nearest_point_minsearch(f, q, bracket));
}

/// Unibike error E(f)(t): distance from the front point Phi(f)(t) to the nearest point of
/// f, searched within s_guess +- pi.
inline ErrorSample unibike_error(const Curve& f, double t, double s_guess) {
  const Point2 q = front_track(f, t);
  return to_error_sample(t, q, nearest_point(f, q, s_guess, pi));
}

// ---------------------------------------------------------------------------------------
// Polar square root bounds. Computations run in a frame rotated by -t so that only the
// small offset angle beta enters the trigonometry; this keeps the t^-4 differences
// between the bounds resolvable in binary64.

/// lambda(t) = (pi/3)t^-2 + pi^(1/2)/(2 sqrt2) t^-5/2 - (11/15)pi^2 t^-3 - 11 pi^(3/2)/(6 sqrt2) t^-7/2
inline double lambda_series(double t) {
  const double s2 = std::sqrt(2.0);
  return pi / 3.0 * std::pow(t, -2.0) + std::sqrt(pi) / (2.0 * s2) * std::pow(t, -2.5) -
         11.0 / 15.0 * pi * pi * std::pow(t, -3.0) -
         11.0 / (6.0 * s2) * std::pow(pi, 1.5) * std::pow(t, -3.5);
}

/// t^-4 coefficients of the upper and lower bound expansions (about 43.66 and 43.53).
inline constexpr double upper_t4_coefficient = (103.0 / 70.0 * pi * pi - 5.0 / 8.0) * pi;
inline constexpr double lower_t4_coefficient = (103.0 / 70.0 * pi * pi - 2.0 / 3.0) * pi;

/// Asymptotic form of the lower bound through the t^-4 term.
inline double lower_bound_series(double t) {
  return lambda_series(t) + lower_t4_coefficient * std::pow(t, -4.0);
}

struct Theorem1Bounds {
  double t = 0.0;
  double upper = 0.0;
  double lower = 0.0;
  double lambda = 0.0;
};

inline Theorem1Bounds theorem1_bounds(double t, bool allow_small_t = false) {
  if (!(t >= (allow_small_t ? two_pi : 2.0 * two_pi))) {
    throw DomainError("theorem1_bounds: t below 4pi (asymptotic bounds); pass allow_small_t");
  }
  const AlphaBeta ab = alpha_beta(t);
  const double r = std::sqrt(t / two_pi);
  const double gamma = std::sqrt(1.0 + 4.0 * t * t);
  const Point2 front{r + 1.0 / gamma, 2.0 * t / gamma};
  const double ra = std::sqrt(ab.alpha / two_pi);
  const double ra_slope = ra / (2.0 * ab.alpha);
  const Point2 q = polar(ra, ab.beta);
  const Point2 dir = polar(ra_slope, ab.beta) + perp(polar(ra, ab.beta));

  Theorem1Bounds out;
  out.t = t;
  out.upper = R0_closed(t) - ra;
  out.lower = point_line_distance(q, q + dir, front);
  out.lambda = lambda_series(t);
  return out;
}

/// Crude loop-spacing bound sqrt(pi/8) t^-1/2 on E1.
inline double crude_bound(double t) { return std::sqrt(pi / 8.0) / std::sqrt(t); }

inline ErrorSample error_F1(double t) {
  static const PolarSeedCurve f1 = make_seed(SeedFamily::F);
  return unibike_error(f1, t, spiral_guess(t));
}

inline bool crude_bound_check(double t) {
  if (!(t >= two_pi)) throw DomainError("crude_bound_check: t must be >= 2pi");
  return error_F1(t).error <= crude_bound(t);
}

struct Fig10Residual {
  double t = 0.0;
  double residual = 0.0;        ///< E1(t) - asymptotic lower bound (through t^-4)
  double model = 0.0;           ///< 65 t^-9/2
  double ratio = 0.0;           ///< residual / model
  double exact_residual = 0.0;  ///< E1(t) - point-to-tangent-line lower bound
};

inline Fig10Residual fig10_residual(double t) {
  if (!(t >= 2.0 * two_pi)) throw DomainError("fig10_residual: t must be >= 4pi");
  const double e1 = error_F1(t).error;
  Fig10Residual out;
  out.t = t;
  out.residual = e1 - lower_bound_series(t);
  out.model = 65.0 * std::pow(t, -4.5);
  out.ratio = out.residual / out.model;
  out.exact_residual = e1 - theorem1_bounds(t).lower;
  return out;
}

/// t times the signed side of F1(t + 4pi) relative to the segment from Q = F1(alpha(t)) to
/// Q - F1'(alpha(t)); negative means right of it. Tends to -pi.
inline double tangent_side_check(double t) {
  if (!(t >= two_pi)) throw DomainError("tangent_side_check: t must be >= 2pi");
  const AlphaBeta ab = alpha_beta(t);
  const double ra = std::sqrt(ab.alpha / two_pi);
  const Point2 q = polar(ra, ab.beta);
  const Point2 dir = polar(ra / (2.0 * ab.alpha), ab.beta) + perp(polar(ra, ab.beta));
  const Point2 b = q - dir;
  const Point2 c{std::sqrt((t + 2.0 * two_pi) / two_pi), 0.0};
  return t * cross(q - c, b - c);
}

/// delta t^5, with delta the squared distance from Phi(G1)(t) to G1(alpha(t) + (2/3)pi t^-2).
/// Both points sit near radius sqrt(t/2pi) while their distance is O(t^-5/2), so the
/// evaluation runs in extended precision.
inline double theorem2_check(double t) {
  if (!(t >= two_pi)) throw DomainError("theorem2_check: t must be >= 2pi");
  using ld = long double;
  const ld pl = std::numbers::pi_v<long double>;
  const ld tl = t;
  const auto radius = [&](ld s) { return std::sqrt(s / (2 * pl)) - 1 / (3 * s); };
  const ld r = radius(tl);
  const ld dr = 1 / (2 * std::sqrt(2 * pl * tl)) + 1 / (3 * tl * tl);
  const ld speed = std::sqrt(dr * dr + r * r);
  const ld gamma = std::sqrt(1 + 4 * tl * tl);
  const ld beta = std::atan(2 * tl / (1 + std::sqrt(tl / (2 * pl)) * gamma));
  const ld offset = beta + (2 * pl / 3) / (tl * tl);
  const ld rt = radius(tl + 2 * pl + offset);
  const ld dx = r + dr / speed - rt * std::cos(offset);
  const ld dy = r / speed - rt * std::sin(offset);
  return static_cast<double>((dx * dx + dy * dy) * std::pow(tl, 5));
}

/// lim delta t^5 = (pi/72)(9 + 64 pi^2).
inline constexpr double theorem2_limit = pi / 72.0 * (9.0 + 64.0 * pi * pi);

}  // namespace unibike
