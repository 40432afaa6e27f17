#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "constants.hpp"
#include "curve.hpp"
#include "geometry.hpp"
#include "hermite.hpp"

namespace unibike {

enum class ScalarMode { binary64, compensated };

inline const char* to_string(ScalarMode m) {
  return m == ScalarMode::binary64 ? "binary64" : "compensated";
}

struct OdeConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  // Also bounds the cubic Hermite dense-output error, roughly h^4/384 in position and
  // h^3/125 in direction.
  double max_step = pi / 800.0;
  ScalarMode scalar_mode = ScalarMode::binary64;
  double drift_limit = 1e-9;  ///< abort when | |F - R| - 1 | exceeds this at an accepted step

  void validate() const {
    auto bad_tol = [](double v) { return !(v > 0.0 && v <= 1e-4); };
    if (bad_tol(abs_tol) || bad_tol(rel_tol)) {
      throw DomainError("OdeConfig: tolerances must lie in (0, 1e-4]");
    }
    if (!(max_step > 0.0)) throw DomainError("OdeConfig: max_step must be positive");
    if (!(drift_limit > 0.0)) throw DomainError("OdeConfig: drift_limit must be positive");
  }
};

struct OdeStats {
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
  double max_drift = 0.0;
};

/// Rear-wheel path R(t) over [t0, t_max] as C1 piecewise-cubic Hermite pieces, one per
/// accepted integrator step.
class DenseSolution final : public Curve {
 public:
  DenseSolution(std::vector<double> t, std::vector<Point2> pos, std::vector<Point2> vel,
                std::string front_ref, OdeConfig config, OdeStats stats)
      : t_(std::move(t)),
        pos_(std::move(pos)),
        vel_(std::move(vel)),
        front_ref_(std::move(front_ref)),
        config_(config),
        stats_(stats) {
    if (t_.size() < 2 || pos_.size() != t_.size() || vel_.size() != t_.size()) {
      throw DomainError("DenseSolution: inconsistent knot arrays");
    }
  }

  Interval domain() const override { return {t_.front(), t_.back()}; }
  std::span<const double> breakpoints() const override { return t_; }

  Point2 eval(double t) const override { return at(t).value; }
  Point2 deriv(double t) const override { return at(t).slope; }

  HermiteValue<Point2> at(double t) const {
    require_in_domain(*this, t, "DenseSolution");
    const std::size_t i = locate_interval(t_, t);
    if (t == t_[i]) return {pos_[i], vel_[i]};
    if (t == t_[i + 1]) return {pos_[i + 1], vel_[i + 1]};
    return hermite_piece(t_[i], t_[i + 1], pos_[i], vel_[i], pos_[i + 1], vel_[i + 1], t);
  }

  std::span<const double> knots() const { return t_; }
  std::span<const Point2> positions() const { return pos_; }
  std::span<const Point2> velocities() const { return vel_; }
  const std::string& front_ref() const { return front_ref_; }
  const OdeConfig& config() const { return config_; }
  const OdeStats& stats() const { return stats_; }

 private:
  std::vector<double> t_;
  std::vector<Point2> pos_;
  std::vector<Point2> vel_;
  std::string front_ref_;
  OdeConfig config_;
  OdeStats stats_;
};

/// R' = (F' . (F - R)) (F - R): the rear wheel moves toward the front wheel with the
/// component of the front velocity along the frame.
inline Point2 rear_velocity(const Curve& front, double t, const Point2& rear) {
  const Point2 b = front.eval(t) - rear;
  return b * dot(front.deriv(t), b);
}

namespace detail {

// Dormand-Prince 5(4) tableau.
struct DormandPrince {
  static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                          b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
};

inline double next_breakpoint(std::span<const double> bps, double t) {
  if (bps.empty()) return std::numeric_limits<double>::infinity();
  const double slack = 1e-12 * std::max(1.0, std::fabs(t));
  auto it = std::upper_bound(bps.begin(), bps.end(), t + slack);
  return it == bps.end() ? std::numeric_limits<double>::infinity() : *it;
}

}  // namespace detail

/// Integrates the rear-track equation from R(t0) = r0 to t_max with adaptive Dormand-Prince
/// 5(4) steps. Steps never straddle a breakpoint of the front curve. The unit wheelbase
/// |F - R| = 1 is an invariant of the flow; it is monitored at every accepted step and never
/// re-imposed.
inline DenseSolution rear_track(const Curve& front, double t0, const Point2& r0, double t_max,
                                const OdeConfig& cfg = {}, std::string front_ref = {}) {
  cfg.validate();
  const Interval dom = front.domain();
  if (!(t_max > t0)) throw DomainError("rear_track: t_max must exceed t0");
  if (t0 < dom.lo) throw DomainError("rear_track: t0 before start of front curve");
  if (t_max > dom.hi) {
    std::ostringstream os;
    os.precision(17);
    os << "rear_track: front-curve domain exhausted (t_max " << t_max << " > " << dom.hi << ")";
    throw DomainError(os.str());
  }
  const double gap = distance(front.eval(t0), r0);
  if (!(std::fabs(gap - 1.0) <= 1e-12)) {
    std::ostringstream os;
    os.precision(17);
    os << "rear_track: initial rear point at distance " << gap << " from the front, not 1";
    throw DomainError(os.str());
  }

  using DP = detail::DormandPrince;
  const bool compensated = cfg.scalar_mode == ScalarMode::compensated;
  auto field = [&](double t, const Point2& r) { return rear_velocity(front, t, r); };

  std::vector<double> ts{t0};
  std::vector<Point2> pos{r0};
  Point2 k1 = field(t0, r0);
  std::vector<Point2> vel{k1};
  OdeStats stats;

  double t = t0;
  Point2 y = r0;
  Point2 y_lo{};  // compensation term in compensated mode
  double h = std::min(cfg.max_step, 1e-2);
  const auto breakpoints = front.breakpoints();

  while (t < t_max) {
    const double stop = std::min(t_max, detail::next_breakpoint(breakpoints, t));
    double step = std::min(h, cfg.max_step);
    const double remaining = stop - t;
    if (remaining <= step) {
      step = remaining;
    } else if (remaining < 2.0 * step) {
      step = 0.5 * remaining;
    }
    if (!(step > 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(t)))) {
      std::ostringstream os;
      os.precision(17);
      os << "rear_track: step size underflow at t = " << t;
      throw NumericError(os.str());
    }
    const bool hits_stop = step == remaining;

    const Point2 k2 = field(t + DP::c2 * step, y + step * (DP::a21 * k1));
    const Point2 k3 = field(t + DP::c3 * step, y + step * (DP::a31 * k1 + DP::a32 * k2));
    const Point2 k4 =
        field(t + DP::c4 * step, y + step * (DP::a41 * k1 + DP::a42 * k2 + DP::a43 * k3));
    const Point2 k5 = field(t + DP::c5 * step, y + step * (DP::a51 * k1 + DP::a52 * k2 +
                                                           DP::a53 * k3 + DP::a54 * k4));
    const double t_new = hits_stop ? stop : t + step;
    const Point2 k6 = field(t_new, y + step * (DP::a61 * k1 + DP::a62 * k2 + DP::a63 * k3 +
                                               DP::a64 * k4 + DP::a65 * k5));
    const Point2 increment =
        step * (DP::b1 * k1 + DP::b3 * k3 + DP::b4 * k4 + DP::b5 * k5 + DP::b6 * k6);
    const Point2 y_new = y + increment;
    const Point2 k7 = field(t_new, y_new);
    const Point2 err = step * (DP::e1 * k1 + DP::e3 * k3 + DP::e4 * k4 + DP::e5 * k5 +
                               DP::e6 * k6 + DP::e7 * k7);
    const double sx = cfg.abs_tol + cfg.rel_tol * std::max(std::fabs(y.x), std::fabs(y_new.x));
    const double sy = cfg.abs_tol + cfg.rel_tol * std::max(std::fabs(y.y), std::fabs(y_new.y));
    const double err_norm = std::max(std::fabs(err.x) / sx, std::fabs(err.y) / sy);

    if (!std::isfinite(err_norm)) throw NumericError("rear_track: non-finite step error");
    if (err_norm > 1.0) {
      ++stats.rejected;
      h = step * std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
      continue;
    }

    ++stats.accepted;
    if (compensated) {
      // Kahan-compensated state update: carries the low-order bits of each increment.
      Point2 inc = increment + y_lo;
      const Point2 sum = y + inc;
      y_lo = (y - sum) + inc;
      y = sum;
    } else {
      y = y_new;
    }
    t = t_new;
    k1 = compensated ? field(t, y) : k7;

    const double drift = std::fabs(distance(front.eval(t), y) - 1.0);
    stats.max_drift = std::max(stats.max_drift, drift);
    if (drift > cfg.drift_limit) {
      std::ostringstream os;
      os.precision(6);
      os << "rear_track: wheelbase drift " << drift << " at t = " << t
         << " exceeds limit " << cfg.drift_limit
         << "; tighten tolerances or use compensated scalar mode";
      throw NumericError(os.str());
    }
    ts.push_back(t);
    pos.push_back(y);
    vel.push_back(k1);

    const double factor = err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
    h = step * std::clamp(factor, 0.2, 5.0);
  }
  return DenseSolution(std::move(ts), std::move(pos), std::move(vel), std::move(front_ref), cfg,
                       stats);
}

/// max over grid of | |F(t) - R(t)| - 1 |.
inline double wheelbase_drift(const DenseSolution& sol, const Curve& front,
                              std::span<const double> grid) {
  double worst = 0.0;
  for (double t : grid) {
    worst = std::max(worst, std::fabs(distance(front.eval(t), sol.eval(t)) - 1.0));
  }
  return worst;
}

/// max over grid of the distance from Phi(R)(t) to the front curve (nearest point near t).
inline double roundtrip_residual(const DenseSolution& sol, const Curve& front,
                                 std::span<const double> grid) {
  double worst = 0.0;
  for (double t : grid) {
    if (!(norm(sol.deriv(t)) > 0.0)) {
      std::ostringstream os;
      os.precision(17);
      os << "roundtrip_residual: stationary rear point at t = " << t;
      throw NumericError(os.str());
    }
    const Point2 p = front_track(sol, t);
    worst = std::max(worst, nearest_point(front, p, t, 0.5).distance);
  }
  return worst;
}

/// max over grid of |R'(t) - (F'.(F-R))(F-R)| using the dense-output derivative.
inline double residual_ode(const DenseSolution& sol, const Curve& front,
                           std::span<const double> grid) {
  double worst = 0.0;
  for (double t : grid) {
    const auto rv = sol.at(t);
    worst = std::max(worst, norm(rv.slope - rear_velocity(front, t, rv.value)));
  }
  return worst;
}

}  // namespace unibike
