#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "constants.hpp"
#include "curve.hpp"
#include "geometry.hpp"
#include "hermite.hpp"
#include "polar_track.hpp"
#include "rear_ode.hpp"
#include "seeds.hpp"

namespace unibike {

// ---------------------------------------------------------------------------------------
// Start of the next rear track

/// First t > 4pi where the front is at unit distance from (1, 0): the front position when
/// the next rear track sits at its anchor (1, 0). Sign scan at pi/16, then bisection.
inline double find_t0(const Curve& front) {
  const Interval dom = front.domain();
  const double lo = 2.0 * two_pi;
  const double hi = std::min(3.0 * two_pi, dom.hi);
  if (dom.lo > lo || dom.hi < 2.5 * two_pi) {
    throw DomainError("find_t0: front must be defined on [4pi, 5pi]");
  }
  auto gap = [&](double t) {
    const Point2 d = front.eval(t) - Point2{1.0, 0.0};
    return dot(d, d) - 1.0;
  };
  const double step = pi / 16.0;
  double a = lo;
  double ga = gap(a);
  for (double b = lo + step; a < hi; b += step) {
    b = std::min(b, hi);
    const double gb = gap(b);
    if ((ga <= 0.0) != (gb <= 0.0)) {
      double left = a;
      double right = b;
      const bool left_negative = ga <= 0.0;
      while (right - left > 1e-12) {
        const double mid = 0.5 * (left + right);
        if ((gap(mid) <= 0.0) == left_negative) left = mid; else right = mid;
      }
      return 0.5 * (left + right);
    }
    a = b;
    ga = gb;
  }
  throw NumericError("find_t0: no unit-distance crossing in (4pi, 6pi); front is not spiral-shaped");
}

// ---------------------------------------------------------------------------------------
// Reparametrization by polar angle

namespace detail {
inline double wrap_angle(double a) {
  a = std::remainder(a, two_pi);
  return a;
}
}  // namespace detail

struct ReparamOptions {
  const Curve* front = nullptr;  ///< when set, R' comes from the ODE field instead of the dense derivative
  double start_angle = two_pi;   ///< unwrapped angle assigned to the first point (nearest branch)
  double theta_max = std::numeric_limits<double>::infinity();
};

/// Re-indexes a rear path by its unwrapped polar angle and samples it at uniform angle
/// spacing. The angle is unwrapped across accepted steps (each increment must stay below
/// pi/2) and must increase strictly; t(theta) is found by safeguarded Newton inside the
/// containing step. Radii slopes come from the chain rule dr/dtheta = r (R.R') / (R x R').
inline PolarTrack reparametrize_polar(const DenseSolution& sol, double spacing,
                                      TrackManifest manifest, const ReparamOptions& opts = {}) {
  if (!(spacing > 0.0)) throw DomainError("reparametrize_polar: spacing must be positive");
  const auto ts = sol.knots();
  const auto ps = sol.positions();
  const std::size_t m = ts.size();

  std::vector<double> theta_k(m);
  std::vector<double> raw_k(m);
  for (std::size_t k = 0; k < m; ++k) {
    if (!(norm(ps[k]) > 0.0)) throw NumericError("reparametrize_polar: path passes through the origin");
    raw_k[k] = std::atan2(ps[k].y, ps[k].x);
  }
  theta_k[0] = raw_k[0] + two_pi * std::round((opts.start_angle - raw_k[0]) / two_pi);
  for (std::size_t k = 1; k < m; ++k) {
    const double delta = detail::wrap_angle(raw_k[k] - raw_k[k - 1]);
    if (std::fabs(delta) >= 0.5 * pi) {
      throw NumericError("reparametrize_polar: integrator step too coarse to unwrap the angle");
    }
    theta_k[k] = theta_k[k - 1] + delta;
    if (!(theta_k[k] > theta_k[k - 1])) {
      std::ostringstream os;
      os.precision(17);
      os << "reparametrize_polar: polar angle not increasing at t = " << ts[k];
      throw NumericError(os.str());
    }
  }

  auto velocity_at = [&](double t, const Point2& r) {
    return opts.front ? rear_velocity(*opts.front, t, r) : sol.deriv(t);
  };

  const double theta_end = std::min(theta_k.back(), opts.theta_max);
  std::vector<double> out_theta;
  std::vector<double> out_r;
  std::vector<double> out_slope;
  std::size_t k = 0;
  for (std::size_t j = 0;; ++j) {
    const double target = theta_k[0] + static_cast<double>(j) * spacing;
    if (target > theta_end) break;
    while (k + 2 < m && theta_k[k + 1] < target) ++k;

    double t;
    if (target == theta_k[k]) {
      t = ts[k];
    } else if (target == theta_k[k + 1]) {
      t = ts[k + 1];
    } else {
      double a = ts[k];
      double b = ts[k + 1];
      auto angle_at = [&](const Point2& p) {
        return theta_k[k] + detail::wrap_angle(std::atan2(p.y, p.x) - raw_k[k]);
      };
      t = a + (b - a) * (target - theta_k[k]) / (theta_k[k + 1] - theta_k[k]);
      for (int iter = 0; iter < 100; ++iter) {
        const auto rv = sol.at(t);
        const double f = angle_at(rv.value) - target;
        if (f == 0.0) break;
        if (f < 0.0) a = t; else b = t;
        const double rate = cross(rv.value, rv.slope) / dot(rv.value, rv.value);
        double next = rate > 0.0 ? t - f / rate : 0.5 * (a + b);
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        const double moved = std::fabs(next - t);
        t = next;
        if (moved <= 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(t) || b - a <= 0.0) break;
      }
    }
    const Point2 r = sol.eval(t);
    const Point2 v = velocity_at(t, r);
    const double turn = cross(r, v);
    if (!(turn > 0.0)) {
      std::ostringstream os;
      os.precision(17);
      os << "reparametrize_polar: polar angle not increasing at t = " << t;
      throw NumericError(os.str());
    }
    const double radius = norm(r);
    out_theta.push_back(target);
    out_r.push_back(radius);
    out_slope.push_back(radius * dot(r, v) / turn);
  }
  if (out_theta.size() < 2) throw NumericError("reparametrize_polar: solution spans less than one knot");
  manifest.ode_abs_tol = sol.config().abs_tol;
  manifest.ode_rel_tol = sol.config().rel_tol;
  if (manifest.parent_hash.empty()) manifest.parent_hash = sol.front_ref();
  return PolarTrack(std::move(out_theta), std::move(out_r), std::move(out_slope), std::move(manifest));
}

// ---------------------------------------------------------------------------------------
// Error profiles

struct ErrorProfile {
  std::vector<ErrorSample> samples;
  std::string track_ref;

  double max_error() const {
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, s.error);
    return m;
  }

  /// Error at a grid parameter (matched to 1e-9), if present.
  std::optional<double> at(double t) const {
    auto it = std::lower_bound(samples.begin(), samples.end(), t - 1e-9,
                               [](const ErrorSample& s, double v) { return s.t < v; });
    if (it != samples.end() && std::fabs(it->t - t) <= 1e-9) return it->error;
    return std::nullopt;
  }
};

/// Unibike error along an ascending grid; each nearest-point search is warm-started from
/// the previous s* shifted by the grid step.
inline ErrorProfile error_profile(const Curve& track, std::span<const double> t_grid,
                                  std::string track_ref = {}) {
  ErrorProfile out;
  out.track_ref = std::move(track_ref);
  out.samples.reserve(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    if (i > 0 && !(t > t_grid[i - 1])) throw DomainError("error_profile: grid not ascending");
    const double guess = i == 0 ? spiral_guess(t) : out.samples.back().s_star + (t - t_grid[i - 1]);
    out.samples.push_back(unibike_error(track, t, guess));
  }
  return out;
}

inline std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw DomainError("uniform_grid: bad range");
  std::vector<double> g;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) g.push_back(lo + static_cast<double>(i) * step);
  return g;
}

// ---------------------------------------------------------------------------------------
// Iteration F_n -> F_{n+1}

struct IterationConfig {
  OdeConfig ode{};
  double knot_spacing = pi / 200.0;
  double domain_reserve = two_pi + 0.5 * pi;  ///< domain lost per iteration
  double profile_spacing = pi / 8.0;
  double profile_max = std::numeric_limits<double>::infinity();
  double profile_margin = 3.5 * pi;  ///< profile stops this far before the track end
};

struct IterationRun {
  SeedFamily seed_family = SeedFamily::F;
  std::vector<PolarTrack> tracks;      ///< tracks[i] is F_{i+1}
  std::vector<ErrorProfile> profiles;  ///< profiles[i] belongs to tracks[i]
  std::vector<double> t0_values;       ///< t0 used to build tracks[i]; NaN for the seed
  std::vector<OdeStats> ode_stats;     ///< zeroed for the seed
  IterationConfig config{};

  const PolarTrack& track(int n) const { return tracks.at(static_cast<std::size_t>(n - 1)); }
  const ErrorProfile& profile(int n) const { return profiles.at(static_cast<std::size_t>(n - 1)); }
  int size() const { return static_cast<int>(tracks.size()); }
};

using IterationCallback = std::function<void(const IterationRun&)>;

namespace detail {

inline double snap_to_grid(double value, double origin, double spacing) {
  return origin + std::floor((value - origin) / spacing + 1e-9) * spacing;
}

inline std::vector<double> profile_grid(const Interval& dom, const IterationConfig& cfg) {
  const double hi = std::min(cfg.profile_max, dom.hi - cfg.profile_margin);
  if (hi < dom.lo) return {};
  return uniform_grid(dom.lo, hi, cfg.profile_spacing);
}

inline IterationRun iterate_from(const Curve& first_front, PolarTrack first_track, int count,
                                 const IterationConfig& cfg, const IterationCallback& on_step) {
  if (count < 1) throw DomainError("iterate: N must be >= 1");
  cfg.ode.validate();
  const Interval first_dom = first_track.domain();
  const double final_hi = first_dom.hi - (count - 1) * cfg.domain_reserve;
  if (final_hi < two_pi + cfg.profile_margin + pi) {
    std::ostringstream os;
    os << "iterate: domain_max too small for N = " << count << " (final track would end at "
       << final_hi / pi << "pi)";
    throw DomainError(os.str());
  }

  IterationRun run;
  run.seed_family = first_track.manifest().seed_family;
  run.config = cfg;
  run.profiles.push_back(error_profile(first_front, profile_grid(first_dom, cfg), content_hash(first_track)));
  run.tracks.push_back(std::move(first_track));
  run.t0_values.push_back(std::numeric_limits<double>::quiet_NaN());
  run.ode_stats.push_back({});
  if (on_step) on_step(run);

  for (int n = 2; n <= count; ++n) {
    const PolarTrack& prev = run.tracks.back();
    const Curve& front = n == 2 ? first_front : static_cast<const Curve&>(prev);
    const std::string parent = content_hash(prev);
    try {
      const double t0 = find_t0(front);
      const double t_end = std::min(front.domain().hi, prev.domain().hi);
      const DenseSolution sol = rear_track(front, t0, Point2{1.0, 0.0}, t_end, cfg.ode, parent);
      const double theta_max =
          snap_to_grid(prev.domain().hi - cfg.domain_reserve, two_pi, cfg.knot_spacing);
      TrackManifest m;
      m.n = n;
      m.seed_family = run.seed_family;
      m.parent_hash = parent;
      ReparamOptions opts;
      opts.front = &front;
      opts.theta_max = theta_max;
      PolarTrack next = reparametrize_polar(sol, cfg.knot_spacing, std::move(m), opts);
      if (next.domain().hi < theta_max - 0.5 * cfg.knot_spacing) {
        throw NumericError("rear track covers too little angle (domain exhaustion)");
      }
      run.profiles.push_back(error_profile(next, profile_grid(next.domain(), cfg), content_hash(next)));
      run.tracks.push_back(std::move(next));
      run.t0_values.push_back(t0);
      run.ode_stats.push_back(sol.stats());
    } catch (const Error& e) {
      throw Error(e.category(),
                  "iterate: failed building track n = " + std::to_string(n) + ": " + e.what());
    }
    if (on_step) on_step(run);
  }
  return run;
}

}  // namespace detail

/// Chains find_t0 -> rear_track -> reparametrize_polar from an analytic polar seed until
/// F_N exists. The seed itself (not its sampled copy) is the front for the first solve.
inline IterationRun iterate(const PolarSeedCurve& seed, int count, double domain_max,
                            const IterationConfig& cfg = {}, const IterationCallback& on_step = {}) {
  const double hi = detail::snap_to_grid(domain_max, two_pi, cfg.knot_spacing);
  PolarTrack first = sample_seed(seed, hi, cfg.knot_spacing);
  return detail::iterate_from(seed, std::move(first), count, cfg, on_step);
}

/// Continues a chain from an existing track (e.g. one read from disk), which becomes F_1 of
/// the run (its manifest index is kept in the produced tracks' provenance only).
inline IterationRun iterate(const PolarTrack& start, int count, const IterationConfig& cfg = {},
                            const IterationCallback& on_step = {}) {
  return detail::iterate_from(start, start, count, cfg, on_step);
}

// ---------------------------------------------------------------------------------------
// Convergence diagnostics

struct CauchyDiff {
  double diff = 0.0;       ///< R_{n-1}(t + 2pi) - R_n(t + 2pi)
  double relation1 = 0.0;  ///< diff - E_n(t)
};

inline CauchyDiff cauchy_diff(const IterationRun& run, int n, double t) {
  if (n < 2 || n > run.size()) throw DomainError("cauchy_diff: n out of range");
  const PolarTrack& prev = run.track(n - 1);
  const PolarTrack& cur = run.track(n);
  const double at = t + two_pi;
  CauchyDiff out;
  out.diff = prev.radius_at(at).value - cur.radius_at(at).value;
  out.relation1 = out.diff - unibike_error(cur, t, spiral_guess(t)).error;
  return out;
}

struct RatioFit {
  double a = 0.0;
  double b = 0.0;
  double rms = 0.0;
  std::size_t samples = 0;
};

/// Least-squares fit of y(t) = 1 + a/(t + b) (Levenberg-Marquardt, started from the
/// linearised fit 1/(y-1) = t/a + b/a).
inline RatioFit fit_ratio_curve(std::span<const double> t, std::span<const double> y) {
  const std::size_t m = t.size();
  if (m < 3 || y.size() != m) throw DomainError("fit_ratio_model: insufficient samples");
  // Linearised start.
  double a = pi;
  double b = two_pi;
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!(y[i] > 1.0)) continue;
      const double z = 1.0 / (y[i] - 1.0);
      sx += t[i]; sy += z; sxx += t[i] * t[i]; sxy += t[i] * z;
      ++used;
    }
    const double det = used * sxx - sx * sx;
    if (used >= 2 && det != 0.0) {
      const double slope = (used * sxy - sx * sy) / det;
      const double icpt = (sy - slope * sx) / used;
      if (slope > 0.0) { a = 1.0 / slope; b = icpt * a; }
    }
  }
  auto sse = [&](double aa, double bb) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = 1.0 + aa / (t[i] + bb) - y[i];
      s += r * r;
    }
    return s;
  };
  double lambda = 1e-3;
  double current = sse(a, b);
  for (int iter = 0; iter < 200; ++iter) {
    double jaa = 0, jab = 0, jbb = 0, ga = 0, gb = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = t[i] + b;
      const double r = 1.0 + a / d - y[i];
      const double da = 1.0 / d;
      const double db = -a / (d * d);
      jaa += da * da; jab += da * db; jbb += db * db;
      ga += da * r; gb += db * r;
    }
    bool improved = false;
    for (int tries = 0; tries < 30 && !improved; ++tries) {
      const double maa = jaa * (1.0 + lambda);
      const double mbb = jbb * (1.0 + lambda);
      const double det = maa * mbb - jab * jab;
      if (det == 0.0) { lambda *= 10.0; continue; }
      const double step_a = -(mbb * ga - jab * gb) / det;
      const double step_b = -(maa * gb - jab * ga) / det;
      const double trial = sse(a + step_a, b + step_b);
      if (trial < current) {
        a += step_a; b += step_b;
        const double rel = (current - trial) / std::max(current, 1e-300);
        current = trial;
        lambda = std::max(lambda / 10.0, 1e-12);
        improved = true;
        if (rel < 1e-15) iter = 1000;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) break;
  }
  return {a, b, std::sqrt(current / static_cast<double>(m)), m};
}

/// Fits E_n(t) / E_{n-1}(t + 2pi) over the profile grid points inside `window`.
inline RatioFit fit_ratio_model(const IterationRun& run, int n, Interval window = {two_pi, 40.0 * pi}) {
  if (n < 2 || n > run.size()) throw DomainError("fit_ratio_model: n out of range");
  const ErrorProfile& cur = run.profile(n);
  const ErrorProfile& prev = run.profile(n - 1);
  std::vector<double> ts;
  std::vector<double> ys;
  for (const auto& s : cur.samples) {
    if (!window.contains(s.t)) continue;
    const auto before = prev.at(s.t + two_pi);
    if (!before || !(*before > 0.0)) continue;
    ts.push_back(s.t);
    ys.push_back(s.error / *before);
  }
  return fit_ratio_curve(ts, ys);
}

// ---------------------------------------------------------------------------------------
// Track combination

/// Radius-wise weighted combination (sigma r_B - r_A) / (sigma - 1) on A's knots over the
/// common domain; B is resampled when its knots differ.
inline PolarTrack combine(const PolarTrack& a, const PolarTrack& b, double sigma) {
  if (sigma == 1.0 || !std::isfinite(sigma)) throw DomainError("combine: sigma must be finite and != 1");
  const Interval da = a.domain();
  const Interval db = b.domain();
  const Interval common{std::max(da.lo, db.lo), std::min(da.hi, db.hi)};
  if (common.empty()) throw DomainError("combine: tracks do not overlap");
  std::vector<double> theta;
  std::vector<double> r;
  std::vector<double> dr;
  const auto ta = a.theta();
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i] < common.lo || ta[i] > common.hi) continue;
    const double ra = a.radii()[i];
    const double sa = a.slopes()[i];
    const auto vb = b.radius_at(ta[i]);
    theta.push_back(ta[i]);
    r.push_back((sigma * vb.value - ra) / (sigma - 1.0));
    dr.push_back((sigma * vb.slope - sa) / (sigma - 1.0));
  }
  TrackManifest m;
  m.n = b.manifest().n;
  m.seed_family = b.manifest().seed_family;
  m.ode_abs_tol = b.manifest().ode_abs_tol;
  m.ode_rel_tol = b.manifest().ode_rel_tol;
  m.parent_hash = content_hash(a) + "+" + content_hash(b);
  return PolarTrack(std::move(theta), std::move(r), std::move(dr), std::move(m));
}

struct SigmaScan {
  double sigma = 0.0;
  double max_error = 0.0;
};

/// Golden-section search over sigma in [lo, hi] minimising the maximum unibike error of the
/// combined track on t_grid.
inline SigmaScan scan_sigma(const PolarTrack& a, const PolarTrack& b, double lo, double hi,
                            std::span<const double> t_grid, double sigma_tol = 1e-3) {
  if (!(hi > lo) || (lo <= 1.0 && hi >= 1.0)) throw DomainError("scan_sigma: bracket must exclude 1");
  auto objective = [&](double s) { return error_profile(combine(a, b, s), t_grid).max_error(); };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > sigma_tol) {
    if (f1 <= f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    }
  }
  return f1 <= f2 ? SigmaScan{x1, f1} : SigmaScan{x2, f2};
}

// ---------------------------------------------------------------------------------------
// Forward iteration of a flat-ended seed

/// Cartesian path through sampled points with cubic Hermite interpolation.
class HermitePath final : public Curve {
 public:
  HermitePath(std::vector<double> t, std::vector<Point2> pos, std::vector<Point2> vel)
      : t_(std::move(t)), pos_(std::move(pos)), vel_(std::move(vel)) {
    if (t_.size() < 2 || pos_.size() != t_.size() || vel_.size() != t_.size()) {
      throw DomainError("HermitePath: inconsistent knot arrays");
    }
  }
  Interval domain() const override { return {t_.front(), t_.back()}; }
  std::span<const double> breakpoints() const override { return t_; }
  Point2 eval(double t) const override { return at(t).value; }
  Point2 deriv(double t) const override { return at(t).slope; }
  HermiteValue<Point2> at(double t) const {
    require_in_domain(*this, t, "HermitePath");
    const std::size_t i = locate_interval(t_, t);
    if (t == t_[i]) return {pos_[i], vel_[i]};
    if (t == t_[i + 1]) return {pos_[i + 1], vel_[i + 1]};
    return hermite_piece(t_[i], t_[i + 1], pos_[i], vel_[i], pos_[i + 1], vel_[i + 1], t);
  }

 private:
  std::vector<double> t_;
  std::vector<Point2> pos_;
  std::vector<Point2> vel_;
};

/// Stage j of the forward iteration occupies [j, j+1]; stage 0 is the seed.
class StagedPath final : public Curve {
 public:
  explicit StagedPath(std::vector<HermitePath> stages) : stages_(std::move(stages)) {
    if (stages_.empty()) throw DomainError("StagedPath: no stages");
    for (std::size_t j = 0; j <= stages_.size(); ++j) joints_.push_back(static_cast<double>(j));
  }
  Interval domain() const override { return {0.0, static_cast<double>(stages_.size())}; }
  std::span<const double> breakpoints() const override { return joints_; }
  Point2 eval(double t) const override {
    const auto [j, u] = split(t);
    return stages_[j].eval(u);
  }
  Point2 deriv(double t) const override {
    const auto [j, u] = split(t);
    return stages_[j].deriv(u);
  }
  const HermitePath& stage(std::size_t j) const { return stages_.at(j); }
  std::size_t stage_count() const { return stages_.size(); }

 private:
  std::pair<std::size_t, double> split(double t) const {
    require_in_domain(*this, t, "StagedPath");
    std::size_t j = std::min(static_cast<std::size_t>(std::floor(t)), stages_.size() - 1);
    return {j, t - static_cast<double>(j)};
  }
  std::vector<HermitePath> stages_;
  std::vector<double> joints_;
};

namespace detail {
// Fourth-order finite-difference derivative of uniformly sampled points.
inline std::vector<Point2> sampled_derivative(const std::vector<Point2>& p, double h) {
  const std::size_t n = p.size();
  std::vector<Point2> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      d[i] = (p[i - 2] - 8.0 * p[i - 1] + 8.0 * p[i + 1] - p[i + 2]) / (12.0 * h);
    } else if (i < 2) {
      d[i] = (-25.0 * p[i] + 48.0 * p[i + 1] - 36.0 * p[i + 2] + 16.0 * p[i + 3] - 3.0 * p[i + 4]) /
             (12.0 * h);
    } else {
      d[i] = (25.0 * p[i] - 48.0 * p[i - 1] + 36.0 * p[i - 2] - 16.0 * p[i - 3] + 3.0 * p[i - 4]) /
             (12.0 * h);
    }
  }
  return d;
}
}  // namespace detail

/// k-fold front track of a seed on [0, 1], as one path over [0, k+1]. Each stage is sampled
/// at `samples` intervals; its derivative comes from finite differences on that grid.
inline StagedPath finn_front_iterate(const Curve& seed, int k, std::size_t samples = 4000) {
  if (k < 1) throw DomainError("finn_front_iterate: k must be >= 1");
  const Interval dom = seed.domain();
  if (dom.lo != 0.0 || dom.hi != 1.0) throw DomainError("finn_front_iterate: seed must live on [0, 1]");
  if (samples < 8) throw DomainError("finn_front_iterate: too few samples");
  const double h = 1.0 / static_cast<double>(samples);
  std::vector<double> u(samples + 1);
  for (std::size_t i = 0; i <= samples; ++i) u[i] = static_cast<double>(i) * h;
  u.back() = 1.0;

  std::vector<HermitePath> stages;
  {
    std::vector<Point2> p(u.size());
    std::vector<Point2> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      p[i] = seed.eval(u[i]);
      v[i] = seed.deriv(u[i]);
    }
    stages.emplace_back(u, std::move(p), std::move(v));
  }
  for (int j = 1; j <= k; ++j) {
    const HermitePath& prev = stages.back();
    std::vector<Point2> p(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) p[i] = front_track(prev, u[i]);
    std::vector<Point2> v = detail::sampled_derivative(p, h);
    for (const Point2& d : v) {
      if (!is_finite(d) || norm(d) < 1e-8) {
        throw NumericError("finn_front_iterate: derivative blow-up in stage " + std::to_string(j));
      }
    }
    stages.emplace_back(u, std::move(p), std::move(v));
  }
  return StagedPath(std::move(stages));
}

}  // namespace unibike
