#pragma once

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "curve.hpp"
#include "hermite.hpp"
#include "seeds.hpp"

namespace unibike {

/// Provenance of a track: enough to regenerate it.
struct TrackManifest {
  int n = 1;
  SeedFamily seed_family = SeedFamily::F;
  Interval domain{};
  double ode_abs_tol = 0.0;  ///< 0 when the track was not produced by an ODE solve
  double ode_rel_tol = 0.0;
  std::string parent_hash;   ///< content hash of the front track, or empty

  void validate() const {
    if (n < 1) throw DomainError("TrackManifest: n must be >= 1");
    if (domain.empty()) throw DomainError("TrackManifest: empty domain");
  }
};

/// A sampled spiral r(theta) with knots (theta_i, r_i, dr_i/dtheta) and cubic Hermite
/// interpolation between them. The curve parameter is the unwrapped polar angle, so
/// eval(theta) = r(theta) (cos theta, sin theta).
class PolarTrack final : public Curve {
 public:
  PolarTrack(std::vector<double> theta, std::vector<double> r, std::vector<double> slope,
             TrackManifest manifest)
      : theta_(std::move(theta)),
        r_(std::move(r)),
        slope_(std::move(slope)),
        manifest_(std::move(manifest)) {
    if (theta_.size() < 2) throw DomainError("PolarTrack: need at least two knots");
    if (r_.size() != theta_.size() || slope_.size() != theta_.size()) {
      throw DomainError("PolarTrack: knot arrays differ in length");
    }
    for (std::size_t i = 0; i < theta_.size(); ++i) {
      if (!std::isfinite(theta_[i]) || !std::isfinite(r_[i]) || !std::isfinite(slope_[i])) {
        throw DomainError("PolarTrack: non-finite knot " + std::to_string(i));
      }
      if (!(r_[i] > 0.0)) throw DomainError("PolarTrack: non-positive radius at knot " + std::to_string(i));
      if (i > 0 && !(theta_[i] > theta_[i - 1])) {
        throw DomainError("PolarTrack: knot angles not strictly increasing at " + std::to_string(i));
      }
    }
    manifest_.domain = {theta_.front(), theta_.back()};
    manifest_.validate();
  }

  Interval domain() const override { return manifest_.domain; }
  std::span<const double> breakpoints() const override { return theta_; }

  const TrackManifest& manifest() const { return manifest_; }
  std::size_t size() const { return theta_.size(); }
  std::span<const double> theta() const { return theta_; }
  std::span<const double> radii() const { return r_; }
  std::span<const double> slopes() const { return slope_; }

  /// (r, dr/dtheta) at theta; reproduces knot values exactly.
  HermiteValue<double> radius_at(double theta) const {
    require_in_domain(*this, theta, "PolarTrack");
    const std::size_t i = locate_interval(theta_, theta);
    if (theta == theta_[i]) return {r_[i], slope_[i]};
    if (theta == theta_[i + 1]) return {r_[i + 1], slope_[i + 1]};
    return hermite_piece(theta_[i], theta_[i + 1], r_[i], slope_[i], r_[i + 1], slope_[i + 1],
                         theta);
  }

  Point2 eval(double theta) const override { return polar(radius_at(theta).value, theta); }

  Point2 deriv(double theta) const override {
    const auto [r, dr] = radius_at(theta);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {dr * c - r * s, dr * s + r * c};
  }

  /// True when r is nondecreasing at every knot (slopes >= 0 and radii ordered).
  bool radially_monotone() const {
    for (std::size_t i = 0; i < r_.size(); ++i) {
      if (slope_[i] < 0.0) return false;
      if (i > 0 && r_[i] < r_[i - 1]) return false;
    }
    return true;
  }

 private:
  std::vector<double> theta_;
  std::vector<double> r_;
  std::vector<double> slope_;
  TrackManifest manifest_;
};

inline HermiteValue<double> hermite_eval(const PolarTrack& track, double theta) {
  return track.radius_at(theta);
}

/// Knot angles start, start + h, ... not exceeding stop (to within a 1e-9 relative slack).
inline std::vector<double> uniform_knots(double start, double stop, double spacing) {
  if (!(spacing > 0.0)) throw DomainError("uniform_knots: spacing must be positive");
  if (!(stop > start)) throw DomainError("uniform_knots: empty range");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / spacing + 1e-9));
  std::vector<double> knots(count + 1);
  for (std::size_t i = 0; i <= count; ++i) knots[i] = start + static_cast<double>(i) * spacing;
  return knots;
}

/// Samples a polar seed onto uniform knots as track n = 1.
inline PolarTrack sample_seed(const PolarSeedCurve& seed, double theta_max,
                              double spacing = pi / 200.0) {
  std::vector<double> theta = uniform_knots(two_pi, theta_max, spacing);
  std::vector<double> r(theta.size());
  std::vector<double> dr(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    r[i] = seed.radius(theta[i]);
    dr[i] = seed.radius_slope(theta[i]);
  }
  TrackManifest m;
  m.n = 1;
  m.seed_family = seed.family();
  return PolarTrack(std::move(theta), std::move(r), std::move(dr), std::move(m));
}

/// One body row of the track text format: theta, r, dr/dtheta at 17 significant digits.
inline std::string format_knot_row(double theta, double r, double slope) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", theta, r, slope);
  return buf;
}

/// 64-bit FNV-1a.
class Fnv1a64 {
 public:
  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      hash_ ^= c;
      hash_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t digest() const { return hash_; }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, hash_);
    return buf;
  }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

/// Content digest of a track: FNV-1a over its text body rows.
inline std::string content_hash(const PolarTrack& track) {
  Fnv1a64 h;
  const auto th = track.theta();
  const auto r = track.radii();
  const auto dr = track.slopes();
  for (std::size_t i = 0; i < th.size(); ++i) h.update(format_knot_row(th[i], r[i], dr[i]));
  return h.hex();
}

}  // namespace unibike
