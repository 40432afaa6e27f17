#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include <unibike.hpp>

using namespace unibike;

namespace {

class Circle final : public Curve {
 public:
  explicit Circle(double rho) : rho_(rho) {}
  Interval domain() const override { return {-100.0, 100.0}; }
  Point2 eval(double t) const override { return polar(rho_, t); }
  Point2 deriv(double t) const override { return perp(polar(rho_, t)); }

 private:
  double rho_;
};

class Segment final : public Curve {
 public:
  Interval domain() const override { return {0.0, 10.0}; }
  Point2 eval(double t) const override { return {t, 0.0}; }
  Point2 deriv(double) const override { return {1.0, 0.0}; }
};

}  // namespace

TEST(FrontTrack, AddsUnitTangent) {
  const Circle c(3.0);
  const Point2 f = front_track(c, 0.0);
  EXPECT_NEAR(f.x, 3.0, 1e-15);
  EXPECT_NEAR(f.y, 1.0, 1e-15);
  EXPECT_NEAR(distance(f, c.eval(0.0)), 1.0, 1e-15);
}

TEST(NearestPoint, CircleDistanceIsRadialGap) {
  // Front of a circle of radius rho lies at radius sqrt(rho^2+1); its gap to the circle is known.
  for (double rho : {1.5, 3.0, 10.0}) {
    const Circle c(rho);
    const ErrorSample e = unibike_error(c, 0.4, 0.4);
    EXPECT_NEAR(e.error, std::sqrt(rho * rho + 1.0) - rho, 1e-12);
    EXPECT_NEAR(e.s_star, 0.4 + std::atan(1.0 / rho), 1e-8);
  }
}

TEST(NearestPoint, MinsearchAgreesWithNewton) {
  const PolarSeedCurve f1 = make_seed(SeedFamily::F);
  for (double t : {two_pi, 9.0, 30.0, 100.0}) {
    const ErrorSample a = unibike_error(f1, t, spiral_guess(t));
    const double g = spiral_guess(t);
    const ErrorSample b = unibike_error_minsearch(f1, t, {g - 1.0, g + 1.0});
    EXPECT_EQ(a.method, SearchMethod::newton);
    EXPECT_EQ(b.method, SearchMethod::minsearch);
    EXPECT_NEAR(a.error, b.error, 1e-12);
    EXPECT_NEAR(a.s_star, b.s_star, 1e-6);
  }
}

TEST(NearestPoint, DegenerateMinimumIsFlagged) {
  // Every point of a circle is equidistant from its centre.
  const Circle c(2.0);
  const NearestPoint np = nearest_point_minsearch(c, {0.0, 0.0}, {0.0, 1.0});
  EXPECT_TRUE(np.degenerate);
  EXPECT_NEAR(np.distance, 2.0, 1e-14);
}

TEST(NearestPoint, BoundaryMinimumIsAnError) {
  const Segment s;
  EXPECT_THROW(nearest_point_minsearch(s, {-1.0, 1.0}, {0.0, 5.0}), NumericError);
}

TEST(UnibikeError, F1AtTwoPi) {
  const ErrorSample e = error_F1(two_pi);
  EXPECT_NEAR(e.error, 0.0137, 0.0005);
  EXPECT_NEAR(e.error, 0.0136572, 1e-7);  // high-precision reference
  EXPECT_NEAR(e.s_star, spiral_guess(two_pi), 0.05);
}

TEST(AlphaBeta, ClosedFormsAgree) {
  EXPECT_NEAR(alpha_beta(two_pi).alpha, 13.312064, 1e-6);
  for (double t : {two_pi, 10.0, 100.0, 1e4}) {
    const AlphaBeta ab = alpha_beta(t);
    EXPECT_NEAR(ab.beta, ab.beta_arccos, 1e-9 * std::max(1.0, ab.beta));
    EXPECT_NEAR(ab.alpha, ab.alpha_atan2, 1e-9 * ab.alpha);
    EXPECT_NEAR(ab.alpha, t + two_pi + ab.beta, 1e-12 * ab.alpha);
  }
}

TEST(AlphaBeta, R0IsFrontRadius) {
  const PolarSeedCurve f1 = make_seed(SeedFamily::F);
  for (double t : {two_pi, 20.0, 300.0}) {
    EXPECT_NEAR(R0_closed(t), norm(front_track(f1, t)), 1e-12);
  }
}

TEST(Theorem1, SandwichHoldsOnGrid) {
  for (int i = 0; i < 40; ++i) {
    const double t = 8.0 * pi + 3.0 * pi * i;
    const Theorem1Bounds b = theorem1_bounds(t);
    const double e = error_F1(t).error;
    const double slack = 16.0 * std::numeric_limits<double>::epsilon() * R0_closed(t);
    EXPECT_LE(b.lower, e + slack) << t;
    EXPECT_LE(e, b.upper + slack) << t;
    EXPECT_LT(b.lower, b.upper);
  }
  EXPECT_THROW(theorem1_bounds(two_pi), DomainError);
  EXPECT_NO_THROW(theorem1_bounds(two_pi, true));
}

TEST(Theorem1, GapScalesLikeTMinus4) {
  // Coefficient difference of the upper and lower t^-4 terms.
  const double coeff = upper_t4_coefficient - lower_t4_coefficient;
  EXPECT_NEAR(coeff, pi / 24.0, 1e-14);
  EXPECT_NEAR(upper_t4_coefficient, 43.66, 0.005);
  EXPECT_NEAR(lower_t4_coefficient, 43.53, 0.005);
  for (double t : {100.0 * pi, 128.0 * pi}) {
    const Theorem1Bounds b = theorem1_bounds(t);
    EXPECT_NEAR((b.upper - b.lower) * std::pow(t, 4.0), coeff, 0.01);
  }
}

TEST(Theorem1, LeadingTerm) {
  EXPECT_NEAR(error_F1(1000.0).error * 1e6 / (pi / 3.0), 1.0, 0.02);
  // lambda captures E1 much better than its leading term alone.
  const double t = 200.0 * pi;
  EXPECT_LT(std::fabs(error_F1(t).error - lambda_series(t)), 1e-3 * lambda_series(t));
}

TEST(Theorem1, CrudeBound) {
  for (double t = two_pi; t < 100.0; t += 3.3) EXPECT_TRUE(crude_bound_check(t)) << t;
  EXPECT_THROW(crude_bound_check(1.0), DomainError);
}

TEST(TangentSide, TendsToMinusPi) {
  // High-precision reference for the left-of-segment product at 1020pi. It approaches -pi
  // only like t^-1/2.
  EXPECT_NEAR(tangent_side_check(1020.0 * pi), -3.10605693023049972, 1e-9);
  EXPECT_NEAR(tangent_side_check(100.0 * pi), -2.98842428750692539, 1e-9);
  EXPECT_LT(std::fabs(tangent_side_check(1e5 * pi) + pi), std::fabs(tangent_side_check(1e3 * pi) + pi));
  // Negative all along: F1(t + 4pi) lies right of the tangent segment.
  for (double t = 8.0 * pi; t < 200.0 * pi; t += 7.0 * pi) EXPECT_LT(tangent_side_check(t), 0.0);
}

TEST(Theorem2, DeltaTimesT5Limit) {
  EXPECT_NEAR(theorem2_limit, 27.95, 0.01);
  // High-precision references; the approach to the limit is slow (1.7% high at 1e4).
  EXPECT_NEAR(theorem2_check(1e3), 29.3455696518991093, 1e-7);
  EXPECT_NEAR(theorem2_check(1e4), 28.4279897262256402, 1e-6);
  EXPECT_NEAR(theorem2_check(1e5), 28.1069735877270280, 1e-3);
  // Convergence: closer at larger t.
  EXPECT_LT(std::fabs(theorem2_check(1e4) - theorem2_limit), std::fabs(theorem2_check(1e3) - theorem2_limit));
}

TEST(LowerBoundResidual, ResidualTendsToModelOnlyAtLargeT) {
  // The series residual approaches 65 t^-9/2 from below; at 8pi it is still far off.
  EXPECT_LT(fig10_residual(8.0 * pi).ratio, 0.5);
  EXPECT_GT(fig10_residual(1000.0 * pi).ratio, 0.9);
  double prev = 0.0;
  for (double t : {16.0 * pi, 32.0 * pi, 100.0 * pi, 200.0 * pi}) {
    const double r = fig10_residual(t).ratio;
    EXPECT_GT(r, prev);
    prev = r;
  }
}

TEST(PointLine, DistanceAndDegenerateLine) {
  EXPECT_NEAR(point_line_distance({0, 0}, {1, 0}, {5, 2}), 2.0, 1e-15);
  EXPECT_THROW(point_line_distance({1, 1}, {1, 1}, {0, 0}), DomainError);
}
