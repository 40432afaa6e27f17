#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include <unibike.hpp>

#include "oracles.hpp"

using namespace unibike;

TEST(EnStar, FirstIterateIsLeadingTerm) {
  for (double t : {two_pi, 10.0, 100.0}) EXPECT_DOUBLE_EQ(en_star(1, t), pi / 3.0 / (t * t));
  EXPECT_THROW(en_star(0, 10.0), DomainError);
  EXPECT_THROW(en_star(3, 1.0), DomainError);
}

TEST(EnStar, Recurrence) {
  for (int n = 2; n <= 80; n += 3) {
    for (double t : {two_pi, 7.5, 50.0 * pi}) {
      const double lhs = en_star(n, t);
      const double rhs = en_star(n - 1, t + two_pi) * (1.0 + pi / (t + two_pi));
      EXPECT_NEAR(lhs / rhs, 1.0, 1e-13) << n << " " << t;
    }
  }
}

TEST(EnStar, MatchesPochhammerDefinition) {
  for (int n : {2, 10, 64}) {
    for (double t : {two_pi, 20.0 * pi, 50.0 * pi}) {
      const double direct = pi / 3.0 / std::pow(two_pi * (n - 1) + t, 2.0) *
                            std::exp(log_pochhammer((t + 3.0 * pi) / two_pi, n - 1) -
                                     log_pochhammer((t + two_pi) / two_pi, n - 1));
      EXPECT_NEAR(en_star(n, t) / direct, 1.0, 1e-12);
    }
  }
}

TEST(EnStar, QuotedExampleValue) {
  // The quoted E64* = 1.3036e-5 is the product formula at t = 20pi; at 50pi it gives 6.359e-6.
  EXPECT_NEAR(en_star(64, 20.0 * pi), 1.3036e-5, 1e-9);
  EXPECT_NEAR(en_star(64, 50.0 * pi), 6.3590e-6, 1e-9);
}

TEST(EnStar, DecreasingInT) {
  for (int n : {1, 5, 64, 300}) {
    double prev = en_star(n, two_pi);
    for (double t = two_pi + 0.5; t < 200.0; t += 0.5) {
      const double v = en_star(n, t);
      EXPECT_LT(v, prev);
      prev = v;
    }
  }
}

TEST(EnStarAt2Pi, FormsAgree) {
  for (int n = 1; n <= 500; ++n) {
    const auto f = en_star_at_2pi_forms(n);
    EXPECT_NEAR(f[1].value / f[0].value, 1.0, 1e-12) << n;
    EXPECT_NEAR(f[2].value / f[0].value, 1.0, 1e-12) << n;
    EXPECT_EQ(f[2].form, ModelForm::double_factorial);
  }
  EXPECT_DOUBLE_EQ(en_star_at_2pi(1).value, 1.0 / (12.0 * pi));
}

TEST(EnStarAt2Pi, LogSpaceCrossover) {
  // Around n = 170 the gamma form switches to lgamma; the product form is continuous.
  for (int n = 165; n <= 176; ++n) {
    EXPECT_NEAR(en_star_at_2pi(n, ModelForm::gamma).value / en_star_at_2pi(n).value, 1.0, 1e-12);
  }
}

TEST(EnStarAt2Pi, AsymptoteAndBounds) {
  EXPECT_NEAR(en_star_at_2pi(300, ModelForm::asymptote).value, 3.84e-6, 0.005e-6);
  const double c = 1.0 / (9.0 * std::pow(pi, 1.5));
  EXPECT_NEAR(en_star_at_2pi(10000).value * std::pow(1e4, 1.5) / c, 1.0, 0.02);
  for (int n = 1; n <= 1000; ++n) {
    const double v = en_star(n, two_pi);
    EXPECT_LE(v, c * (n + 1.0) / (double(n) * n));
    EXPECT_LE(c * (n + 1.0) / (double(n) * n), 1.0 / n);
  }
}

TEST(RInf, MatchesTermwisePochhammerSum) {
  for (double t : {10.0 * pi, 5.0 * pi, 30.0 * pi}) {
    const double direct = std::sqrt(t / two_pi) - oracle::pochhammer_tail_sum(t - two_pi);
    EXPECT_NEAR(r_inf_approx(t), direct, 1e-10) << t;
  }
}

TEST(RInf, EqualsH1AndStaysBelowSqrt) {
  for (double t : {7.0, 20.0, 100.0, 1000.0}) {
    EXPECT_EQ(r_inf_approx(t, 1e-13), radius_H1(t));
    EXPECT_LT(r_inf_approx(t), std::sqrt(t / two_pi));
  }
  EXPECT_THROW(r_inf_approx(two_pi), DomainError);
}

TEST(RInf, LeadingCorrection) {
  const double t = 1e4;
  const double gap = std::sqrt(t / two_pi) - r_inf_approx(t);
  EXPECT_NEAR(gap, 1.0 / (3.0 * t) + pi / (3.0 * t * t), 1e-9);
  EXPECT_NEAR(gap * 3.0 * t, 1.0, 1e-3);
}

TEST(Conjecture2, ScanValuesAndTails) {
  const std::vector<double> ts = {1.0, 10.0, 50.0, 100.0, 500.0};
  const auto rows = conjecture2_scan(ts);
  ASSERT_EQ(rows.size(), ts.size());
  for (const auto& r : rows) {
    EXPECT_LT(r.tail_bound, 1e-6);
    EXPECT_NEAR(r.ratio, r.value / (2.0 * r.t), 1e-15);
    EXPECT_NEAR(r.ratio_literal, r.value / (2.0 * r.t * r.t), 1e-15);
    if (r.t <= 100.0) {
      EXPECT_NEAR(r.value / oracle::hyper43(r.t), 1.0, 1e-10);
    }
  }
  // Small t: far from the asymptotic regime.
  EXPECT_GT(std::fabs(rows[0].ratio - 1.0), 0.1);
  // Observed growth is linear: |value/(2t) - 1| shrinks, while value/(2t^2) -> 0.
  for (std::size_t i = 2; i < rows.size(); ++i) {
    EXPECT_LT(std::fabs(rows[i].ratio - 1.0), std::fabs(rows[i - 1].ratio - 1.0));
    EXPECT_LT(rows[i].ratio_literal, rows[i - 1].ratio_literal);
  }
  EXPECT_THROW(conjecture2_scan(std::vector<double>{10.0, 5.0}), DomainError);
}

TEST(ModelVsMeasured, SecondIterateApproachesModel) {
  IterationConfig cfg;
  cfg.profile_max = 40.0 * pi;
  cfg.profile_spacing = pi;
  const IterationRun run = iterate(make_seed(SeedFamily::F), 2, 50.0 * pi, cfg);
  const auto grid = uniform_grid(4.0 * pi, 40.0 * pi, pi);
  const auto rows = model_vs_measured(run, 2, grid);
  ASSERT_EQ(rows.size(), grid.size());
  // The model ratio approaches 1 from above; within 10% from about 14pi on.
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(rows[i].model / rows[i].measured, rows[i - 1].model / rows[i - 1].measured);
    EXPECT_GT(rows[i].model / rows[i].measured, 1.0);
    if (rows[i].t >= 14.0 * pi) {
      EXPECT_LT(rows[i].rel_dev, 0.10) << rows[i].t;
    }
  }
  // n = 1 against the leading term: ratio tends to 1.
  const auto first = model_vs_measured(run, 1, std::vector<double>{4.0 * pi, 40.0 * pi});
  EXPECT_LT(std::fabs(first[1].rel_dev), std::fabs(first[0].rel_dev));
  EXPECT_THROW(model_vs_measured(run, 3, grid), DomainError);
  EXPECT_THROW(model_vs_measured(run, 2, std::vector<double>{4.1 * pi}), DomainError);
}
