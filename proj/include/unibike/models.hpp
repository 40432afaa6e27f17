#pragma once

#include <array>
#include <cmath>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "constants.hpp"
#include "error.hpp"
#include "pipeline.hpp"
#include "special.hpp"

namespace unibike {

enum class ModelForm { product, gamma, double_factorial, asymptote };

inline const char* to_string(ModelForm f) {
  switch (f) {
    case ModelForm::product: return "product";
    case ModelForm::gamma: return "gamma";
    case ModelForm::double_factorial: return "double_factorial";
    case ModelForm::asymptote: return "asymptote";
  }
  return "?";
}

struct ModelValue {
  int n = 1;
  double t = two_pi;
  double value = 0.0;
  ModelForm form = ModelForm::product;
};

namespace detail {
inline double en_star_unchecked(int n, double t) {
  const double a = (t + two_pi) / two_pi;
  double ratio = 1.0;
  for (int j = 0; j + 1 < n; ++j) ratio *= (a + 0.5 + j) / (a + j);
  const double shift = two_pi * (n - 1) + t;
  return pi / 3.0 / (shift * shift) * ratio;
}
}  // namespace detail

/// Pochhammer model of the n-th iterate's error:
/// (pi/3) (2pi(n-1) + t)^-2 ((t+3pi)/2pi)_{n-1} / ((t+2pi)/2pi)_{n-1}, as a running product.
inline double en_star(int n, double t) {
  if (n < 1) throw DomainError("en_star: n must be >= 1");
  if (!(t >= two_pi)) throw DomainError("en_star: t must be >= 2pi");
  return detail::en_star_unchecked(n, t);
}

/// E_n*(2pi) in each closed form; index by ModelForm. The gamma form moves to log space past
/// n = 170 and the double-factorial form to a running ratio once its factorials overflow.
/// The three exact forms are cross-checked to 1e-10 relative.
inline std::array<ModelValue, 4> en_star_at_2pi_forms(int n) {
  if (n < 1) throw DomainError("en_star_at_2pi: n must be >= 1");
  const double nd = n;
  const double c = 9.0 * std::pow(pi, 1.5);
  std::array<ModelValue, 4> out{};
  for (int i = 0; i < 4; ++i) out[i] = {n, two_pi, 0.0, static_cast<ModelForm>(i)};

  out[0].value = detail::en_star_unchecked(n, two_pi);

  if (n <= 170) {
    out[1].value = std::tgamma(1.5 + nd) / std::tgamma(nd + 1.0) / (c * nd * nd);
  } else {
    out[1].value = std::exp(std::lgamma(1.5 + nd) - std::lgamma(nd + 1.0)) / (c * nd * nd);
  }

  if (n <= 170) {
    double dfact = 1.0;
    double fact = 1.0;
    for (int k = 1; k <= n; ++k) {
      dfact *= 2.0 * k + 1.0;
      fact *= k;
    }
    if (std::isfinite(dfact)) {
      out[2].value = dfact / (9.0 * pi * nd * nd * fact * std::ldexp(1.0, n + 1));
    }
  }
  if (out[2].value == 0.0) {
    // (2n+1)!! / (n! 2^n) = prod_{k=1..n} (2k+1)/(2k)
    double ratio = 1.0;
    for (int k = 1; k <= n; ++k) ratio *= (2.0 * k + 1.0) / (2.0 * k);
    out[2].value = ratio / (18.0 * pi * nd * nd);
  }

  out[3].value = 1.0 / (c * std::pow(nd, 1.5));

  for (int i = 1; i < 3; ++i) {
    if (std::fabs(out[i].value / out[0].value - 1.0) > 1e-10) {
      std::ostringstream os;
      os.precision(17);
      os << "en_star_at_2pi: " << to_string(out[i].form) << " form disagrees with product at n = " << n;
      throw NumericError(os.str());
    }
  }
  return out;
}

inline ModelValue en_star_at_2pi(int n, ModelForm form = ModelForm::product) {
  return en_star_at_2pi_forms(n)[static_cast<std::size_t>(form)];
}

/// sqrt(t/2pi) - (pi/3t^3)(t+pi) 4F3(1, a, a, a+3/2; a+1, a+1, a+1; 1), a = t/2pi; the same
/// value as sqrt(t/2pi) - sum_{k>=2} E_k*(t - 2pi).
inline double r_inf_approx(double t, double tol = 1e-13) {
  if (!(t > two_pi)) throw DomainError("r_inf_approx: t must exceed 2pi");
  const double series = hyper_4F3_unit_value(t / two_pi, tol);
  return std::sqrt(t / two_pi) - pi / (3.0 * t * t * t) * (t + pi) * series;
}

struct Conjecture2Row {
  double t = 0.0;
  double value = 0.0;
  double tail_bound = 0.0;
  std::int64_t terms = 0;
  double ratio = 0.0;          ///< value / (2t): the observed growth
  double ratio_literal = 0.0;  ///< value / (2t^2): the conjectured normalisation
};

/// 4F3(1, t, t, t+3/2; t+1, t+1, t+1; 1) at each t, with tail bounds.
inline std::vector<Conjecture2Row> conjecture2_scan(std::span<const double> t_values,
                                                    double tail_tol = 1e-9) {
  std::vector<Conjecture2Row> rows;
  for (std::size_t i = 0; i < t_values.size(); ++i) {
    const double t = t_values[i];
    if (!(t > 0.0) || (i > 0 && !(t > t_values[i - 1]))) {
      throw DomainError("conjecture2_scan: t values must be positive and increasing");
    }
    const SeriesResult s = hyper_4F3_unit(t, tail_tol);
    if (!s.converged) {
      std::ostringstream os;
      os << "conjecture2_scan: series did not converge at t = " << t;
      throw NumericError(os.str());
    }
    rows.push_back({t, s.value, s.tail_bound, s.terms, s.value / (2.0 * t), s.value / (2.0 * t * t)});
  }
  return rows;
}

struct ModelComparisonRow {
  double t = 0.0;
  double measured = 0.0;
  double model = 0.0;
  double rel_dev = 0.0;  ///< model / measured - 1
};

inline std::vector<ModelComparisonRow> model_vs_measured(const IterationRun& run, int n,
                                                         std::span<const double> t_grid) {
  if (n < 1 || n > run.size()) throw DomainError("model_vs_measured: run has no track n = " + std::to_string(n));
  const ErrorProfile& prof = run.profile(n);
  std::vector<ModelComparisonRow> rows;
  for (double t : t_grid) {
    const auto measured = prof.at(t);
    if (!measured) {
      std::ostringstream os;
      os.precision(17);
      os << "model_vs_measured: no profile sample for n = " << n << " at t = " << t;
      throw DomainError(os.str());
    }
    const double model = en_star(n, t);
    rows.push_back({t, *measured, model, model / *measured - 1.0});
  }
  return rows;
}

}  // namespace unibike
