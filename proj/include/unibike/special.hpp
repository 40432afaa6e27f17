#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "error.hpp"

namespace unibike {

/// Rising factorial (a)_n = a (a+1) ... (a+n-1), with (a)_0 = 1.
inline double pochhammer(double a, std::int64_t n) {
  if (n < 0) throw DomainError("pochhammer: n must be non-negative");
  double p = 1.0;
  for (std::int64_t k = 0; k < n; ++k) p *= a + static_cast<double>(k);
  if (!std::isfinite(p)) {
    throw NumericError("pochhammer: overflow at a = " + std::to_string(a) +
                       ", n = " + std::to_string(n));
  }
  return p;
}

/// log (a)_n for a > 0, via log-gamma.
inline double log_pochhammer(double a, double n) {
  if (!(a > 0.0) || n < 0.0) throw DomainError("log_pochhammer: need a > 0 and n >= 0");
  return std::lgamma(a + n) - std::lgamma(a);
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct SeriesResult {
  double value = 0.0;       ///< partial sum plus tail correction
  double tail_bound = 0.0;  ///< bound on |true value - value|
  std::int64_t terms = 0;   ///< explicit terms summed
  bool converged = false;
};

namespace detail {

// Gamma(x + 3/2) / Gamma(x + 1) = sqrt(x) * sum_i c_i x^-i  (x -> infinity).
inline constexpr std::array<double, 6> kGammaRatioCoeffs = {
    1.0, 3.0 / 8.0, -7.0 / 128.0, 9.0 / 1024.0, 59.0 / 32768.0, -483.0 / 262144.0};
// Bound on the magnitude of the first omitted coefficient (exact value -2323/4194304).
inline constexpr double kGammaRatioNextCoeff = 1e-3;

// Shape of the 4F3 term as a function of x = a + k: h(x) = x^-2 Gamma(x+3/2)/Gamma(x+1),
// expanded as sum_i c_i x^-(3/2 + i). Returns the m-th derivative.
inline double term_shape_derivative(double x, int m) {
  double total = 0.0;
  for (std::size_t i = 0; i < kGammaRatioCoeffs.size(); ++i) {
    const double p = 1.5 + static_cast<double>(i);
    double coef = kGammaRatioCoeffs[i];
    for (int j = 0; j < m; ++j) coef *= -(p + j);
    total += coef * std::pow(x, -(p + m));
  }
  return total;
}

// Integral of h over [x, infinity).
inline double term_shape_tail_integral(double x) {
  double total = 0.0;
  for (std::size_t i = 0; i < kGammaRatioCoeffs.size(); ++i) {
    const double p = 1.5 + static_cast<double>(i);
    total += kGammaRatioCoeffs[i] * std::pow(x, 1.0 - p) / (p - 1.0);
  }
  return total;
}

// sum_{j >= 0} h(x + j) by Euler-Maclaurin, and a bound on its error.
inline std::pair<double, double> term_shape_tail_sum(double x) {
  const double h0 = term_shape_derivative(x, 0);
  const double h1 = term_shape_derivative(x, 1);
  const double h3 = term_shape_derivative(x, 3);
  const double h5 = term_shape_derivative(x, 5);
  const double sum = term_shape_tail_integral(x) + 0.5 * h0 - h1 / 12.0 + h3 / 720.0 -
                     h5 / 30240.0;
  // Next Euler-Maclaurin term, doubled, plus the truncated expansion coefficient
  // integrated over the tail: |c6| x^-7.5 summed ~ x^-6.5 / 6.5 + x^-7.5.
  const double h7 = term_shape_derivative(x, 7);
  const double em_err = 2.0 * std::fabs(h7) / 1209600.0;
  const double trunc_err =
      kGammaRatioNextCoeff * (std::pow(x, -6.5) / 6.5 + std::pow(x, -7.5));
  return {sum, em_err + trunc_err};
}

}  // namespace detail

/// 4F3(1, a, a, a+3/2; a+1, a+1, a+1; 1), summed term by term with an Euler-Maclaurin
/// tail correction.
///
/// Terms are T_k = (a)_k^2 (a+3/2)_k / (a+1)_k^3, generated by the ratio
/// T_{k+1}/T_k = (a+k)^2 (a+k+3/2) / (a+k+1)^3. They decay like k^-3/2, so the plain
/// partial sum converges far too slowly; after K terms the remainder is estimated from the
/// asymptotic shape of T_k in x = a+K. `tail_bound` bounds the error of that estimate.
/// Summation continues (doubling K) until tail_bound < term_tol or max_terms is reached.
inline SeriesResult hyper_4F3_unit(double a, double term_tol = 1e-13,
                                   std::int64_t max_terms = 10'000'000) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("hyper_4F3_unit: need a > 0");
  if (!(term_tol > 0.0)) throw DomainError("hyper_4F3_unit: term_tol must be positive");
  if (max_terms < 1) throw DomainError("hyper_4F3_unit: max_terms must be positive");

  // The shape expansion needs x = a + K well away from 0.
  std::int64_t target = std::max<std::int64_t>(64, static_cast<std::int64_t>(std::ceil(64.0 - a)));
  target = std::min(target, max_terms);

  CompensatedSum partial;
  double term = 1.0;
  std::int64_t k = 0;
  SeriesResult out;
  for (;;) {
    for (; k < target; ++k) {
      partial.add(term);
      const double x = a + static_cast<double>(k);
      const double ratio = (x / (x + 1.0)) * (x / (x + 1.0)) * ((x + 1.5) / (x + 1.0));
      term *= ratio;
    }
    // term now holds T_K with K = k.
    const double x = a + static_cast<double>(k);
    const auto [shape_sum, shape_err] = detail::term_shape_tail_sum(x);
    const double scale = term / detail::term_shape_derivative(x, 0);
    out.value = partial.value() + scale * shape_sum;
    out.tail_bound = scale * shape_err;
    out.terms = k;
    if (out.tail_bound < term_tol) {
      out.converged = true;
      return out;
    }
    if (target >= max_terms) break;
    target = std::min(max_terms, 2 * target);
  }
  out.converged = false;
  return out;
}

/// Like hyper_4F3_unit, but non-convergence is an error.
inline double hyper_4F3_unit_value(double a, double term_tol = 1e-13) {
  const SeriesResult r = hyper_4F3_unit(a, term_tol);
  if (!r.converged) {
    throw NumericError("hyper_4F3_unit: tail bound " + std::to_string(r.tail_bound) +
                       " did not reach tolerance at a = " + std::to_string(a));
  }
  return r.value;
}

}  // namespace unibike
