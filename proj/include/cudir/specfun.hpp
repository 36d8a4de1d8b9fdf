#pragma once

namespace cudir::specfun {

/// Convergence knobs shared by the series evaluators.
struct SeriesControl {
  double rel_tol = 1e-14;
  int max_terms = 10000;
  /// Arguments x >= cutoff of varrho / f_var / g_var use the large-x
  /// asymptotic expansion of M instead of the convergent series.
  double asymptotic_cutoff = 40.0;

  /// Throws DomainError when a field is out of range.
  void validate() const;
};

/// ln Gamma(x) for x > 0 (Lanczos, g = 7, nine coefficients).
[[nodiscard]] double log_gamma(double x);

/// Kummer's confluent hypergeometric function M(a, b, z) for a >= 0, b > 0.
/// Negative z is evaluated as e^z M(b - a, b, -z) so that the summed series
/// has positive terms; the running sum is kept in scaled form, so large |z|
/// neither overflows nor underflows.
/// Throws ConvergenceError when the series needs more than ctl.max_terms.
[[nodiscard]] double kummer_m(double a, double b, double z, const SeriesControl& ctl = {});

/// Mean resultant length of the projected normal xi/||xi||,
/// xi ~ N((x, 0, ..., 0), I_n):
///   Gamma((n+1)/2) / (sqrt(2) Gamma((n+2)/2)) * x * M(1/2, (n+2)/2, -x^2/2).
[[nodiscard]] double varrho(int n, double x, const SeriesControl& ctl = {});

/// Variance of the first coordinate of xi/||xi|| (same law as varrho):
///   1 - (n-1)/n M(1, n/2+1, -x^2/2) - varrho(n, x)^2.
[[nodiscard]] double f_var(int n, double x, const SeriesControl& ctl = {});

/// Variance of each remaining coordinate: M(1, n/2+1, -x^2/2) / n. For
/// n = 1 there is no remaining coordinate; the formula is still evaluated.
[[nodiscard]] double g_var(int n, double x, const SeriesControl& ctl = {});

/// Standard normal distribution function.
[[nodiscard]] double normal_cdf(double x);

}  // namespace cudir::specfun
