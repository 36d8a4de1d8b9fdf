#include "cudir/specfun.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "cudir/error.hpp"

namespace cudir::specfun {

void SeriesControl::validate() const {
  if (!(rel_tol > 0.0) || !std::isfinite(rel_tol)) throw DomainError("SeriesControl.rel_tol must be > 0");
  if (max_terms < 1) throw DomainError("SeriesControl.max_terms must be >= 1");
  if (!(asymptotic_cutoff > 0.0)) throw DomainError("SeriesControl.asymptotic_cutoff must be > 0");
}

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_log_gamma(double x) {
  // valid for x >= 0.5
  x -= 1.0;
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (x + static_cast<double>(i));
  const double t = x + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (x + 0.5) * std::log(t) - t + std::log(a);
}

/// value = sum * exp(log_scale)
struct ScaledSum {
  double sum;
  double log_scale;
};

constexpr double kRescaleAt = 1e280;
const double kLogRescale = std::log(kRescaleAt);

ScaledSum hypergeometric_series(double a, double b, double y, const SeriesControl& ctl) {
  double term = 1.0;
  double sum = 1.0;
  double log_scale = 0.0;
  for (int k = 0; k < ctl.max_terms; ++k) {
    const double kd = static_cast<double>(k);
    const double ratio = (a + kd) / (b + kd) * y / (kd + 1.0);
    term *= ratio;
    sum += term;
    if (term == 0.0) return {sum, log_scale};
    if (std::abs(ratio) < 1.0 && std::abs(term) <= ctl.rel_tol * std::abs(sum)) return {sum, log_scale};
    if (std::abs(sum) > kRescaleAt) {
      sum /= kRescaleAt;
      term /= kRescaleAt;
      log_scale += kLogRescale;
    }
  }
  throw ConvergenceError("kummer_m series did not converge", static_cast<std::size_t>(ctl.max_terms));
}

/// Sum_s (p)_s (q)_s / s! * w^s, truncated before the terms start to grow.
/// nullopt when the truncation cannot reach rel_tol.
std::optional<double> asymptotic_series(double p, double q, double w, const SeriesControl& ctl) {
  double term = 1.0;
  double sum = 1.0;
  double previous = 1.0;
  for (int s = 0; s < ctl.max_terms; ++s) {
    const double sd = static_cast<double>(s);
    term *= (p + sd) * (q + sd) / (sd + 1.0) * w;
    if (term == 0.0) return sum;
    if (std::abs(term) > previous) return std::nullopt;
    sum += term;
    if (std::abs(term) <= ctl.rel_tol * std::abs(sum)) return sum;
    previous = std::abs(term);
  }
  return std::nullopt;
}

/// Large-y expansion of M(a, b, -y) without the Gamma(b)/Gamma(b-a) y^-a
/// prefactor. The dropped exponentially small companion must be below rel_tol.
std::optional<double> kummer_negative_asymptotic(double a, double b, double y, const SeriesControl& ctl) {
  const double log_companion = log_gamma(b - a) - log_gamma(a) - y + (2.0 * a - b) * std::log(y);
  if (log_companion > std::log(ctl.rel_tol)) return std::nullopt;
  return asymptotic_series(a, a - b + 1.0, 1.0 / y, ctl);
}

void check_order(int n, int minimum, const char* fn) {
  if (n < minimum)
    throw DomainError(std::string(fn) + ": dimension must be >= " + std::to_string(minimum));
}

void check_argument(double x, const char* fn) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError(std::string(fn) + ": x must be finite and >= 0");
}

/// M(1, n/2 + 1, -x^2/2), shared by f_var and g_var.
double second_moment_kummer(int n, double x, const SeriesControl& ctl) {
  const double b = 0.5 * n + 1.0;
  const double y = 0.5 * x * x;
  if (x >= ctl.asymptotic_cutoff) {
    if (auto s = kummer_negative_asymptotic(1.0, b, y, ctl)) return (b - 1.0) / y * *s;
  }
  return kummer_m(1.0, b, -y, ctl);
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("log_gamma: x must be finite and > 0");
  if (x < 0.5) {
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - lanczos_log_gamma(1.0 - x);
  }
  return lanczos_log_gamma(x);
}

double kummer_m(double a, double b, double z, const SeriesControl& ctl) {
  ctl.validate();
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(z)) throw DomainError("kummer_m: non-finite argument");
  if (!(b > 0.0)) throw DomainError("kummer_m: b must be > 0");
  if (a < 0.0) throw DomainError("kummer_m: a must be >= 0");
  if (z == 0.0 || a == 0.0) return 1.0;
  if (z > 0.0) {
    const auto s = hypergeometric_series(a, b, z, ctl);
    return s.sum * std::exp(s.log_scale);
  }
  const auto s = hypergeometric_series(b - a, b, -z, ctl);
  return s.sum * std::exp(z + s.log_scale);
}

double varrho(int n, double x, const SeriesControl& ctl) {
  check_order(n, 1, "varrho");
  check_argument(x, "varrho");
  ctl.validate();
  if (x == 0.0) return 0.0;
  const double b = 0.5 * (n + 2);
  const double y = 0.5 * x * x;
  if (x >= ctl.asymptotic_cutoff) {
    // The Gamma prefactors cancel against those of the expansion.
    if (auto s = kummer_negative_asymptotic(0.5, b, y, ctl)) return std::min(1.0, *s);
  }
  const double log_prefactor = log_gamma(0.5 * (n + 1)) - log_gamma(b) - 0.5 * std::numbers::ln2;
  // Long series near the cutoff can overshoot the bound by a few ulps.
  return std::min(1.0, std::exp(log_prefactor) * x * kummer_m(0.5, b, -y, ctl));
}

double f_var(int n, double x, const SeriesControl& ctl) {
  check_order(n, 1, "f_var");
  check_argument(x, "f_var");
  ctl.validate();
  const double m = second_moment_kummer(n, x, ctl);
  const double r = varrho(n, x, ctl);
  return 1.0 - (n - 1.0) / n * m - r * r;
}

double g_var(int n, double x, const SeriesControl& ctl) {
  check_order(n, 1, "g_var");
  check_argument(x, "g_var");
  ctl.validate();
  return second_moment_kummer(n, x, ctl) / n;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace cudir::specfun
