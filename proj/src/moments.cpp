#include "cudir/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cudir/error.hpp"

namespace cudir {

namespace {

UnitDirection two_point_direction(bool first_larger) {
  const double h = 0.5 * std::numbers::sqrt2;
  return first_larger ? UnitDirection::from_coords({h, -h}) : UnitDirection::from_coords({-h, h});
}

/// chi(mu), or UndefinedDirectionError(mrl = 0) when mu is in <1>.
UnitDirection mean_direction_or_throw(std::span<const double> mu) {
  try {
    return standardize(mu);
  } catch (const DegenerateInputError&) {
    throw UndefinedDirectionError("mean direction undefined: mu is constant across components", 0.0);
  }
}

std::optional<UnitDirection> try_standardize(std::span<const double> z) {
  try {
    return standardize(z);
  } catch (const DegenerateInputError&) {
    return std::nullopt;
  }
}

Matrix centering_matrix(std::size_t n) {
  Matrix p(n, n, -1.0 / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) p(i, i) += 1.0;
  return p;
}

}  // namespace

void MomentSummary::validate(double tol) const {
  if (!(mrl >= 0.0 && mrl <= 1.0)) throw DomainError("MomentSummary: mrl outside [0, 1]");
  if (!cov_chi) return;
  const Matrix& c = *cov_chi;
  if (c.rows() != md.dim() || c.cols() != md.dim()) throw DimensionError("MomentSummary: cov_chi shape mismatch");
  if (std::abs(c.trace() - (1.0 - mrl * mrl)) > tol) throw DomainError("MomentSummary: trace(cov_chi) != 1 - mrl^2");
  for (std::size_t i = 0; i < c.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < c.cols(); ++j) s += c(i, j);
    if (std::abs(s) > tol) throw DomainError("MomentSummary: cov_chi does not annihilate 1");
  }
}

MomentSummary two_dim_exact(double p_gt) {
  if (!(p_gt >= 0.0 && p_gt <= 1.0)) throw DomainError("two_dim_exact: probability outside [0, 1]");
  const double mrl = 2.0 * std::abs(p_gt - 0.5);
  if (p_gt == 0.5) throw UndefinedDirectionError("two_dim_exact: P{Z1 > Z2} = 1/2, mean direction undefined", 0.0);
  return {two_point_direction(p_gt > 0.5), mrl, std::nullopt};
}

MomentSummary two_dim_normal(double mu1, double mu2, double sigma1, double sigma2, double rho12) {
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) throw ModelError("two_dim_normal: sigmas must be > 0");
  if (!(rho12 > -1.0 && rho12 < 1.0)) throw ModelError("two_dim_normal: rho must lie in (-1, 1)");
  const double spread2 = sigma1 * sigma1 + sigma2 * sigma2 - 2.0 * rho12 * sigma1 * sigma2;
  if (!(spread2 > 0.0)) throw ModelError("two_dim_normal: Z1 - Z2 is degenerate");
  if (mu1 == mu2) throw UndefinedDirectionError("two_dim_normal: mu1 == mu2, mean direction undefined", 0.0);
  const double mrl = 2.0 * (specfun::normal_cdf(std::abs(mu1 - mu2) / std::sqrt(spread2)) - 0.5);
  return {two_point_direction(mu1 > mu2), mrl, std::nullopt};
}

MomentSummary md_mrl_homoscedastic(const HomoscedasticModel& model, const specfun::SeriesControl& ctl) {
  UnitDirection md = mean_direction_or_throw(model.mu());
  const int order = static_cast<int>(model.dim()) - 1;
  const double mrl = specfun::varrho(order, model.concentration(), ctl);
  return {std::move(md), mrl, cov_chi_homoscedastic(model, ctl)};
}

Matrix projected_cov_canonical(int n, double x, const specfun::SeriesControl& ctl) {
  if (n < 2) throw DimensionError("projected_cov_canonical needs n >= 2");
  const double f = specfun::f_var(n, x, ctl);
  const double g = specfun::g_var(n, x, ctl);
  std::vector<double> d(static_cast<std::size_t>(n), g);
  d[0] = f;
  return Matrix::diagonal(d);
}

Matrix cov_chi_homoscedastic(const HomoscedasticModel& model, const specfun::SeriesControl& ctl) {
  const std::size_t n = model.dim();
  const int order = static_cast<int>(n) - 1;
  Matrix p = centering_matrix(n);
  const auto md = try_standardize(model.mu());
  if (!md) return p * (1.0 / static_cast<double>(order));
  const double x = model.concentration();
  const double f = specfun::f_var(order, x, ctl);
  const double g = specfun::g_var(order, x, ctl);
  Matrix c = outer(md->coords(), md->coords()) * (f - g);
  c += p * g;
  return c;
}

double expectation_T(const UnitDirection& theta, const MomentSummary& summary) {
  if (theta.dim() != summary.md.dim()) throw DimensionError("expectation_T: dimension mismatch");
  return summary.mrl * dot(theta, summary.md);
}

double variance_T(const UnitDirection& theta, const Matrix& cov_chi) {
  if (cov_chi.rows() != theta.dim() || cov_chi.cols() != theta.dim())
    throw DimensionError("variance_T: dimension mismatch");
  return std::max(0.0, quadratic_form(cov_chi, theta.coords()));
}

double variance_T_homoscedastic(const UnitDirection& theta, const HomoscedasticModel& model,
                                const specfun::SeriesControl& ctl) {
  if (theta.dim() != model.dim()) throw DimensionError("variance_T_homoscedastic: dimension mismatch");
  const int order = static_cast<int>(model.dim()) - 1;
  const auto md = try_standardize(model.mu());
  if (!md) return 1.0 / order;
  const double x = model.concentration();
  const double f = specfun::f_var(order, x, ctl);
  const double g = specfun::g_var(order, x, ctl);
  const double c = dot(*md, theta);
  return (f - g) * c * c + g;
}

double HomoscedasticFit::concentration() const { return centered_norm / (sigma_hat * std::sqrt(1.0 - rho_hat)); }

HomoscedasticFit fit_homoscedastic(const GaussianModel& model) {
  const Matrix& c = model.cov();
  const std::size_t n = model.dim();
  double mean_var = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean_var += c(i, i);
  mean_var /= static_cast<double>(n);
  double corr_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) corr_sum += c(i, j) / std::sqrt(c(i, i) * c(j, j));
  const double pairs = 0.5 * static_cast<double>(n * (n - 1));
  return {norm(center(model.mu())), std::sqrt(mean_var), corr_sum / pairs};
}

double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

HomoscedasticFit round_fit(const HomoscedasticFit& fit, int decimals) {
  return {round_to(fit.centered_norm, decimals), round_to(fit.sigma_hat, decimals), round_to(fit.rho_hat, decimals)};
}

}  // namespace cudir
