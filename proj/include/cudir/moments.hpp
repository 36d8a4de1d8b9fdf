#pragma once

#include <optional>

#include "cudir/linalg.hpp"
#include "cudir/model.hpp"
#include "cudir/specfun.hpp"
#include "cudir/sphere.hpp"

namespace cudir {

/// Mean direction, mean resultant length and (when known) cov(chi(Z)).
struct MomentSummary {
  UnitDirection md;
  double mrl = 0.0;
  std::optional<Matrix> cov_chi;

  /// Checks mrl in [0, 1] and, if cov_chi is present, trace = 1 - mrl^2 and
  /// cov_chi 1 = 0 within tol. Throws DomainError on violation.
  void validate(double tol = 1e-8) const;
};

/// Two-dimensional case for an arbitrary law, from p = P{Z1 > Z2}:
/// mrl = 2|p - 1/2|, md = sign(p - 1/2) (1, -1)/sqrt(2).
/// p == 1/2 throws UndefinedDirectionError carrying mrl 0.
[[nodiscard]] MomentSummary two_dim_exact(double p_gt);

/// Two-dimensional normal case:
/// mrl = 2[Phi(|mu1 - mu2| / sqrt(s1^2 + s2^2 - 2 rho s1 s2)) - 1/2].
[[nodiscard]] MomentSummary two_dim_normal(double mu1, double mu2, double sigma1, double sigma2, double rho12);

/// MD = chi(mu), MRL = varrho_{n-1}(||P mu|| / (sigma sqrt(1 - rho))), and the
/// closed-form cov(chi(Z)). Throws UndefinedDirectionError when mu is in <1>.
[[nodiscard]] MomentSummary md_mrl_homoscedastic(const HomoscedasticModel& model,
                                                 const specfun::SeriesControl& ctl = {});

/// cov(xi/||xi||) for xi ~ N((x, 0, ..., 0), I_n) scaled so that x = ||nu||/lambda:
/// diag(f_n(x), g_n(x), ..., g_n(x)).
[[nodiscard]] Matrix projected_cov_canonical(int n, double x, const specfun::SeriesControl& ctl = {});

/// cov(chi(Z)) = (f - g) chi(mu) chi(mu)^T + g P with f, g evaluated at
/// order n-1 and x = ||P mu|| / (sigma sqrt(1 - rho)). For mu in <1> this is
/// the isotropic P / (n-1).
[[nodiscard]] Matrix cov_chi_homoscedastic(const HomoscedasticModel& model, const specfun::SeriesControl& ctl = {});

/// E[T(theta)] = mrl <theta, md>.
[[nodiscard]] double expectation_T(const UnitDirection& theta, const MomentSummary& summary);

/// var(T(theta)) = theta^T cov_chi theta (clamped at 0 against roundoff).
[[nodiscard]] double variance_T(const UnitDirection& theta, const Matrix& cov_chi);

/// [f - g] (chi(mu)^T theta)^2 + g, evaluated without forming the covariance.
/// mu in <1> gives the isotropic 1/(n-1).
[[nodiscard]] double variance_T_homoscedastic(const UnitDirection& theta, const HomoscedasticModel& model,
                                              const specfun::SeriesControl& ctl = {});

/// Homoscedastic approximation of a general Gaussian: sigma_hat is the root
/// mean variance, rho_hat the mean pairwise correlation.
struct HomoscedasticFit {
  double centered_norm = 0.0;  ///< ||P mu||
  double sigma_hat = 0.0;
  double rho_hat = 0.0;

  /// ||P mu|| / (sigma_hat sqrt(1 - rho_hat))
  [[nodiscard]] double concentration() const;
};

[[nodiscard]] HomoscedasticFit fit_homoscedastic(const GaussianModel& model);

/// The fit with ||P mu||, sigma_hat and rho_hat each rounded half-away to
/// `decimals` places, as when the chain is evaluated from printed values.
[[nodiscard]] HomoscedasticFit round_fit(const HomoscedasticFit& fit, int decimals);

/// Rounds half-away-from-zero to `decimals` places.
[[nodiscard]] double round_to(double v, int decimals);

}  // namespace cudir
