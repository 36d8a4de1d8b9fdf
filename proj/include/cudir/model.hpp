#pragma once

#include <span>
#include <vector>

#include "cudir/linalg.hpp"

namespace cudir {

/// Z ~ N(mu, cov) with cov symmetric positive definite. The Cholesky factor
/// is computed once at construction and doubles as the PD check.
class GaussianModel {
 public:
  /// Throws ModelError (cov not symmetric within 1e-12 or not PD, non-finite
  /// mu) and DimensionError (shape mismatch, n < 2).
  GaussianModel(std::vector<double> mu, Matrix cov);

  [[nodiscard]] std::size_t dim() const noexcept { return mu_.size(); }
  [[nodiscard]] std::span<const double> mu() const noexcept { return mu_; }
  [[nodiscard]] const Matrix& cov() const noexcept { return cov_; }
  [[nodiscard]] const Matrix& cholesky_factor() const noexcept { return chol_; }

 private:
  std::vector<double> mu_;
  Matrix cov_;
  Matrix chol_;
};

/// Z ~ N(mu, sigma^2 Xi) where Xi has unit diagonal and constant
/// off-diagonal rho. Positive definiteness of Xi needs
/// -1/(n-1) < rho < 1, which is what the constructor enforces.
class HomoscedasticModel {
 public:
  /// Throws ModelError (sigma <= 0, rho outside the PD range, non-finite
  /// input) and DimensionError (n < 2).
  HomoscedasticModel(std::vector<double> mu, double sigma, double rho);

  [[nodiscard]] std::size_t dim() const noexcept { return mu_.size(); }
  [[nodiscard]] std::span<const double> mu() const noexcept { return mu_; }
  [[nodiscard]] double sigma() const noexcept { return sigma_; }
  [[nodiscard]] double rho() const noexcept { return rho_; }

  /// ||P mu||
  [[nodiscard]] double centered_norm() const;
  /// ||P mu|| / (sigma sqrt(1 - rho)), the argument of varrho / f_var / g_var.
  [[nodiscard]] double concentration() const;
  /// sigma^2 Xi
  [[nodiscard]] Matrix covariance() const;
  [[nodiscard]] GaussianModel to_gaussian() const;

 private:
  std::vector<double> mu_;
  double sigma_;
  double rho_;
};

}  // namespace cudir
