#include "cudir/model.hpp"

#include <algorithm>
#include <cmath>

#include "cudir/error.hpp"
#include "cudir/sphere.hpp"

namespace cudir {

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

GaussianModel::GaussianModel(std::vector<double> mu, Matrix cov) : mu_(std::move(mu)), cov_(std::move(cov)) {
  if (mu_.size() < 2) throw DimensionError("GaussianModel needs dimension >= 2");
  if (cov_.rows() != mu_.size() || cov_.cols() != mu_.size())
    throw DimensionError("GaussianModel covariance shape does not match mean");
  if (!all_finite(mu_) || !all_finite(cov_.data())) throw ModelError("GaussianModel has non-finite parameters");
  double largest = 0.0;
  for (double v : cov_.data()) largest = std::max(largest, std::abs(v));
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = i + 1; j < dim(); ++j)
      if (std::abs(cov_(i, j) - cov_(j, i)) > 1e-12 * std::max(1.0, largest))
        throw ModelError("GaussianModel covariance is not symmetric");
  auto l = cholesky(cov_);
  if (!l) throw ModelError("GaussianModel covariance is not positive definite");
  chol_ = std::move(*l);
}

HomoscedasticModel::HomoscedasticModel(std::vector<double> mu, double sigma, double rho)
    : mu_(std::move(mu)), sigma_(sigma), rho_(rho) {
  if (mu_.size() < 2) throw DimensionError("HomoscedasticModel needs dimension >= 2");
  if (!all_finite(mu_) || !std::isfinite(sigma_) || !std::isfinite(rho_))
    throw ModelError("HomoscedasticModel has non-finite parameters");
  if (!(sigma_ > 0.0)) throw ModelError("HomoscedasticModel needs sigma > 0");
  const double n = static_cast<double>(mu_.size());
  if (!(1.0 - rho_ > 0.0) || !(1.0 + (n - 1.0) * rho_ > 0.0))
    throw ModelError("HomoscedasticModel needs -1/(n-1) < rho < 1 for a positive definite correlation matrix");
}

double HomoscedasticModel::centered_norm() const { return norm(center(mu_)); }

double HomoscedasticModel::concentration() const { return centered_norm() / (sigma_ * std::sqrt(1.0 - rho_)); }

Matrix HomoscedasticModel::covariance() const {
  const std::size_t n = dim();
  const double s2 = sigma_ * sigma_;
  Matrix c(n, n, s2 * rho_);
  for (std::size_t i = 0; i < n; ++i) c(i, i) = s2;
  return c;
}

GaussianModel HomoscedasticModel::to_gaussian() const { return {mu_, covariance()}; }

}  // namespace cudir
