#include "cudir/optimize.hpp"

#include <cmath>

#include "cudir/error.hpp"

namespace cudir {

OptimizationResult max_expectation(const MomentSummary& summary) {
  if (!(summary.mrl > 0.0)) throw NoUniqueSolutionError("max_expectation: mrl is 0, every direction is optimal");
  return {summary.md, summary.mrl, 1, false};
}

OptimizationResult min_variance(const Matrix& cov_chi) {
  if (!cov_chi.square() || cov_chi.rows() < 2) throw DimensionError("min_variance needs a square matrix, n >= 2");
  if (!is_symmetric(cov_chi, 1e-10)) throw DimensionError("min_variance: matrix is not symmetric");
  const std::size_t n = cov_chi.rows();
  const std::vector<double> ones(n, 1.0);
  const double scale = frobenius_norm(cov_chi);
  if (norm(cov_chi * std::span<const double>(ones)) > 1e-8 * scale)
    throw NotChiCovarianceError("min_variance: matrix does not annihilate the ones vector");

  // Restrict to <1>^perp: the first n-1 Helmert columns are an orthonormal basis.
  const Matrix v = helmert_v(n);
  const Matrix rotated = v.transposed() * cov_chi * v;
  Matrix block(n - 1, n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = 0; j + 1 < n; ++j) block(i, j) = 0.5 * (rotated(i, j) + rotated(j, i));
  const SymmetricEigen eig = symmetric_eigen(block);

  const double best = eig.values.front();
  const double tie = 1e-10 * std::max(1.0, scale);
  int multiplicity = 0;
  for (double l : eig.values)
    if (l - best <= tie) ++multiplicity;

  std::vector<double> theta(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k + 1 < n; ++k) theta[i] += v(i, k) * eig.vectors(k, 0);
  const double len = norm(theta);
  double sum = 0.0;
  for (double& t : theta) {
    t /= len;
    sum += t;
  }
  // Remove the residual component along 1 left by rounding.
  const double mean = sum / static_cast<double>(n);
  for (double& t : theta) t -= mean;
  normalize_sign(theta);
  return {standardize(theta), std::max(0.0, best), multiplicity, false};
}

RiskAversion RiskAversion::finite(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("RiskAversion: lambda must be finite and >= 0");
  return RiskAversion(lambda, false);
}

OptimizationResult mean_variance_homoscedastic(const HomoscedasticModel& model, RiskAversion lambda,
                                               const specfun::SeriesControl& ctl) {
  UnitDirection theta = [&] {
    try {
      return standardize(model.mu());
    } catch (const DegenerateInputError&) {
      throw UndefinedDirectionError("mean_variance_homoscedastic: mu is constant across components", 0.0);
    }
  }();
  const int order = static_cast<int>(model.dim()) - 1;
  const double x = model.concentration();
  const double f = specfun::f_var(order, x, ctl);
  if (lambda.is_infinite()) return {std::move(theta), f, 1, true};
  const double r = specfun::varrho(order, x, ctl);
  return {std::move(theta), r - lambda.value() * f, 1, false};
}

}  // namespace cudir
