#pragma once

#include "cudir/linalg.hpp"
#include "cudir/model.hpp"
#include "cudir/moments.hpp"
#include "cudir/specfun.hpp"
#include "cudir/sphere.hpp"

namespace cudir {

struct OptimizationResult {
  UnitDirection theta_star;
  double value = 0.0;
  /// Multiplicity of the optimal eigenvalue (1 when not applicable).
  int multiplicity = 1;
  /// Set for the lambda = infinity mean-variance problem, where value is the
  /// minimal variance rather than a mean-minus-penalty objective.
  bool variance_only = false;
};

/// argmax over the constrained sphere of E[T(theta)]: the mean direction,
/// attaining the mean resultant length. Throws NoUniqueSolutionError for mrl 0.
[[nodiscard]] OptimizationResult max_expectation(const MomentSummary& summary);

/// argmin over the constrained sphere of theta^T C theta for a covariance of
/// standardized returns (C 1 = 0). The value is the second smallest
/// eigenvalue of C; the minimizer is computed in <1>^perp through the
/// Helmert basis, so it is orthogonal to 1 by construction. Ties are
/// reported through multiplicity and resolved to the lowest-index
/// eigenvector. Throws NotChiCovarianceError when ||C 1|| > 1e-8 ||C||_F.
[[nodiscard]] OptimizationResult min_variance(const Matrix& cov_chi);

/// Risk-aversion weight for the mean-variance problem; infinity is an
/// explicit state, not a large number.
class RiskAversion {
 public:
  [[nodiscard]] static RiskAversion finite(double lambda);
  [[nodiscard]] static RiskAversion infinite() noexcept { return RiskAversion(0.0, true); }

  [[nodiscard]] bool is_infinite() const noexcept { return infinite_; }
  [[nodiscard]] double value() const noexcept { return value_; }

 private:
  RiskAversion(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

/// max E[T] - lambda var(T) in the equicorrelated normal family: the
/// maximizer is chi(mu) for every lambda, with value varrho - lambda f at
/// order n-1 (or f alone, flagged variance_only, for lambda = infinity).
/// Throws UndefinedDirectionError when mu is in <1>.
[[nodiscard]] OptimizationResult mean_variance_homoscedastic(const HomoscedasticModel& model, RiskAversion lambda,
                                                             const specfun::SeriesControl& ctl = {});

}  // namespace cudir
