#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cudir/error.hpp"
#include "cudir/optimize.hpp"
#include "cudir/specfun.hpp"
#include "support.hpp"

using namespace cudir;

namespace {

// P A P for a random SPD A: a valid covariance of standardized returns.
Matrix random_chi_cov(std::mt19937_64& rng, std::size_t n) {
  const Matrix p = testing::centering(n);
  return p * testing::random_spd(rng, n) * p;
}

UnitDirection random_theta(std::mt19937_64& rng, std::size_t n) { return standardize(testing::normal_vector(rng, n)); }

}  // namespace

TEST_CASE("max_expectation") {
  const auto fx = testing::ten_asset();
  const HomoscedasticModel m(fx.mu10, 0.0224, 0.1243);
  const auto s = md_mrl_homoscedastic(m);
  const auto r = max_expectation(s);
  CHECK(r.theta_star == s.md);
  CHECK(r.value == s.mrl);
  CHECK(std::abs(r.value - expectation_T(r.theta_star, s)) < 1e-15);
  CHECK(std::abs(r.value - 0.0414) < 1e-3);

  MomentSummary zero{s.md, 0.0, std::nullopt};
  CHECK_THROWS_AS((void)max_expectation(zero), NoUniqueSolutionError);

  std::mt19937_64 rng(8);
  for (int k = 0; k < 100000; ++k) CHECK(expectation_T(random_theta(rng, 10), s) <= r.value);
}

TEST_CASE("min_variance on the isotropic covariance") {
  for (std::size_t n : {3u, 5u, 8u}) {
    const auto r = min_variance(testing::centering(n) * (1.0 / (n - 1)));
    CHECK(std::abs(r.value - 1.0 / (n - 1)) < 1e-14);
    CHECK(r.multiplicity == static_cast<int>(n - 1));
  }
}

TEST_CASE("min_variance on homoscedastic covariances") {
  std::mt19937_64 rng(101);
  // f < g for every x > 0, so the chi(mu) branch is the only one reached
  for (int k = 0; k < 60; ++k) {
    const std::size_t n = 3 + static_cast<std::size_t>(k % 8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double lo = -1.0 / static_cast<double>(n - 1);
    const HomoscedasticModel m(testing::normal_vector(rng, n, 0.1 + 2.0 * u(rng)), 1.0,
                               lo + (0.9 - lo) * (0.05 + 0.9 * u(rng)));
    const double x = m.concentration();
    const double f = specfun::f_var(static_cast<int>(n) - 1, x);
    const double g = specfun::g_var(static_cast<int>(n) - 1, x);
    const Matrix c = cov_chi_homoscedastic(m);
    const auto r = min_variance(c);
    const auto chi = standardize(m.mu());
    CHECK(std::abs(r.value - std::min(f, g)) < 1e-10);
    CHECK(std::abs(r.value - variance_T(r.theta_star, c)) < 1e-10);
    REQUIRE(f < g);
    CHECK(std::abs(std::abs(dot(r.theta_star, chi)) - 1.0) < 1e-8);
    CHECK(r.multiplicity == 1);
  }
}

TEST_CASE("min_variance picks the orthogonal complement when g < f") {
  // hand-built (f - g) chi chi^T + g P with f > g
  const std::size_t n = 5;
  const auto chi = standardize(std::vector<double>{1, 0, 0, 0, 2});
  const double f = 0.3, g = 0.1;
  Matrix c = testing::centering(n) * g;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c(i, j) += (f - g) * chi[i] * chi[j];
  const auto r = min_variance(c);
  CHECK(std::abs(r.value - g) < 1e-14);
  CHECK(std::abs(dot(r.theta_star, chi)) < 1e-12);
  CHECK(r.multiplicity == static_cast<int>(n) - 2);
}

TEST_CASE("f < g away from the origin") {
  for (int n = 1; n <= 100; n += 7)
    for (double x : {0.05, 0.3, 1.0, 3.0, 10.0, 50.0})
      CHECK(specfun::f_var(n, x) < specfun::g_var(n, x));
}

TEST_CASE("min_variance against a dense grid on the n = 3 circle") {
  std::mt19937_64 rng(6);
  const std::vector<double> e1{std::sqrt(0.5), -std::sqrt(0.5), 0.0};
  const std::vector<double> e2{1 / std::sqrt(6.0), 1 / std::sqrt(6.0), -2 / std::sqrt(6.0)};
  for (int k = 0; k < 10; ++k) {
    const Matrix c = random_chi_cov(rng, 3);
    const auto r = min_variance(c);
    const int steps = 3600;
    double grid_min = 1e300;
    for (int s = 0; s < steps; ++s) {
      const double a = 2.0 * std::numbers::pi * s / steps;
      std::vector<double> t(3);
      for (int i = 0; i < 3; ++i) t[i] = std::cos(a) * e1[i] + std::sin(a) * e2[i];
      grid_min = std::min(grid_min, quadratic_form(c, t));
    }
    const auto e = symmetric_eigen(c);
    const double half_step = std::numbers::pi / steps;
    CHECK(r.value <= grid_min + 1e-12);
    CHECK(grid_min - r.value <= (e.values[2] - e.values[0]) * half_step * half_step + 1e-12);
  }
}

TEST_CASE("min_variance is a global minimum over random directions") {
  std::mt19937_64 rng(9);
  for (std::size_t n : {3u, 4u, 6u}) {
    const Matrix c = random_chi_cov(rng, n);
    const auto r = min_variance(c);
    double lowest = 1e300;
    for (int k = 0; k < 100000; ++k) lowest = std::min(lowest, variance_T(random_theta(rng, n), c));
    CHECK(lowest >= r.value - 1e-9);
  }
}

TEST_CASE("min_variance input checks") {
  CHECK_THROWS_AS((void)min_variance(Matrix::identity(4)), NotChiCovarianceError);
  CHECK_THROWS_AS((void)min_variance(Matrix::from_rows({{1, 0.5}, {0, 1}})), DimensionError);
}

TEST_CASE("mean-variance optimum does not depend on lambda") {
  const auto fx = testing::ten_asset();
  const HomoscedasticModel m(fx.mu10, 0.0224, 0.1243);
  const double x = m.concentration();
  const double rho = specfun::varrho(9, x);
  const double f = specfun::f_var(9, x);

  const auto base = mean_variance_homoscedastic(m, RiskAversion::finite(0.0));
  CHECK(base.theta_star == standardize(fx.mu10));
  CHECK(base.value == rho);
  for (double lambda : {0.5, 1.0, 10.0}) {
    const auto r = mean_variance_homoscedastic(m, RiskAversion::finite(lambda));
    CHECK(r.theta_star == base.theta_star);
    CHECK(std::abs(r.value - (rho - lambda * f)) < 1e-15);
    CHECK_FALSE(r.variance_only);
  }
  const auto inf = mean_variance_homoscedastic(m, RiskAversion::infinite());
  CHECK(inf.theta_star == base.theta_star);
  CHECK(inf.value == f);
  CHECK(inf.variance_only);

  CHECK_THROWS_AS((void)RiskAversion::finite(-1.0), DomainError);
  CHECK_THROWS_AS((void)mean_variance_homoscedastic(HomoscedasticModel({2, 2, 2}, 1.0, 0.0), RiskAversion::finite(1.0)),
                  UndefinedDirectionError);
}
