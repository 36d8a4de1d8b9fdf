#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cudir/error.hpp"
#include "cudir/model.hpp"
#include "cudir/sphere.hpp"
#include "support.hpp"

using namespace cudir;

namespace {
const double kHalfRoot2 = std::numbers::sqrt2 / 2.0;
}

TEST_CASE("center") {
  CHECK(center(std::vector<double>{3, 1, 2}) == std::vector<double>{1, -1, 0});
  CHECK(center(std::vector<double>{1, 0}) == std::vector<double>{0.5, -0.5});
  for (double v : center(std::vector<double>{7.5, 7.5, 7.5, 7.5})) CHECK(v == 0.0);
  CHECK_THROWS_AS((void)center(std::vector<double>{1.0}), DimensionError);
}

TEST_CASE("standardize examples") {
  const auto a = standardize(std::vector<double>{1, 0});
  CHECK(a[0] == doctest::Approx(kHalfRoot2).epsilon(1e-15));
  CHECK(a[1] == doctest::Approx(-kHalfRoot2).epsilon(1e-15));
  const auto b = standardize(std::vector<double>{3, 1, 2});
  CHECK(std::abs(b[0] - kHalfRoot2) < 1e-15);
  CHECK(std::abs(b[1] + kHalfRoot2) < 1e-15);
  CHECK(b[2] == 0.0);
  CHECK_THROWS_AS((void)standardize(std::vector<double>{5, 5, 5}), DegenerateInputError);
  CHECK_THROWS_AS((void)standardize(std::vector<double>{0, 0}), DegenerateInputError);
}

TEST_CASE("UnitDirection validation") {
  CHECK_NOTHROW((void)UnitDirection::from_coords({kHalfRoot2, -kHalfRoot2}));
  CHECK_THROWS_AS((void)UnitDirection::from_coords({1.0, 0.0}), DomainError);
  CHECK_THROWS_AS((void)UnitDirection::from_coords({0.6, -0.6}), DomainError);
  CHECK_THROWS_AS((void)UnitDirection::from_coords({1.0}), DimensionError);
}

TEST_CASE("standardize is idempotent and affine invariant") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 2 + k % 9;
    auto z = testing::normal_vector(rng, n);
    const auto x = standardize(z);
    const auto again = standardize(x.coords());
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(again[i] - x[i]) < 1e-12);

    double a = u(rng);
    if (std::abs(a) < 1e-3) a = 1.0;
    const double b = u(rng);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = a * z[i] + b;
    const auto y = standardize(w);
    const double s = a > 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y[i] - s * x[i]) < 1e-10);
  }
}

TEST_CASE("in two dimensions the image is the two-point set") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 200; ++k) {
    const auto z = testing::normal_vector(rng, 2);
    const auto x = standardize(z);
    const double s = z[0] > z[1] ? 1.0 : -1.0;
    CHECK(std::abs(x[0] - s * kHalfRoot2) < 1e-12);
    CHECK(std::abs(x[1] + s * kHalfRoot2) < 1e-12);
  }
}

TEST_CASE("helmert_v entries and orthogonality") {
  const Matrix v2 = helmert_v(2);
  CHECK(std::abs(v2(0, 0) - 1 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(v2(0, 1) - 1 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(v2(1, 0) + 1 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(v2(1, 1) - 1 / std::sqrt(2.0)) < 1e-15);

  for (std::size_t n : {2u, 3u, 5u, 10u, 57u}) {
    const Matrix v = helmert_v(n);
    CHECK(max_abs_diff(v.transposed() * v, Matrix::identity(n)) < 1e-13);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(v(i, n - 1) - 1.0 / std::sqrt(double(n))) < 1e-15);
    // entry formula, 1-based j
    for (std::size_t j = 1; j < n; ++j) {
      const double m = static_cast<double>(n - j);
      const double d = std::sqrt(m * (m + 1.0));
      for (std::size_t i = 1; i <= n; ++i) {
        const double want = i == j ? m / d : (i > j ? -1.0 / d : 0.0);
        CHECK(std::abs(v(i - 1, j - 1) - want) < 1e-15);
      }
    }
  }
  const Matrix v5 = helmert_v(5);
  Matrix block = Matrix::identity(5);
  block(4, 4) = 0.0;
  CHECK(max_abs_diff(v5.transposed() * testing::centering(5) * v5, block) < 1e-13);
  CHECK_THROWS_AS((void)helmert_v(1), DimensionError);
}

TEST_CASE("representation for identity and equicorrelated covariance") {
  const GaussianModel id({1.0, 2.0, 0.5, -1.0}, Matrix::identity(4));
  const auto r = build_representation(id);
  for (double l : r.lambda()) CHECK(std::abs(l - 1.0) < 1e-12);

  const HomoscedasticModel hm({0.3, -0.2, 0.1, 0.4, 0.0}, 1.7, 0.35);
  const auto rh = build_representation(hm.to_gaussian());
  for (double l : rh.lambda()) CHECK(std::abs(l - 1.7 * 1.7 * 0.65) < 1e-12);
}

TEST_CASE("representation properties for random covariances") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 19);
    const GaussianModel model(testing::normal_vector(rng, n), testing::random_spd(rng, n));
    const auto rep = build_representation(model);
    const Matrix& u = rep.u();
    CHECK(max_abs_diff(u.transposed() * u, Matrix::identity(n)) < 1e-10);
    Matrix block = Matrix::identity(n);
    block(n - 1, n - 1) = 0.0;
    CHECK(max_abs_diff(u.transposed() * testing::centering(n) * u, block) < 1e-10);
    const Matrix c = u.transposed() * model.cov() * u;
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = 0; j + 1 < n; ++j)
        CHECK(std::abs(c(i, j) - (i == j ? rep.lambda()[i] : 0.0)) < 1e-10);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(u(i, n - 1) - 1.0 / std::sqrt(double(n))) < 1e-12);
    for (double l : rep.lambda()) CHECK(l >= 0.0);
    for (std::size_t i = 1; i < rep.lambda().size(); ++i) CHECK(rep.lambda()[i - 1] >= rep.lambda()[i]);

    // nu is the reduced mean, and chi(z) = U xi / ||xi||
    const auto xi_mu = rep.reduce(model.mu());
    for (std::size_t i = 0; i + 1 < n; ++i) CHECK(std::abs(xi_mu[i] - rep.nu()[i]) < 1e-12);
    const auto z = testing::normal_vector(rng, n);
    auto xi = rep.reduce(z);
    CHECK(xi[n - 1] == 0.0);
    const double len = norm(xi);
    for (auto& v : xi) v /= len;
    const auto back = rep.rotate_back(xi);
    const auto x = standardize(z);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(back[i] - x[i]) < 1e-12);
  }
}

TEST_CASE("support surface area") {
  CHECK(std::abs(support_surface_area(10) / 32.0 - 1.0) < 0.02);
  CHECK(std::abs(support_surface_area(100) / 3.7e-37 - 1.0) < 0.05);
  CHECK(std::abs(support_surface_area(4) - 2.0 * std::numbers::pi) < 1e-13);
  CHECK_THROWS_AS((void)support_surface_area(2), DimensionError);
}
