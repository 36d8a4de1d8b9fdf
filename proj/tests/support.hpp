#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

#include "cudir/io.hpp"
#include "cudir/linalg.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return CUDIR_TEST_DATA_DIR; }

inline cudir::io::ParameterFixture ten_asset() {
  return cudir::io::load_parameter_fixture(data_dir() / "ten_asset_params.json");
}

// Independent generator for test inputs, so fixtures never depend on the
// library's own stream.
inline std::vector<double> normal_vector(std::mt19937_64& rng, std::size_t n, double sd = 1.0) {
  std::normal_distribution<double> d(0.0, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// A A^T / n + eps I for Gaussian A.
inline cudir::Matrix random_spd(std::mt19937_64& rng, std::size_t n, double eps = 0.1) {
  cudir::Matrix a(n, n);
  std::normal_distribution<double> d(0.0, 1.0);
  for (auto& x : a.data()) x = d(rng);
  cudir::Matrix s = a * a.transposed();
  s *= 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) s(i, i) += eps;
  return s;
}

inline cudir::Matrix centering(std::size_t n) {
  cudir::Matrix p = cudir::Matrix::identity(n);
  for (auto& x : p.data()) x -= 1.0 / static_cast<double>(n);
  return p;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace testing

#include "cudir/model.hpp"
#include "cudir/sphere.hpp"

namespace testing {

// Moments of chi(Z) (or Z / ||Z||) for Z ~ N(mu, cov), from an independent
// sampler. Two passes over identically seeded engines: the mean first, then
// centered products, so the standard errors are those of the centered
// estimator.
struct IndependentMoments {
  std::vector<double> mean, mean_se;
  cudir::Matrix cov, cov_se;
  double mrl = 0.0;
};

inline IndependentMoments independent_moments(const cudir::GaussianModel& model, std::size_t count,
                                              std::uint64_t seed, bool chi = true) {
  const std::size_t n = model.dim();
  const cudir::Matrix& l = model.cholesky_factor();
  auto draw = [&](std::mt19937_64& rng, std::normal_distribution<double>& nd, std::vector<double>& x) {
    std::vector<double> e(n);
    for (auto& v : e) v = nd(rng);
    for (std::size_t i = 0; i < n; ++i) {
      double s = model.mu()[i];
      for (std::size_t k = 0; k <= i; ++k) s += l(i, k) * e[k];
      x[i] = s;
    }
    if (chi) {
      const auto u = cudir::standardize(x);
      std::copy(u.coords().begin(), u.coords().end(), x.begin());
    } else {
      const double len = cudir::norm(x);
      for (auto& v : x) v /= len;
    }
  };
  IndependentMoments out;
  out.mean.assign(n, 0.0);
  out.mean_se.assign(n, 0.0);
  std::vector<double> x(n);
  {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    for (std::size_t t = 0; t < count; ++t) {
      draw(rng, nd, x);
      for (std::size_t i = 0; i < n; ++i) out.mean[i] += x[i];
    }
  }
  for (auto& m : out.mean) m /= static_cast<double>(count);
  cudir::Matrix s2(n, n), s4(n, n);
  {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    for (std::size_t t = 0; t < count; ++t) {
      draw(rng, nd, x);
      for (std::size_t i = 0; i < n; ++i) x[i] -= out.mean[i];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const double p = x[i] * x[j];
          s2(i, j) += p;
          s4(i, j) += p * p;
        }
    }
  }
  const double nn = static_cast<double>(count);
  out.cov = cudir::Matrix(n, n);
  out.cov_se = cudir::Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double c = s2(i, j) / nn;
      out.cov(i, j) = c;
      out.cov_se(i, j) = std::sqrt(std::max(0.0, s4(i, j) / nn - c * c) / nn);
    }
  for (std::size_t i = 0; i < n; ++i) out.mean_se[i] = std::sqrt(out.cov(i, i) / nn);
  out.mrl = cudir::norm(out.mean);
  return out;
}

}  // namespace testing
