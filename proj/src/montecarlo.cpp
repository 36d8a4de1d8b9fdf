#include "cudir/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "cudir/error.hpp"

namespace cudir {

Matrix sample_block(const GaussianModel& model, std::size_t rows, SeededStream stream) {
  const std::size_t n = model.dim();
  const Matrix& l = model.cholesky_factor();
  const auto mu = model.mu();
  RandomStream rng(stream);
  Matrix out(rows, n);
  std::vector<double> e(n);
  for (std::size_t r = 0; r < rows; ++r) {
    for (double& v : e) v = rng.next_normal();
    auto row = out.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      double s = mu[i];
      for (std::size_t k = 0; k <= i; ++k) s += l(i, k) * e[k];
      row[i] = s;
    }
  }
  return out;
}

Matrix sample_mvn(const GaussianModel& model, std::size_t count, SeededStream stream, unsigned threads) {
  if (count == 0) throw DimensionError("sample_mvn: count must be >= 1");
  auto blocks = map_blocks(model, count, stream, threads, [](const Matrix& m, std::size_t) { return m; });
  Matrix out(count, model.dim());
  std::size_t r = 0;
  for (const Matrix& b : blocks) {
    std::copy(b.data().begin(), b.data().end(), out.row(r).begin());
    r += b.rows();
  }
  return out;
}

namespace {

void check_unit_row(std::span<const double> x) {
  const double len = norm(x);
  const double sum = std::accumulate(x.begin(), x.end(), 0.0);
  if (!(std::abs(len - 1.0) <= kUnitDirectionTol) || !(std::abs(sum) <= kUnitDirectionTol))
    throw DomainError("DirectionalSample: row is not on the constrained unit sphere");
}

}  // namespace

DirectionalSample::DirectionalSample(Matrix points) : points_(std::move(points)) {
  if (points_.rows() < 1) throw DimensionError("DirectionalSample needs at least one point");
  if (points_.cols() < 2) throw DimensionError("DirectionalSample needs dimension >= 2");
  for (std::size_t i = 0; i < points_.rows(); ++i) check_unit_row(points_.row(i));
}

DirectionalSample DirectionalSample::from_directions(std::span<const UnitDirection> points) {
  if (points.empty()) throw DimensionError("DirectionalSample needs at least one point");
  Matrix m(points.size(), points.front().dim());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].dim() != m.cols()) throw DimensionError("DirectionalSample: mixed dimensions");
    std::copy(points[i].coords().begin(), points[i].coords().end(), m.row(i).begin());
  }
  return DirectionalSample(std::move(m));
}

DirectionalSample DirectionalSample::subset(std::span<const std::size_t> rows) const {
  Matrix m(rows.size(), dim());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= size()) throw DimensionError("DirectionalSample::subset index out of range");
    std::copy(point(rows[i]).begin(), point(rows[i]).end(), m.row(i).begin());
  }
  return DirectionalSample(std::move(m));
}

DirectionalSample standardize_rows(const Matrix& z) {
  Matrix out(z.rows(), z.cols());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    const UnitDirection x = standardize(z.row(i));
    std::copy(x.coords().begin(), x.coords().end(), out.row(i).begin());
  }
  return DirectionalSample(std::move(out));
}

namespace {

std::vector<double> column_means(const Matrix& m) {
  std::vector<double> mean(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) mean[j] += m(i, j);
  for (double& v : mean) v /= static_cast<double>(m.rows());
  return mean;
}

}  // namespace

MomentSummary estimate_md_mrl(const DirectionalSample& sample) {
  const auto mean = column_means(sample.points());
  const double mrl = norm(mean);
  if (mrl <= 1e-12) throw UndefinedDirectionError("estimate_md_mrl: zero resultant, mean direction undefined", mrl);
  std::optional<Matrix> cov;
  if (sample.size() >= 2) cov = estimate_cov(sample);
  return {standardize(mean), std::min(mrl, 1.0), std::move(cov)};
}

Matrix estimate_cov(const DirectionalSample& sample) {
  if (sample.size() < 2) throw DimensionError("estimate_cov needs at least two points");
  const std::size_t n = sample.dim();
  const auto mean = column_means(sample.points());
  Matrix c(n, n);
  std::vector<double> d(n);
  for (std::size_t t = 0; t < sample.size(); ++t) {
    const auto x = sample.point(t);
    for (std::size_t i = 0; i < n; ++i) d[i] = x[i] - mean[i];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) c(i, j) += d[i] * d[j];
  }
  const double inv = 1.0 / static_cast<double>(sample.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) c(j, i) = c(i, j) = c(i, j) * inv;
  return c;
}

Matrix scatter_matrix(const DirectionalSample& sample) {
  const std::size_t n = sample.dim();
  Matrix c(n, n);
  for (std::size_t t = 0; t < sample.size(); ++t) {
    const auto x = sample.point(t);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) c(i, j) += x[i] * x[j];
  }
  const double inv = 1.0 / static_cast<double>(sample.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) c(j, i) = c(i, j) = c(i, j) * inv;
  return c;
}

Bandwidth Bandwidth::fixed(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("Bandwidth::fixed needs h > 0");
  return Bandwidth(h);
}

namespace {

/// Linear-interpolation quantile of sorted data (R type 7).
double sorted_quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

constexpr double kKernelCutoff = 8.0;  // in bandwidths; exp(-32) is below double resolution of the sum

}  // namespace

DensityEstimate kde(std::span<const double> values, Bandwidth bandwidth) {
  if (values.size() < 2) throw DimensionError("kde needs at least two values");
  if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); }))
    throw DomainError("kde: non-finite value");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : sorted) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));

  double h = bandwidth.value();
  if (bandwidth.is_automatic()) {
    if (!(sd > 0.0)) throw DegenerateInputError("kde: input has zero variance");
    const double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd;
    h = 0.9 * spread * std::pow(n, -0.2);
  }

  DensityEstimate out;
  out.bandwidth = h;
  out.grid.resize(kDensityGridPoints);
  out.density.resize(kDensityGridPoints);
  const double lo = sorted.front() - 3.0 * h;
  const double hi = sorted.back() + 3.0 * h;
  const double step = (hi - lo) / static_cast<double>(kDensityGridPoints - 1);
  const double norm_const = 1.0 / (n * h * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t g = 0; g < kDensityGridPoints; ++g) {
    const double x = lo + step * static_cast<double>(g);
    out.grid[g] = x;
    const auto first = std::lower_bound(sorted.begin(), sorted.end(), x - kKernelCutoff * h);
    const auto last = std::upper_bound(first, sorted.end(), x + kKernelCutoff * h);
    double s = 0.0;
    for (auto it = first; it != last; ++it) {
      const double u = (x - *it) / h;
      s += std::exp(-0.5 * u * u);
    }
    out.density[g] = s * norm_const;
  }
  return out;
}

double integrate(const DensityEstimate& d) {
  double s = 0.0;
  for (std::size_t i = 1; i < d.grid.size(); ++i)
    s += 0.5 * (d.density[i] + d.density[i - 1]) * (d.grid[i] - d.grid[i - 1]);
  return s;
}

namespace {

/// Sum of chi(z) over the rows of a block.
std::vector<double> chi_sum(const Matrix& block) {
  std::vector<double> s(block.cols(), 0.0);
  for (std::size_t r = 0; r < block.rows(); ++r) {
    const UnitDirection x = standardize(block.row(r));
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += x[i];
  }
  return s;
}

/// Mean direction of chi(Z) over count draws, reduced in block order.
std::pair<UnitDirection, double> simulated_mean_direction(const GaussianModel& model, std::size_t count,
                                                          SeededStream stream, unsigned threads) {
  const auto partial = map_blocks(model, count, stream, threads, [](const Matrix& b, std::size_t) { return chi_sum(b); });
  std::vector<double> total(model.dim(), 0.0);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += p[i];
  for (double& v : total) v /= static_cast<double>(count);
  const double mrl = norm(total);
  if (mrl <= 1e-12) throw UndefinedDirectionError("simulated resultant is zero", mrl);
  return {standardize(total), mrl};
}

}  // namespace

IcDistribution ic_distribution(const GaussianModel& model, ThetaMode mode, std::size_t count, SeededStream stream,
                               unsigned threads) {
  if (count == 0) throw DimensionError("ic_distribution: count must be >= 1");
  UnitDirection theta = [&] {
    if (mode == ThetaMode::sample_md) return simulated_mean_direction(model, count, stream, threads).first;
    try {
      return standardize(model.mu());
    } catch (const DegenerateInputError&) {
      throw UndefinedDirectionError("ic_distribution: chi(mu) undefined, mu is constant across components", 0.0);
    }
  }();
  const auto parts = map_blocks(model, count, stream, threads, [&theta](const Matrix& b, std::size_t) {
    std::vector<double> t(b.rows());
    for (std::size_t r = 0; r < b.rows(); ++r) t[r] = std::clamp(dot(theta, standardize(b.row(r))), -1.0, 1.0);
    return t;
  });
  std::vector<double> values;
  values.reserve(count);
  for (const auto& p : parts) values.insert(values.end(), p.begin(), p.end());
  DensityEstimate density = kde(values);
  return {std::move(theta), std::move(values), std::move(density)};
}

std::vector<PerturbationPoint> md_perturbation_experiment(std::span<const double> base_mu, const Matrix& base_cov,
                                                          PerturbAxis axis, std::span<const double> factors,
                                                          std::size_t count, SeededStream stream, unsigned threads) {
  if (base_mu.size() != 3 || base_cov.rows() != 3 || base_cov.cols() != 3)
    throw DimensionError("md_perturbation_experiment works on 3-dimensional inputs");
  if (count == 0) throw DimensionError("md_perturbation_experiment: count must be >= 1");
  std::vector<PerturbationPoint> out;
  for (double k : factors) {
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("md_perturbation_experiment: factors must be positive");
    std::vector<double> mu(base_mu.begin(), base_mu.end());
    Matrix cov = base_cov;
    if (axis == PerturbAxis::mu1) {
      mu[0] *= k;
    } else {
      for (std::size_t j = 0; j < 3; ++j) {
        cov(0, j) *= k;
        cov(j, 0) *= k;
      }
    }
    const GaussianModel model(mu, cov);
    auto [md, mrl] = simulated_mean_direction(model, count, stream, threads);
    UnitDirection chi_mu = standardize(mu);
    const double angle = angle_degrees(md, chi_mu);
    out.push_back({k, std::move(md), std::move(chi_mu), angle, mrl});
  }
  return out;
}

MonteCarloMoments mc_moments(const GaussianModel& model, Projection projection, std::size_t count,
                             SeededStream stream, unsigned threads) {
  if (count < 2) throw DimensionError("mc_moments: count must be >= 2");
  const std::size_t n = model.dim();
  auto project = [projection](std::span<const double> z, std::vector<double>& x) {
    if (projection == Projection::chi) {
      const UnitDirection u = standardize(z);
      std::copy(u.coords().begin(), u.coords().end(), x.begin());
    } else {
      const double len = norm(z);
      if (!(len > 0.0)) throw DegenerateInputError("mc_moments: zero draw cannot be unitized");
      for (std::size_t i = 0; i < z.size(); ++i) x[i] = z[i] / len;
    }
  };

  const auto sums = map_blocks(model, count, stream, threads, [&](const Matrix& b, std::size_t) {
    std::vector<double> s(n, 0.0), x(n);
    for (std::size_t r = 0; r < b.rows(); ++r) {
      project(b.row(r), x);
      for (std::size_t i = 0; i < n; ++i) s[i] += x[i];
    }
    return s;
  });
  const double inv = 1.0 / static_cast<double>(count);
  std::vector<double> mean(n, 0.0);
  for (const auto& s : sums)
    for (std::size_t i = 0; i < n; ++i) mean[i] += s[i];
  for (double& v : mean) v *= inv;

  struct Second {
    Matrix products;
    Matrix squares;
  };
  const auto seconds = map_blocks(model, count, stream, threads, [&](const Matrix& b, std::size_t) {
    Second acc{Matrix(n, n), Matrix(n, n)};
    std::vector<double> x(n);
    for (std::size_t r = 0; r < b.rows(); ++r) {
      project(b.row(r), x);
      for (std::size_t i = 0; i < n; ++i) x[i] -= mean[i];
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
          const double p = x[i] * x[j];
          acc.products(i, j) += p;
          acc.squares(i, j) += p * p;
        }
    }
    return acc;
  });

  MonteCarloMoments out;
  out.count = count;
  out.cov = Matrix(n, n);
  out.cov_se = Matrix(n, n);
  Matrix squares(n, n);
  for (const auto& s : seconds) {
    out.cov += s.products;
    squares += s.squares;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double c = out.cov(i, j) * inv;
      const double var = std::max(0.0, squares(i, j) * inv - c * c);
      out.cov(i, j) = out.cov(j, i) = c;
      out.cov_se(i, j) = out.cov_se(j, i) = std::sqrt(var * inv);
    }
  out.mean = mean;
  out.mean_se.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.mean_se[i] = std::sqrt(std::max(0.0, out.cov(i, i)) * inv);
  out.mrl = norm(mean);
  if (out.mrl > 0.0) {
    std::vector<double> dir(mean);
    for (double& v : dir) v /= out.mrl;
    out.mrl_se = std::sqrt(std::max(0.0, quadratic_form(out.cov, dir)) * inv);
  } else {
    out.mrl_se = std::sqrt(out.cov.trace() * inv);
  }
  return out;
}

}  // namespace cudir
