#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <type_traits>
#include <vector>

#include "cudir/linalg.hpp"
#include "cudir/model.hpp"
#include "cudir/moments.hpp"
#include "cudir/random.hpp"
#include "cudir/sphere.hpp"

namespace cudir {

/// Draws are generated in blocks of this many rows; block b of a request on
/// stream (seed, id) uses stream (seed, id + b). A long sample is therefore
/// exactly the concatenation of its blocks, whichever worker produced them.
inline constexpr std::size_t kBlockRows = 4096;

/// Default sample sizes.
inline constexpr std::size_t kDefaultDraws = 1'000'000;
inline constexpr std::size_t kOracleDraws = 10'000'000;

/// `rows` draws of N(mu, cov) from one stream: mu + L e with L the Cholesky
/// factor and e standard normal.
[[nodiscard]] Matrix sample_block(const GaussianModel& model, std::size_t rows, SeededStream stream);

/// Runs fn(block_rows, block_index) over the blocks of a count-draw sample
/// and returns the per-block results in block order. Workers only change
/// who computes a block, never its content, so any reduction performed in
/// the returned order is independent of `threads`.
template <class Fn>
auto map_blocks(const GaussianModel& model, std::size_t count, SeededStream stream, unsigned threads, Fn fn)
    -> std::vector<std::invoke_result_t<Fn&, const Matrix&, std::size_t>> {
  using Result = std::invoke_result_t<Fn&, const Matrix&, std::size_t>;
  const std::size_t blocks = (count + kBlockRows - 1) / kBlockRows;
  std::vector<Result> out(blocks);
  auto run_block = [&](std::size_t b) {
    const std::size_t rows = std::min(kBlockRows, count - b * kBlockRows);
    out[b] = fn(sample_block(model, rows, stream.derive(b)), b);
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    return out;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t b = w; b < blocks; b += workers) run_block(b);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

/// count x n matrix of draws. Throws DimensionError for count == 0.
[[nodiscard]] Matrix sample_mvn(const GaussianModel& model, std::size_t count, SeededStream stream,
                                unsigned threads = 1);

/// A materialized sample of points on the constrained sphere, one per row.
class DirectionalSample {
 public:
  /// Validates every row against the UnitDirection invariants.
  explicit DirectionalSample(Matrix points);
  [[nodiscard]] static DirectionalSample from_directions(std::span<const UnitDirection> points);

  [[nodiscard]] std::size_t size() const noexcept { return points_.rows(); }
  [[nodiscard]] std::size_t dim() const noexcept { return points_.cols(); }
  [[nodiscard]] std::span<const double> point(std::size_t i) const noexcept { return points_.row(i); }
  [[nodiscard]] const Matrix& points() const noexcept { return points_; }

  /// Rows listed in `rows`, in that order.
  [[nodiscard]] DirectionalSample subset(std::span<const std::size_t> rows) const;

 private:
  Matrix points_;
};

/// chi applied to every row; throws DegenerateInputError if a row is in <1>.
[[nodiscard]] DirectionalSample standardize_rows(const Matrix& z);

/// mrl = ||mean||, md = mean / ||mean||; cov_chi is attached when N >= 2.
/// Throws UndefinedDirectionError (carrying mrl) when ||mean|| <= 1e-12.
[[nodiscard]] MomentSummary estimate_md_mrl(const DirectionalSample& sample);

/// (1/N) sum (x_t - xbar)(x_t - xbar)^T. Throws DimensionError for N < 2.
[[nodiscard]] Matrix estimate_cov(const DirectionalSample& sample);

/// (1/N) sum x_t x_t^T, the scatter matrix about the origin.
[[nodiscard]] Matrix scatter_matrix(const DirectionalSample& sample);

struct DensityEstimate {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
};

/// Bandwidth rule for kde: the automatic rule is
/// 0.9 min(sd, IQR/1.34) N^{-1/5}, falling back to sd when the IQR vanishes.
class Bandwidth {
 public:
  [[nodiscard]] static Bandwidth automatic() noexcept { return Bandwidth(0.0); }
  [[nodiscard]] static Bandwidth fixed(double h);
  [[nodiscard]] bool is_automatic() const noexcept { return h_ == 0.0; }
  [[nodiscard]] double value() const noexcept { return h_; }

 private:
  explicit Bandwidth(double h) : h_(h) {}
  double h_;
};

inline constexpr std::size_t kDensityGridPoints = 512;

/// Gaussian kernel density on 512 points spanning [min - 3h, max + 3h].
/// Throws DimensionError for fewer than 2 values, DegenerateInputError for
/// zero spread, DomainError for non-finite values.
[[nodiscard]] DensityEstimate kde(std::span<const double> values, Bandwidth bandwidth = Bandwidth::automatic());

/// Trapezoid integral of a density estimate over its grid.
[[nodiscard]] double integrate(const DensityEstimate& d);

enum class ThetaMode { chi_mu, sample_md };

struct IcDistribution {
  UnitDirection theta;
  std::vector<double> values;  ///< T = theta^T chi(Z) per draw
  DensityEstimate density;
};

/// Simulates the information coefficient T = theta^T chi(Z). In sample_md
/// mode theta is the mean direction of the same draws (two passes over the
/// stream).
[[nodiscard]] IcDistribution ic_distribution(const GaussianModel& model, ThetaMode mode, std::size_t count,
                                             SeededStream stream, unsigned threads = 1);

enum class PerturbAxis { mu1, sigma1 };

struct PerturbationPoint {
  double factor = 0.0;
  UnitDirection md;      ///< simulated mean direction
  UnitDirection chi_mu;  ///< chi of the perturbed mean
  double angle_deg = 0.0;
  double mrl = 0.0;
};

/// For each factor k: sigma1 scales the first standard deviation
/// (cov <- diag(k,1,1) cov diag(k,1,1)); mu1 scales the first mean
/// component. Every factor reuses the same stream (common random numbers).
[[nodiscard]] std::vector<PerturbationPoint> md_perturbation_experiment(std::span<const double> base_mu,
                                                                        const Matrix& base_cov, PerturbAxis axis,
                                                                        std::span<const double> factors,
                                                                        std::size_t count, SeededStream stream,
                                                                        unsigned threads = 1);

enum class Projection {
  chi,      ///< P z / ||P z||
  unitize,  ///< z / ||z||
};

/// Streaming Monte Carlo moments of a projected normal vector; the oracle
/// against which the closed forms are checked. Two passes over the same
/// stream: the mean first, then centered second moments and their standard
/// errors.
struct MonteCarloMoments {
  std::size_t count = 0;
  std::vector<double> mean;
  std::vector<double> mean_se;
  Matrix cov;     ///< 1/N divisor
  Matrix cov_se;  ///< standard error of each cov entry
  double mrl = 0.0;
  double mrl_se = 0.0;
};

[[nodiscard]] MonteCarloMoments mc_moments(const GaussianModel& model, Projection projection, std::size_t count,
                                           SeededStream stream, unsigned threads = 1);

}  // namespace cudir
