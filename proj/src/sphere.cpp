#include "cudir/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "cudir/error.hpp"
#include "cudir/specfun.hpp"

namespace cudir {

UnitDirection UnitDirection::from_coords(std::vector<double> coords) {
  if (coords.size() < 2) throw DimensionError("UnitDirection needs dimension >= 2");
  const double len = norm(coords);
  const double sum = std::accumulate(coords.begin(), coords.end(), 0.0);
  if (!(std::abs(len - 1.0) <= kUnitDirectionTol)) throw DomainError("UnitDirection must have unit norm");
  if (!(std::abs(sum) <= kUnitDirectionTol)) throw DomainError("UnitDirection must be orthogonal to the ones vector");
  return UnitDirection(std::move(coords));
}

UnitDirection UnitDirection::operator-() const {
  std::vector<double> c(coords_.size());
  std::transform(coords_.begin(), coords_.end(), c.begin(), [](double x) { return -x; });
  return UnitDirection(std::move(c));
}

double dot(const UnitDirection& a, const UnitDirection& b) { return dot(a.coords(), b.coords()); }

double angle_degrees(const UnitDirection& a, const UnitDirection& b) {
  const double c = std::clamp(dot(a, b), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

std::vector<double> center(std::span<const double> z) {
  if (z.size() < 2) throw DimensionError("center needs length >= 2");
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
  std::vector<double> out(z.size());
  std::transform(z.begin(), z.end(), out.begin(), [mean](double v) { return v - mean; });
  return out;
}

UnitDirection standardize(std::span<const double> z) {
  auto c = center(z);
  const double len = norm(c);
  if (!std::isfinite(len)) throw DomainError("standardize: non-finite input");
  if (len <= std::max(1e-12 * norm(z), 1e-300))
    throw DegenerateInputError("standardize: input is constant across components (in <1>)");
  for (double& v : c) v /= len;
  return UnitDirection(std::move(c));
}

Matrix helmert_v(std::size_t n) {
  if (n < 2) throw DimensionError("helmert_v needs n >= 2");
  Matrix v(n, n);
  // 1-based j in the closed form; column j-1 here.
  for (std::size_t j = 1; j < n; ++j) {
    const double m = static_cast<double>(n - j);
    const double scale = std::sqrt(m * (m + 1.0));
    v(j - 1, j - 1) = m / scale;
    for (std::size_t i = j + 1; i <= n; ++i) v(i - 1, j - 1) = -1.0 / scale;
  }
  const double last = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) v(i, n - 1) = last;
  return v;
}

std::vector<double> Representation::reduce(std::span<const double> z) const {
  if (z.size() != dim()) throw DimensionError("Representation::reduce length mismatch");
  const std::size_t n = dim();
  std::vector<double> xi(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += u_(i, k) * z[i];
    xi[k] = s;
  }
  return xi;
}

std::vector<double> Representation::rotate_back(std::span<const double> x) const { return u_ * x; }

Representation build_representation(const GaussianModel& model) {
  const std::size_t n = model.dim();
  const Matrix v = helmert_v(n);
  const Matrix rotated = v.transposed() * model.cov() * v;

  Matrix block(n - 1, n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = 0; j + 1 < n; ++j) block(i, j) = 0.5 * (rotated(i, j) + rotated(j, i));

  SymmetricEigen eig = symmetric_eigen(block);
  // Descending order: reverse the ascending solver output.
  std::vector<double> lambda(eig.values.rbegin(), eig.values.rend());
  Matrix w = Matrix::identity(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::size_t src = n - 2 - k;
    for (std::size_t i = 0; i + 1 < n; ++i) w(i, k) = eig.vectors(i, src);
  }
  for (double& l : lambda)
    if (l < 0.0) throw ModelError("build_representation: reduced covariance has a negative eigenvalue");

  Matrix u = v * w;
  const auto centered_mu = center(model.mu());
  std::vector<double> nu(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += u(i, k) * centered_mu[i];
    nu[k] = s;
  }
  return Representation(std::move(u), std::move(lambda), std::move(nu));
}

double support_surface_area(int n) {
  if (n < 3) throw DimensionError("support_surface_area needs n >= 3");
  const double half = 0.5 * (n - 2);
  return std::exp(std::numbers::ln2 + half * std::log(std::numbers::pi) - specfun::log_gamma(half));
}

}  // namespace cudir
