#pragma once

#include <span>
#include <vector>

#include "cudir/linalg.hpp"
#include "cudir/model.hpp"

namespace cudir {

/// Tolerance on the unit-norm and zero-sum invariants of UnitDirection.
inline constexpr double kUnitDirectionTol = 1e-12;

/// A point of the constrained sphere {x : ||x|| = 1, 1^T x = 0}.
class UnitDirection {
 public:
  /// Validates the invariants (within kUnitDirectionTol); throws DomainError
  /// otherwise and DimensionError for n < 2.
  [[nodiscard]] static UnitDirection from_coords(std::vector<double> coords);

  [[nodiscard]] std::size_t dim() const noexcept { return coords_.size(); }
  [[nodiscard]] std::span<const double> coords() const noexcept { return coords_; }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return coords_[i]; }

  [[nodiscard]] UnitDirection operator-() const;
  friend bool operator==(const UnitDirection&, const UnitDirection&) = default;

 private:
  explicit UnitDirection(std::vector<double> coords) : coords_(std::move(coords)) {}
  friend UnitDirection standardize(std::span<const double> z);
  std::vector<double> coords_;
};

/// <a, b>; throws DimensionError on mismatch.
[[nodiscard]] double dot(const UnitDirection& a, const UnitDirection& b);
/// Angle between two directions in degrees.
[[nodiscard]] double angle_degrees(const UnitDirection& a, const UnitDirection& b);

/// P z = z - mean(z) 1, without forming P.
[[nodiscard]] std::vector<double> center(std::span<const double> z);

/// chi(z) = P z / ||P z||. Throws DegenerateInputError when
/// ||P z|| <= max(1e-12 ||z||, 1e-300), i.e. z is (numerically) constant.
[[nodiscard]] UnitDirection standardize(std::span<const double> z);

/// Helmert-type orthogonal matrix whose last column is 1/sqrt(n) 1 and whose
/// first n-1 columns span <1>^perp.
[[nodiscard]] Matrix helmert_v(std::size_t n);

/// U = V W together with the law of the reduced vector xi_{n-1}: the
/// leading (n-1) block of U^T Sigma U is diag(lambda) and xi_{n-1} has mean
/// nu. Immutable once built.
class Representation {
 public:
  [[nodiscard]] const Matrix& u() const noexcept { return u_; }
  /// Eigenvalues of the reduced covariance, descending.
  [[nodiscard]] std::span<const double> lambda() const noexcept { return lambda_; }
  [[nodiscard]] std::span<const double> nu() const noexcept { return nu_; }
  [[nodiscard]] std::size_t dim() const noexcept { return u_.rows(); }

  /// xi = diag(I_{n-1}, 0) U^T z (length n, last entry 0). For z outside <1>,
  /// standardize(z) == U xi / ||xi||.
  [[nodiscard]] std::vector<double> reduce(std::span<const double> z) const;
  /// U x
  [[nodiscard]] std::vector<double> rotate_back(std::span<const double> x) const;

 private:
  friend Representation build_representation(const GaussianModel& model);
  Representation(Matrix u, std::vector<double> lambda, std::vector<double> nu)
      : u_(std::move(u)), lambda_(std::move(lambda)), nu_(std::move(nu)) {}
  Matrix u_;
  std::vector<double> lambda_;
  std::vector<double> nu_;
};

/// W_{n-1} comes from the Jacobi eigendecomposition of the leading (n-1)
/// block of V^T Sigma V, eigenvalues sorted descending.
[[nodiscard]] Representation build_representation(const GaussianModel& model);

/// Surface area 2 pi^{(n-2)/2} / Gamma((n-2)/2) of the constrained sphere in
/// R^n, evaluated in log space. Throws DimensionError for n < 3.
[[nodiscard]] double support_surface_area(int n);

}  // namespace cudir
