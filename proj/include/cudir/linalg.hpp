#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace cudir {

/// Dense row-major matrix of doubles. Sized for the few-hundred dimensions
/// this library works in; no expression templates.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  [[nodiscard]] static Matrix identity(std::size_t n);
  [[nodiscard]] static Matrix diagonal(std::span<const double> diag);
  /// Builds from nested rows; every row must have the same length.
  [[nodiscard]] static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  [[nodiscard]] std::span<double> row(std::size_t i) noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  [[nodiscard]] std::vector<double> column(std::size_t j) const;
  [[nodiscard]] std::vector<double> diag() const;

  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
  [[nodiscard]] std::span<double> data() noexcept { return data_; }

  [[nodiscard]] Matrix transposed() const;
  [[nodiscard]] double trace() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

[[nodiscard]] Matrix operator+(Matrix a, const Matrix& b);
[[nodiscard]] Matrix operator-(Matrix a, const Matrix& b);
[[nodiscard]] Matrix operator*(Matrix a, double s);
[[nodiscard]] Matrix operator*(const Matrix& a, const Matrix& b);
[[nodiscard]] std::vector<double> operator*(const Matrix& a, std::span<const double> x);

[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double norm(std::span<const double> a);
[[nodiscard]] double frobenius_norm(const Matrix& a);
/// Largest absolute entry of a - b.
[[nodiscard]] double max_abs_diff(const Matrix& a, const Matrix& b);
/// x^T a x
[[nodiscard]] double quadratic_form(const Matrix& a, std::span<const double> x);
[[nodiscard]] Matrix outer(std::span<const double> a, std::span<const double> b);

/// Symmetric within tol * max(1, ||a||_F).
[[nodiscard]] bool is_symmetric(const Matrix& a, double tol);

/// Lower-triangular L with a = L L^T, or nullopt when a is not (numerically)
/// positive definite.
[[nodiscard]] std::optional<Matrix> cholesky(const Matrix& a);

/// Spectral decomposition a = Q diag(values) Q^T.
struct SymmetricEigen {
  std::vector<double> values;  ///< ascending
  Matrix vectors;              ///< column k pairs with values[k]
};

/// Cyclic Jacobi eigensolver. Stops once the off-diagonal Frobenius norm
/// falls below 1e-12 * ||a||_F. Eigenvalues come back ascending; each
/// eigenvector is signed so that its largest-magnitude component is
/// positive (ties resolved toward the lowest index).
/// Throws DimensionError when a is not square or not symmetric within 1e-10.
[[nodiscard]] SymmetricEigen symmetric_eigen(const Matrix& a);

/// Sign convention used by symmetric_eigen, exposed for callers that build
/// eigenvectors by other routes.
void normalize_sign(std::span<double> v);

}  // namespace cudir
