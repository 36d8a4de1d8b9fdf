#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cudir {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (e.g. log_gamma(0)).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix dimensions are too small or do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input lies in the excluded set <1>, so the standardization is undefined.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// The mean direction does not exist because the resultant vanishes.
/// The mean resultant length is still known (it is zero) and travels with
/// the error.
class UndefinedDirectionError : public Error {
 public:
  explicit UndefinedDirectionError(const std::string& what, double mrl = 0.0)
      : Error(what), mrl_(mrl) {}
  [[nodiscard]] double mrl() const noexcept { return mrl_; }

 private:
  double mrl_;
};

/// A series or iterative method did not converge within its budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::size_t terms_used)
      : Error(what + " (terms used: " + std::to_string(terms_used) + ")"),
        terms_used_(terms_used) {}
  [[nodiscard]] std::size_t terms_used() const noexcept { return terms_used_; }

 private:
  std::size_t terms_used_;
};

/// Invalid distribution parameters (covariance not positive definite, sigma <= 0, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Matrix handed to the variance minimizer does not annihilate the ones vector.
class NotChiCovarianceError : public Error {
 public:
  using Error::Error;
};

/// Optimization problem whose maximizer is not unique.
class NoUniqueSolutionError : public Error {
 public:
  using Error::Error;
};

/// Malformed external input (CSV panels, number lists, fixture files).
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace cudir
