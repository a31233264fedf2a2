#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace lqss {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problems with caller-supplied data: shapes, structure, violated invariants.
class InputError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

/// The input lacks a required algebraic structure (odd size, not skew, ...).
class StructureError : public InputError {
 public:
  using InputError::InputError;
};

/// A named invariant does not hold; carries the measured residual.
class ValidationError : public InputError {
 public:
  ValidationError(std::string invariant, double residual, const std::string& message)
      : InputError(message), invariant_(std::move(invariant)), residual_(residual) {}

  const std::string& invariant() const noexcept { return invariant_; }
  double residual() const noexcept { return residual_; }

 private:
  std::string invariant_;
  double residual_;
};

/// No symplectic partner exists for a vector (it is in the radical of the form).
class DegeneracyError : public InputError {
 public:
  DegeneracyError(Eigen::Index index, const std::string& message)
      : InputError(message), index_(index) {}

  Eigen::Index index() const noexcept { return index_; }

 private:
  Eigen::Index index_;
};

/// Rank decisions that are inconsistent under the active tolerance. The spectra
/// are attached so the caller can pick a better threshold.
class RankAmbiguityError : public Error {
 public:
  RankAmbiguityError(const std::string& message, std::vector<double> singular_values,
                     std::vector<double> skew_values, double threshold)
      : Error(message),
        singular_values_(std::move(singular_values)),
        skew_values_(std::move(skew_values)),
        threshold_(threshold) {}

  const std::vector<double>& singular_values() const noexcept { return singular_values_; }
  const std::vector<double>& skew_values() const noexcept { return skew_values_; }
  double threshold() const noexcept { return threshold_; }

 private:
  std::vector<double> singular_values_;
  std::vector<double> skew_values_;
  double threshold_;
};

}  // namespace lqss
