#pragma once

#include <stdexcept>
#include <string>

namespace riccati_geom {

/// Broad failure classes; the CLI maps them onto exit codes.
enum class ErrorCategory {
  kInput,      // malformed or inconsistent caller data
  kNumerical,  // the numerics could not deliver a trustworthy answer
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Dimension mismatch, non-finite entries, asymmetric weights, bad targets.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorCategory::kInput, what) {}
};

/// Precondition on the mathematical object violated (indefinite Π, a
/// subspace that is not output-nulling, an unreachable pair, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCategory::kInput, what) {}
};

/// Evaluation point coincides with a pole of a rational matrix.
class PoleError : public Error {
 public:
  explicit PoleError(const std::string& what) : Error(ErrorCategory::kInput, what) {}
};

/// Iteration cap reached or a factorization broke down.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorCategory::kNumerical, what) {}
};

/// Linear matrix equation whose operator is singular.
class SolvabilityError : public Error {
 public:
  explicit SolvabilityError(const std::string& what)
      : Error(ErrorCategory::kNumerical, what) {}
};

/// The reduction-based solver cannot handle this instance.
class UnsupportedInstanceError : public Error {
 public:
  explicit UnsupportedInstanceError(const std::string& what)
      : Error(ErrorCategory::kNumerical, what) {}
};

/// Reduced Hamiltonian has eigenvalues on the imaginary axis.
class NoStabilizingSolutionError : public Error {
 public:
  explicit NoStabilizingSolutionError(const std::string& what)
      : Error(ErrorCategory::kNumerical, what) {}
};

/// Two routes that must agree by theory did not.
class InternalConsistencyError : public Error {
 public:
  explicit InternalConsistencyError(const std::string& what)
      : Error(ErrorCategory::kNumerical, what) {}
};

}  // namespace riccati_geom
