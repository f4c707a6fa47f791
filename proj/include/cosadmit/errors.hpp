#pragma once

#include <stdexcept>
#include <string>

namespace cosadmit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A requested integral or series does not converge (e.g. p >= p_max).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure did not reach its accuracy target.
/// Carries the best estimate reached and its error bound.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double best_estimate, double error_bound)
      : Error(what), best_estimate_(best_estimate), error_bound_(error_bound) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

/// Result magnitude is not representable. `log_magnitude` is the natural log
/// of the true magnitude; its sign tells overflow (+) from underflow (-).
class OverflowError : public Error {
 public:
  OverflowError(const std::string& what, double log_magnitude)
      : Error(what), log_magnitude_(log_magnitude) {}

  double log_magnitude() const noexcept { return log_magnitude_; }

 private:
  double log_magnitude_;
};

/// Malformed user input: configs, flags, density strings.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Requested configuration is outside what the implementation supports.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace cosadmit
