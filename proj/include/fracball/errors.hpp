#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace fracball {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument's domain was violated (point outside the ball,
/// order outside (0,1), incompatible decay class, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation was requested at (or numerically too close to) a singular point.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Adaptive refinement did not reach the requested tolerance. Carries the
/// partial value and the error estimate that was achieved.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double partial_value, double achieved_error)
      : Error(what + " (partial value " + format(partial_value) + ", achieved error " + format(achieved_error) + ")"),
        partial_value_(partial_value),
        achieved_error_(achieved_error) {}

  double partial_value() const noexcept { return partial_value_; }
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }

  double partial_value_;
  double achieved_error_;
};

/// A manufactured construction produced data outside the admissible class
/// (e.g. a drift that is not in L^n).
class AdmissibilityError : public DomainError {
 public:
  AdmissibilityError(const std::string& what, double norm_value, bool norm_converged)
      : DomainError(what), norm_value_(norm_value), norm_converged_(norm_converged) {}

  double norm_value() const noexcept { return norm_value_; }
  bool norm_converged() const noexcept { return norm_converged_; }

 private:
  double norm_value_;
  bool norm_converged_;
};

}  // namespace fracball
