#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace cqac {

/// Newton iteration ran out of iterations; carries the last iterate.
class ConvergenceFailure : public std::runtime_error {
public:
  ConvergenceFailure(const std::string& what, Eigen::VectorXd last_iterate,
                     double residual_norm)
      : std::runtime_error(what),
        last_iterate_(std::move(last_iterate)),
        residual_norm_(residual_norm) {}

  const Eigen::VectorXd& last_iterate() const { return last_iterate_; }
  double residual_norm() const { return residual_norm_; }

private:
  Eigen::VectorXd last_iterate_;
  double residual_norm_;
};

/// Symmetric eigenvalue iteration failed to converge; carries the Ritz-value
/// history of the leading eigenvalue.
class EigenSolveFailure : public std::runtime_error {
public:
  EigenSolveFailure(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}

  const std::vector<double>& history() const { return history_; }

private:
  std::vector<double> history_;
};

/// Null-space extraction failed (eigenvalue not isolated or factorization
/// breakdown).
class SingularityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A stationary covariance was requested for a non-Hurwitz system matrix.
class InstabilityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Explicit time stepping blew up (step size too large for the spectrum).
class StepSizeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A sample path exceeded the overflow guard.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(const std::string& what, double blowup_time)
      : std::runtime_error(what), blowup_time_(blowup_time) {}

  double blowup_time() const { return blowup_time_; }

private:
  double blowup_time_;
};

/// Covariance matrix is numerically singular or indefinite.
class ConditioningError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Run configuration failed validation; message names the offending key.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace cqac
