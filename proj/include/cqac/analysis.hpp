#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cqac/grid.hpp"

namespace cqac {

struct CovNorms {
  double max_norm = 0.0;   // max |V_ij|
  double diag_l1 = 0.0;    // ||diag(V)||_1
  double diag_l2 = 0.0;    // ||diag(V)||_2
  double diag_linf = 0.0;  // ||diag(V)||_inf
};

/// Norms used to measure the size of a covariance matrix / its variances.
CovNorms cov_norms(const Eigen::MatrixXd& V);

/// Extreme entries of the covariance matrix, the containment band of the
/// Monte-Carlo comparison.
struct CovBounds {
  double c_max = 0.0;
  double c_min = 0.0;
};

CovBounds cov_bounds(const Eigen::MatrixXd& V);

/// True iff (p - p*)^T V^{-1} (p - p*) <= r^2, evaluated with one symmetric
/// factorization (never by explicit inversion). Throws ConditioningError when
/// V is not numerically positive definite.
bool ellipsoid_membership(const Eigen::MatrixXd& V, const Field& p,
                          const Field& p_star, double r);

/// Power-law fit of covariance blow-up near a critical parameter value.
struct ScalingFit {
  double kappa = 0.0;
  double alpha = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double mu_crit = 0.0;
  double r_squared = 0.0;
  int n_points = 0;
};

/// Least-squares line through (log|mu_crit - mu|, log value); alpha is the
/// negated slope and kappa = exp(intercept). Requires >= 3 points, positive
/// values, and all points on one side of mu_crit.
ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points,
                       double mu_crit);

}  // namespace cqac
