#include "cqac/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "cqac/errors.hpp"

namespace cqac {

CovNorms cov_norms(const Eigen::MatrixXd& V) {
  if (V.rows() != V.cols()) {
    throw std::invalid_argument("cov_norms: matrix must be square");
  }
  CovNorms out;
  out.max_norm = V.size() > 0 ? V.cwiseAbs().maxCoeff() : 0.0;
  const Eigen::VectorXd d = V.diagonal();
  out.diag_l1 = d.lpNorm<1>();
  out.diag_l2 = d.norm();
  out.diag_linf = d.size() > 0 ? d.cwiseAbs().maxCoeff() : 0.0;
  return out;
}

CovBounds cov_bounds(const Eigen::MatrixXd& V) {
  CovBounds b;
  b.c_max = V.maxCoeff();
  b.c_min = V.minCoeff();
  return b;
}

bool ellipsoid_membership(const Eigen::MatrixXd& V, const Field& p,
                          const Field& p_star, double r) {
  if (p.size() != p_star.size() || p.size() != V.rows()) {
    throw std::invalid_argument("ellipsoid_membership: dimension mismatch");
  }
  const Eigen::VectorXd dev = p.values - p_star.values;
  if (dev.cwiseAbs().maxCoeff() == 0.0) return r >= 0.0;

  Eigen::LLT<Eigen::MatrixXd> llt(V);
  if (llt.info() != Eigen::Success) {
    throw ConditioningError(
        "ellipsoid_membership: covariance is singular or indefinite");
  }
  const Eigen::VectorXd y = llt.solve(dev);
  const double q = dev.dot(y);
  return q <= r * r;
}

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points,
                       double mu_crit) {
  if (points.size() < 3) {
    throw std::invalid_argument("fit_scaling: need at least 3 points");
  }
  int side = 0;
  for (const auto& [mu, value] : points) {
    if (!(value > 0.0)) {
      throw std::invalid_argument("fit_scaling: values must be positive");
    }
    const double d = mu - mu_crit;
    if (d == 0.0) {
      throw std::invalid_argument("fit_scaling: point at mu_crit");
    }
    const int s = d > 0.0 ? 1 : -1;
    if (side == 0) side = s;
    if (s != side) {
      throw std::invalid_argument(
          "fit_scaling: points must lie on one side of mu_crit");
    }
  }

  const int n = static_cast<int>(points.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  double lo = points.front().first, hi = points.front().first;
  for (const auto& [mu, value] : points) {
    const double x = std::log(std::abs(mu_crit - mu));
    const double y = std::log(value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    lo = std::min(lo, mu);
    hi = std::max(hi, mu);
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) {
    throw std::invalid_argument("fit_scaling: degenerate abscissae");
  }
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;

  double ss_res = 0.0, ss_tot = 0.0;
  const double ymean = sy / n;
  for (const auto& [mu, value] : points) {
    const double x = std::log(std::abs(mu_crit - mu));
    const double y = std::log(value);
    const double fit = slope * x + intercept;
    ss_res += (y - fit) * (y - fit);
    ss_tot += (y - ymean) * (y - ymean);
  }

  ScalingFit out;
  out.alpha = -slope;
  out.kappa = std::exp(intercept);
  out.window_lo = lo;
  out.window_hi = hi;
  out.mu_crit = mu_crit;
  out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  out.n_points = n;
  return out;
}

}  // namespace cqac
