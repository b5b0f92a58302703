#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cqac/continuation.hpp"
#include "cqac/errors.hpp"
#include "cqac/grid.hpp"
#include "cqac/krylov.hpp"
#include "cqac/noise.hpp"

namespace cqac {

/// Stationary covariance of the linearized system with solver telemetry.
struct CovarianceSolution {
  Eigen::MatrixXd V;  // symmetric J x J
  int iterations = 0;
  double residual = 0.0;  // relative, vectorized 2-norm
  double wall_time_s = 0.0;
  std::string solver_id;
  double mu = 0.0;
  bool warm_started = false;
  bool converged = true;
  int branch_index = -1;
};

/// The Krylov iteration ran out of iterations; carries the best iterate.
class LyapunovNonConvergence : public std::runtime_error {
public:
  LyapunovNonConvergence(const std::string& what, CovarianceSolution best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const CovarianceSolution& best() const { return best_; }

private:
  CovarianceSolution best_;
};

/// A*V + V*A^T as two sparse-dense products. Its vectorization is the
/// Kronecker matrix [Id (x) A + A (x) Id] applied to vec(V).
Eigen::MatrixXd lyap_apply(const SparseOperator& A, const Eigen::MatrixXd& V);

/// Solves A V + V A^T + B B^T = 0 matrix-free with the configured Krylov
/// method on the vectorized system of dimension J^2. The initial iterate is
/// `warm_start` when given and zero otherwise; the output is symmetrized and
/// the reported residual is recomputed from the symmetrized iterate.
CovarianceSolution solve_lyapunov(const SparseOperator& A,
                                  const Eigen::MatrixXd& B,
                                  const LinearSolverConfig& cfg,
                                  const Eigen::MatrixXd* warm_start = nullptr);

/// Exact stationary covariance through a full eigendecomposition of the
/// symmetric Hurwitz matrix A: V = sum_ij (w_i^T BB^T w_j)/(-a_i-a_j) w_i w_j^T.
/// Independent verification path; use only for moderate J.
Eigen::MatrixXd spectral_oracle(const SparseOperator& A,
                                const Eigen::MatrixXd& B);

/// Integrates dV/dt = A V + V A^T + B B^T from V(0) = 0 with classical RK4.
Eigen::MatrixXd integrate_cov_ode(const SparseOperator& A,
                                  const Eigen::MatrixXd& B, double T,
                                  double dt);

/// Explicitly assembled dense Kronecker matrix Id (x) A + A (x) Id.
/// Small-J test path only (guarded to J <= 64).
Eigen::MatrixXd kronecker_system(const SparseOperator& A);

struct SkippedPoint {
  int index = -1;
  double mu = 0.0;
  std::string reason;
};

struct CovarianceContinuation {
  std::vector<CovarianceSolution> solutions;
  std::vector<SkippedPoint> skipped;
};

/// Solves the Lyapunov equation along a branch, warm-starting every solve
/// with the previous solution. Unstable points are skipped with a recorded
/// reason; per-point non-convergence is recorded (converged = false) and the
/// continuation proceeds.
CovarianceContinuation continue_covariance(const Branch& branch,
                                           const NoiseSpec& spec,
                                           const LinearSolverConfig& cfg);

}  // namespace cqac
