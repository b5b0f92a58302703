#include "cqac/lyapunov.hpp"

#include <chrono>
#include <cmath>

#include <Eigen/Dense>

namespace cqac {

Eigen::MatrixXd lyap_apply(const SparseOperator& A, const Eigen::MatrixXd& V) {
  if (A.dimension() != V.rows() || V.rows() != V.cols()) {
    throw std::invalid_argument("lyap_apply: dimension mismatch");
  }
  Eigen::MatrixXd Y = A.mat * V;
  Y += (A.mat * V.transpose()).transpose();
  return Y;
}

CovarianceSolution solve_lyapunov(const SparseOperator& A,
                                  const Eigen::MatrixXd& B,
                                  const LinearSolverConfig& cfg,
                                  const Eigen::MatrixXd* warm_start) {
  const int J = A.dimension();
  if (B.rows() != J) {
    throw std::invalid_argument("solve_lyapunov: B has wrong row count");
  }
  const auto t0 = std::chrono::steady_clock::now();

  const double lam = stability_eig(A, 1e-9);
  if (!(lam < 0.0)) {
    throw InstabilityError(
        "solve_lyapunov: system matrix is not Hurwitz (largest eigenvalue = " +
        std::to_string(lam) + "); no stationary covariance exists");
  }

  CovarianceSolution sol;
  sol.solver_id = solver_name(cfg);
  sol.warm_started = warm_start != nullptr;

  const Eigen::MatrixXd C = B * B.transpose();
  const double normC = C.norm();
  if (normC == 0.0) {
    sol.V = Eigen::MatrixXd::Zero(J, J);
    sol.converged = true;
    sol.residual = 0.0;
    sol.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return sol;
  }

  auto op = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::Map<const Eigen::MatrixXd> X(x.data(), J, J);
    Eigen::MatrixXd Y = A.mat * X;
    Y += (A.mat * X.transpose()).transpose();
    return Eigen::Map<Eigen::VectorXd>(Y.data(), Y.size());
  };

  Eigen::VectorXd b(static_cast<Eigen::Index>(J) * J);
  Eigen::Map<Eigen::MatrixXd>(b.data(), J, J) = -C;

  Eigen::VectorXd x;
  if (warm_start != nullptr) {
    if (warm_start->rows() != J || warm_start->cols() != J) {
      throw std::invalid_argument("solve_lyapunov: warm start has wrong shape");
    }
    x.resize(static_cast<Eigen::Index>(J) * J);
    Eigen::Map<Eigen::MatrixXd>(x.data(), J, J) = *warm_start;
  }

  // Up to two passes: the second absorbs the rare case where the recurrence
  // residual met the tolerance but the true residual of the symmetrized
  // iterate has not.
  bool converged = false;
  for (int attempt = 0; attempt < 2 && !converged; ++attempt) {
    KrylovStats st = krylov_solve(op, b, x, cfg);
    sol.iterations += st.iterations;
    Eigen::Map<const Eigen::MatrixXd> X(x.data(), J, J);
    sol.V = 0.5 * (X + X.transpose());
    sol.residual = (lyap_apply(A, sol.V) + C).norm() / normC;
    converged = st.converged && sol.residual <= cfg.tol;
    if (!st.converged) break;
    if (!converged) {
      Eigen::Map<Eigen::MatrixXd>(x.data(), J, J) = sol.V;
    }
  }
  sol.converged = converged;
  sol.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (!converged) {
    throw LyapunovNonConvergence(
        "solve_lyapunov: " + sol.solver_id + " did not reach tol " +
            std::to_string(cfg.tol) + " within maxit " +
            std::to_string(cfg.maxit) + " (residual " +
            std::to_string(sol.residual) + ")",
        sol);
  }
  return sol;
}

Eigen::MatrixXd spectral_oracle(const SparseOperator& A,
                                const Eigen::MatrixXd& B) {
  if (!A.symmetric) {
    throw std::invalid_argument("spectral_oracle: operator must be symmetric");
  }
  const int J = A.dimension();
  if (B.rows() != J) {
    throw std::invalid_argument("spectral_oracle: B has wrong row count");
  }
  Eigen::MatrixXd dense(A.mat);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("spectral_oracle: eigendecomposition failed");
  }
  const Eigen::VectorXd& a = es.eigenvalues();
  if (!(a.maxCoeff() < 0.0)) {
    throw InstabilityError("spectral_oracle: matrix is not Hurwitz");
  }
  const Eigen::MatrixXd& W = es.eigenvectors();
  Eigen::MatrixXd C2 = W.transpose() * B;  // J x K
  Eigen::MatrixXd M = C2 * C2.transpose();
  for (int i = 0; i < J; ++i) {
    for (int j = 0; j < J; ++j) {
      M(i, j) /= -(a[i] + a[j]);
    }
  }
  Eigen::MatrixXd V = W * M * W.transpose();
  return 0.5 * (V + V.transpose());
}

Eigen::MatrixXd integrate_cov_ode(const SparseOperator& A,
                                  const Eigen::MatrixXd& B, double T,
                                  double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_cov_ode: dt must be > 0");
  if (T < 0.0) throw std::invalid_argument("integrate_cov_ode: T must be >= 0");
  const int J = A.dimension();
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(J, J);
  if (T == 0.0) return V;

  const Eigen::MatrixXd C = B * B.transpose();
  const double scale = std::max(1.0, C.norm());
  const long long n = std::max<long long>(1, std::llround(T / dt));
  const double h = T / static_cast<double>(n);

  auto F = [&](const Eigen::MatrixXd& X) -> Eigen::MatrixXd {
    return lyap_apply(A, X) + C;
  };
  for (long long step = 0; step < n; ++step) {
    const Eigen::MatrixXd k1 = F(V);
    const Eigen::MatrixXd k2 = F(V + 0.5 * h * k1);
    const Eigen::MatrixXd k3 = F(V + 0.5 * h * k2);
    const Eigen::MatrixXd k4 = F(V + h * k3);
    V += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!V.allFinite() || V.norm() > 1e12 * scale) {
      throw StepSizeError(
          "integrate_cov_ode: iteration diverged at t = " +
          std::to_string((step + 1) * h) + "; reduce dt");
    }
  }
  return V;
}

Eigen::MatrixXd kronecker_system(const SparseOperator& A) {
  const int J = A.dimension();
  if (J > 64) {
    throw std::invalid_argument(
        "kronecker_system: explicit assembly is a small-J test path (J <= 64)");
  }
  Eigen::MatrixXd dense(A.mat);
  const Eigen::Index n = static_cast<Eigen::Index>(J) * J;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  // vec is column-stacking: entry (i + j*J) of vec(X) is X(i,j).
  for (int j = 0; j < J; ++j) {
    K.block(static_cast<Eigen::Index>(j) * J, static_cast<Eigen::Index>(j) * J,
            J, J) += dense;  // Id (x) A
    for (int l = 0; l < J; ++l) {
      if (dense(j, l) == 0.0) continue;
      for (int i = 0; i < J; ++i) {  // A (x) Id
        K(static_cast<Eigen::Index>(j) * J + i,
          static_cast<Eigen::Index>(l) * J + i) += dense(j, l);
      }
    }
  }
  return K;
}

CovarianceContinuation continue_covariance(const Branch& branch,
                                           const NoiseSpec& spec,
                                           const LinearSolverConfig& cfg) {
  CovarianceContinuation run;
  if (branch.points.empty()) return run;
  const Grid2D& grid = branch.points.front().state.grid;
  SparseOperator lap = assemble_laplacian(grid);

  const Eigen::MatrixXd* warm = nullptr;
  for (std::size_t i = 0; i < branch.points.size(); ++i) {
    const BranchPoint& p = branch.points[i];
    if (!p.stable) {
      run.skipped.push_back(
          {static_cast<int>(i), p.mu,
           "unstable steady state (min_stability_eig = " +
               std::to_string(p.min_stability_eig) + ")"});
      continue;
    }
    SparseOperator A = jacobian(p.state, p.mu, lap);
    NoiseMatrix nm = assemble_B(p.state, spec, grid);
    CovarianceSolution sol;
    try {
      sol = solve_lyapunov(A, nm.B, cfg, warm);
    } catch (const LyapunovNonConvergence& e) {
      sol = e.best();
    }
    sol.mu = p.mu;
    sol.branch_index = static_cast<int>(i);
    run.solutions.push_back(std::move(sol));
    warm = &run.solutions.back().V;
  }
  return run;
}

}  // namespace cqac
