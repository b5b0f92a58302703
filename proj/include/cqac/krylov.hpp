#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cqac {

/// Settings for the iterative linear solvers. The defaults are the working
/// values used throughout the study (tol 1e-4, maxit 200, restart 10).
struct LinearSolverConfig {
  enum class Method { bicgstab, gmres, qmr };
  Method method = Method::bicgstab;
  double tol = 1e-4;
  int maxit = 200;
  int gmres_restart = 10;  // 0 = full GMRES, no restart
};

inline std::string solver_name(const LinearSolverConfig& cfg) {
  switch (cfg.method) {
    case LinearSolverConfig::Method::bicgstab:
      return "bicgstab";
    case LinearSolverConfig::Method::gmres:
      return "gmres(" + std::to_string(cfg.gmres_restart) + ")";
    case LinearSolverConfig::Method::qmr:
      return "qmr";
  }
  return "unknown";
}

inline LinearSolverConfig::Method method_from_string(const std::string& name) {
  if (name == "bicgstab") return LinearSolverConfig::Method::bicgstab;
  if (name == "gmres") return LinearSolverConfig::Method::gmres;
  if (name == "qmr") return LinearSolverConfig::Method::qmr;
  throw std::invalid_argument("unknown solver method: " + name);
}

struct KrylovStats {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

namespace detail {
inline void require_config(double tol, int maxit) {
  if (!(tol > 0.0)) throw std::invalid_argument("krylov: tol must be > 0");
  if (maxit < 1) throw std::invalid_argument("krylov: maxit must be >= 1");
}
}  // namespace detail

/// Stabilized biconjugate gradients (van der Vorst). `apply` maps a vector to
/// A*vector; `x` is the initial guess on entry and the iterate on exit.
/// Convergence is declared on the recurrence residual ||b - Ax|| <= tol*||b||.
/// All tests are relative, so iterates are exactly equivariant under scaling
/// of b (no absolute thresholds enter the recurrences).
template <class Op>
KrylovStats bicgstab(Op&& apply, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                     double tol, int maxit) {
  detail::require_config(tol, maxit);
  const Eigen::Index n = b.size();
  const double nb = b.norm();
  if (x.size() != n) x = Eigen::VectorXd::Zero(n);
  if (nb == 0.0) {
    x.setZero();
    return {0, 0.0, true};
  }

  Eigen::VectorXd r = b - apply(x);
  double rnorm = r.norm();
  if (rnorm <= tol * nb) return {0, rnorm / nb, true};

  const Eigen::VectorXd rt = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);

  KrylovStats st;
  for (int it = 1; it <= maxit; ++it) {
    const double rho1 = rt.dot(r);
    if (rho1 == 0.0) break;  // serious breakdown
    if (it == 1) {
      p = r;
    } else {
      const double beta = (rho1 / rho) * (alpha / omega);
      p = r + beta * (p - omega * v);
    }
    v = apply(p);
    const double rtv = rt.dot(v);
    if (rtv == 0.0) break;
    alpha = rho1 / rtv;
    Eigen::VectorXd s = r - alpha * v;
    const double snorm = s.norm();
    st.iterations = it;
    if (snorm <= tol * nb) {
      x += alpha * p;
      rnorm = snorm;
      st.converged = true;
      break;
    }
    const Eigen::VectorXd t = apply(s);
    const double tt = t.squaredNorm();
    if (tt == 0.0) {
      x += alpha * p;
      r = s;
      rnorm = snorm;
      break;
    }
    omega = t.dot(s) / tt;
    x += alpha * p + omega * s;
    r = s - omega * t;
    rho = rho1;
    rnorm = r.norm();
    if (rnorm <= tol * nb) {
      st.converged = true;
      break;
    }
    if (omega == 0.0) break;
  }
  st.rel_residual = rnorm / nb;
  return st;
}

/// Restarted GMRES with Givens rotations. `restart` = 0 disables restarts.
/// Iteration count is the total number of inner (Arnoldi) steps. The Krylov
/// basis is grown lazily, one vector per accepted step.
template <class Op>
KrylovStats gmres(Op&& apply, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                  double tol, int maxit, int restart) {
  detail::require_config(tol, maxit);
  if (restart < 0) throw std::invalid_argument("gmres: restart must be >= 0");
  const Eigen::Index n = b.size();
  const double nb = b.norm();
  if (x.size() != n) x = Eigen::VectorXd::Zero(n);
  if (nb == 0.0) {
    x.setZero();
    return {0, 0.0, true};
  }

  const int m = (restart > 0) ? std::min(restart, maxit) : maxit;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd cs(m), sn(m), g(m + 1);
  std::vector<Eigen::VectorXd> basis;

  KrylovStats st;
  double rnorm = 0.0;
  while (st.iterations < maxit) {
    Eigen::VectorXd r = b - apply(x);
    rnorm = r.norm();
    if (rnorm <= tol * nb) {
      st.converged = true;
      break;
    }
    basis.clear();
    basis.push_back(r / rnorm);
    g.setZero();
    g(0) = rnorm;
    H.setZero();

    int k = 0;
    bool stop_cycle = false;
    for (; k < m && st.iterations < maxit && !stop_cycle; ++k) {
      ++st.iterations;
      Eigen::VectorXd w = apply(basis[static_cast<std::size_t>(k)]);
      for (int i = 0; i <= k; ++i) {
        H(i, k) = basis[static_cast<std::size_t>(i)].dot(w);
        w -= H(i, k) * basis[static_cast<std::size_t>(i)];
      }
      const double hnorm = w.norm();

      for (int i = 0; i < k; ++i) {
        const double tmp = cs(i) * H(i, k) + sn(i) * H(i + 1, k);
        H(i + 1, k) = -sn(i) * H(i, k) + cs(i) * H(i + 1, k);
        H(i, k) = tmp;
      }
      const double denom = std::sqrt(H(k, k) * H(k, k) + hnorm * hnorm);
      if (denom == 0.0) {
        cs(k) = 1.0;
        sn(k) = 0.0;
      } else {
        cs(k) = H(k, k) / denom;
        sn(k) = hnorm / denom;
      }
      H(k, k) = denom;
      g(k + 1) = -sn(k) * g(k);
      g(k) *= cs(k);

      const double res_est = std::abs(g(k + 1));
      if (res_est <= tol * nb || hnorm == 0.0) {
        stop_cycle = true;
      } else {
        basis.push_back(w / hnorm);
      }
    }

    // Back substitution on the k x k upper-triangular system.
    Eigen::VectorXd y(k);
    for (int i = k - 1; i >= 0; --i) {
      double acc = g(i);
      for (int jj = i + 1; jj < k; ++jj) acc -= H(i, jj) * y(jj);
      y(i) = (H(i, i) != 0.0) ? acc / H(i, i) : 0.0;
    }
    for (int i = 0; i < k; ++i) x += y(i) * basis[static_cast<std::size_t>(i)];
    rnorm = std::abs(g(k));
    if (rnorm <= tol * nb) {
      st.converged = true;
      break;
    }
  }
  st.rel_residual = rnorm / nb;
  return st;
}

/// Quasi-minimal residual method without look-ahead. Needs products with both
/// A (`apply`) and A^T (`applyT`); pass the same callable when A is symmetric.
template <class Op, class OpT>
KrylovStats qmr(Op&& apply, OpT&& applyT, const Eigen::VectorXd& b,
                Eigen::VectorXd& x, double tol, int maxit) {
  detail::require_config(tol, maxit);
  const Eigen::Index n = b.size();
  const double nb = b.norm();
  if (x.size() != n) x = Eigen::VectorXd::Zero(n);
  if (nb == 0.0) {
    x.setZero();
    return {0, 0.0, true};
  }

  Eigen::VectorXd r = b - apply(x);
  double rnorm = r.norm();
  if (rnorm <= tol * nb) return {0, rnorm / nb, true};

  Eigen::VectorXd v_t = r, w_t = r;
  double rho = v_t.norm();
  double xi = w_t.norm();
  double gamma = 1.0, eta = -1.0, theta = 0.0;
  double eps = 1.0;
  Eigen::VectorXd v(n), w(n), p(n), q(n), p_t(n), d(n), s(n);

  KrylovStats st;
  for (int it = 1; it <= maxit; ++it) {
    if (rho == 0.0 || xi == 0.0) break;
    v = v_t / rho;
    w = w_t / xi;
    const double delta = w.dot(v);
    if (delta == 0.0) break;
    if (it == 1) {
      p = v;
      q = w;
    } else {
      p = v - (xi * delta / eps) * p;
      q = w - (rho * delta / eps) * q;
    }
    p_t = apply(p);
    eps = q.dot(p_t);
    if (eps == 0.0) break;
    const double beta = eps / delta;
    if (beta == 0.0) break;
    v_t = p_t - beta * v;
    const double rho_new = v_t.norm();
    w_t = applyT(q) - beta * w;
    const double xi_new = w_t.norm();
    const double theta_new = rho_new / (gamma * std::abs(beta));
    const double gamma_new = 1.0 / std::sqrt(1.0 + theta_new * theta_new);
    if (gamma_new == 0.0) break;
    eta = -eta * rho * (gamma_new * gamma_new) / (beta * (gamma * gamma));
    if (it == 1) {
      d = eta * p;
      s = eta * p_t;
    } else {
      const double c = (theta * gamma_new) * (theta * gamma_new);
      d = eta * p + c * d;
      s = eta * p_t + c * s;
    }
    x += d;
    r -= s;
    theta = theta_new;
    gamma = gamma_new;
    rho = rho_new;
    xi = xi_new;
    rnorm = r.norm();
    st.iterations = it;
    if (rnorm <= tol * nb) {
      st.converged = true;
      break;
    }
  }
  st.rel_residual = rnorm / nb;
  return st;
}

/// Dispatches on the configured method. For qmr the operator is applied for
/// both A and A^T, which is valid for the symmetric systems solved here.
template <class Op>
KrylovStats krylov_solve(Op&& apply, const Eigen::VectorXd& b,
                         Eigen::VectorXd& x, const LinearSolverConfig& cfg) {
  switch (cfg.method) {
    case LinearSolverConfig::Method::bicgstab:
      return bicgstab(apply, b, x, cfg.tol, cfg.maxit);
    case LinearSolverConfig::Method::gmres:
      return gmres(apply, b, x, cfg.tol, cfg.maxit, cfg.gmres_restart);
    case LinearSolverConfig::Method::qmr:
      return qmr(apply, apply, b, x, cfg.tol, cfg.maxit);
  }
  throw std::invalid_argument("krylov_solve: unknown method");
}

}  // namespace cqac
