#include "cqac/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace cqac {

std::string to_string(PointKind kind) {
  switch (kind) {
    case PointKind::regular: return "regular";
    case PointKind::fold: return "fold";
    case PointKind::branch_point: return "branch_point";
  }
  return "unknown";
}

PointKind point_kind_from_string(const std::string& s) {
  if (s == "regular") return PointKind::regular;
  if (s == "fold") return PointKind::fold;
  if (s == "branch_point") return PointKind::branch_point;
  throw std::invalid_argument("unknown point kind: " + s);
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

double gershgorin_upper_bound(const SparseOperator& A) {
  const auto& mat = A.mat;
  double bound = std::numeric_limits<double>::lowest();
  for (int i = 0; i < mat.outerSize(); ++i) {
    double diag = 0.0, off = 0.0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(mat, i);
         it; ++it) {
      if (it.col() == i) {
        diag = it.value();
      } else {
        off += std::abs(it.value());
      }
    }
    bound = std::max(bound, diag + off);
  }
  return bound;
}

Eigen::MatrixXd deterministic_basis(int rows, int cols) {
  std::mt19937 rng(0x9d2c5680u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd X(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) X(i, j) = gauss(rng);
  return X;
}

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& Y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(Y.rows(), Y.cols());
  Q.applyOnTheLeft(qr.householderQ());
  return Q;
}

// Shift-inverted subspace iteration with Rayleigh-Ritz extraction on A.
// `solve` applies the inverted shifted operator; `nearest_zero` selects Ritz
// pairs by smallest magnitude instead of largest value.
template <class Solve>
EigResult subspace_iteration(const SparseOperator& A, int count, double tol,
                             Solve&& solve, bool nearest_zero,
                             const Eigen::MatrixXd* warm_basis) {
  const int J = A.dimension();
  const int b = std::min(J, count + 4);
  Eigen::MatrixXd X;
  if (warm_basis != nullptr && warm_basis->rows() == J &&
      warm_basis->cols() > 0) {
    X.resize(J, b);
    const int w = std::min<int>(b, static_cast<int>(warm_basis->cols()));
    X.leftCols(w) = warm_basis->leftCols(w);
    if (w < b) X.rightCols(b - w) = deterministic_basis(J, b - w);
  } else {
    X = deterministic_basis(J, b);
  }
  X = thin_q(X);

  std::vector<double> history;
  EigResult out;
  const int max_sweeps = 600;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    Eigen::MatrixXd Y = solve(X);
    if (!Y.allFinite()) {
      throw EigenSolveFailure("eigenvalue iteration produced non-finite values",
                              history);
    }
    Eigen::MatrixXd Q = thin_q(Y);
    Eigen::MatrixXd AQ = A.mat * Q;
    Eigen::MatrixXd T = Q.transpose() * AQ;
    T = 0.5 * (T + T.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    if (es.info() != Eigen::Success) {
      throw EigenSolveFailure("dense Rayleigh-Ritz step failed", history);
    }

    // Order Ritz pairs by the requested criterion.
    std::vector<int> order(static_cast<std::size_t>(b));
    for (int i = 0; i < b; ++i) order[static_cast<std::size_t>(i)] = i;
    const Eigen::VectorXd& theta = es.eigenvalues();  // ascending
    if (nearest_zero) {
      std::sort(order.begin(), order.end(), [&](int p, int q) {
        return std::abs(theta[p]) < std::abs(theta[q]);
      });
    } else {
      std::reverse(order.begin(), order.end());
    }

    Eigen::MatrixXd ritz_vecs(J, b);
    Eigen::VectorXd ritz_vals(b);
    for (int i = 0; i < b; ++i) {
      ritz_vals[i] = theta[order[static_cast<std::size_t>(i)]];
      ritz_vecs.col(i) =
          Q * es.eigenvectors().col(order[static_cast<std::size_t>(i)]);
    }
    history.push_back(ritz_vals[0]);

    bool done = true;
    for (int i = 0; i < count && done; ++i) {
      const Eigen::VectorXd r =
          A.mat * ritz_vecs.col(i) - ritz_vals[i] * ritz_vecs.col(i);
      if (r.norm() > tol * std::max(1.0, std::abs(ritz_vals[i]))) done = false;
    }
    if (done) {
      out.values = ritz_vals.head(count);
      out.vectors = ritz_vecs.leftCols(count);
      out.iterations = sweep;
      return out;
    }
    X = ritz_vecs;
  }
  throw EigenSolveFailure("eigenvalue iteration did not converge", history);
}

EigResult dense_eigenpairs(const SparseOperator& A, int count,
                           bool nearest_zero) {
  Eigen::MatrixXd dense(A.mat);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  const int J = static_cast<int>(dense.rows());
  std::vector<int> order(static_cast<std::size_t>(J));
  for (int i = 0; i < J; ++i) order[static_cast<std::size_t>(i)] = i;
  const Eigen::VectorXd& vals = es.eigenvalues();
  if (nearest_zero) {
    std::sort(order.begin(), order.end(), [&](int p, int q) {
      return std::abs(vals[p]) < std::abs(vals[q]);
    });
  } else {
    std::reverse(order.begin(), order.end());
  }
  EigResult out;
  out.values.resize(count);
  out.vectors.resize(J, count);
  for (int i = 0; i < count; ++i) {
    out.values[i] = vals[order[static_cast<std::size_t>(i)]];
    out.vectors.col(i) = es.eigenvectors().col(order[static_cast<std::size_t>(i)]);
  }
  out.iterations = 1;
  return out;
}

void require_symmetric(const SparseOperator& A, const char* who) {
  if (!A.symmetric) {
    throw std::invalid_argument(std::string(who) +
                                ": operator must be symmetric");
  }
}

}  // namespace

EigResult leading_eigenvalues(const SparseOperator& A, int count, double tol,
                              const Eigen::MatrixXd* warm_basis) {
  require_symmetric(A, "leading_eigenvalues");
  const int J = A.dimension();
  count = std::min(std::max(count, 1), J);
  if (J <= 12) return dense_eigenpairs(A, count, /*nearest_zero=*/false);

  const double bound = gershgorin_upper_bound(A);
  const double sigma = bound + std::max(1.0, 1e-6 * std::abs(bound));
  SpMat S = -A.mat;
  for (int j = 0; j < J; ++j) S.coeffRef(j, j) += sigma;
  Eigen::SimplicialLDLT<SpMat> ldlt(S);
  if (ldlt.info() != Eigen::Success) {
    throw EigenSolveFailure("shifted operator factorization failed", {});
  }
  auto solve = [&](const Eigen::MatrixXd& X) -> Eigen::MatrixXd {
    return ldlt.solve(X);
  };
  return subspace_iteration(A, count, tol, solve, /*nearest_zero=*/false,
                            warm_basis);
}

EigResult eigenpairs_near_zero(const SparseOperator& A, int count, double tol) {
  require_symmetric(A, "eigenpairs_near_zero");
  const int J = A.dimension();
  count = std::min(std::max(count, 1), J);
  if (J <= 12) return dense_eigenpairs(A, count, /*nearest_zero=*/true);

  SpMat S = A.mat;
  Eigen::SparseLU<SpMat> lu;
  lu.analyzePattern(S);
  lu.factorize(S);
  if (lu.info() != Eigen::Success) {
    // Exactly singular: nudge the shift off zero.
    const double eps = 1e-10 * std::max(1.0, std::abs(gershgorin_upper_bound(A)));
    for (int j = 0; j < J; ++j) S.coeffRef(j, j) += eps;
    lu.factorize(S);
    if (lu.info() != Eigen::Success) {
      throw SingularityError("null-space factorization failed");
    }
  }
  auto solve = [&](const Eigen::MatrixXd& X) -> Eigen::MatrixXd {
    return lu.solve(X);
  };
  return subspace_iteration(A, count, tol, solve, /*nearest_zero=*/true,
                            nullptr);
}

double stability_eig(const SparseOperator& A, double tol) {
  return leading_eigenvalues(A, 1, tol).values[0];
}

// ---------------------------------------------------------------------------
// Correctors
// ---------------------------------------------------------------------------

namespace {

struct Workspace {
  Grid2D grid;
  SparseOperator lap;

  explicit Workspace(const Grid2D& g) : grid(g), lap(assemble_laplacian(g)) {}
  int J() const { return grid.J; }
};

// Sparse bordered matrix [[A, f_mu], [t^T]] with t spanning all J+1 columns.
SpMat bordered_matrix(const SparseOperator& A, const Eigen::VectorXd& f_mu,
                      const Eigen::VectorXd& t) {
  const int J = A.dimension();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(A.mat.nonZeros()) + 2 * J + 1);
  for (int i = 0; i < A.mat.outerSize(); ++i) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A.mat, i);
         it; ++it) {
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                        it.value());
    }
  }
  for (int i = 0; i < J; ++i) {
    if (f_mu[i] != 0.0) trip.emplace_back(i, J, f_mu[i]);
  }
  for (int j = 0; j <= J; ++j) {
    if (t[j] != 0.0) trip.emplace_back(J, j, t[j]);
  }
  SpMat M(J + 1, J + 1);
  M.setFromTriplets(trip.begin(), trip.end());
  M.makeCompressed();
  return M;
}

struct CorrectorOutcome {
  Eigen::VectorXd u;
  double mu = 0.0;
  int iterations = 0;
  bool ok = false;
  double residual_norm = 0.0;
};

// Newton iteration on the bordered system: residual = 0 together with the
// arclength constraint t_ref . (w - w0) = delta.
CorrectorOutcome correct_bordered(const Workspace& ws, Eigen::VectorXd u,
                                  double mu, const Eigen::VectorXd& t_ref,
                                  const Eigen::VectorXd& u0, double mu0,
                                  double delta, double tol, int max_iters) {
  const int J = ws.J();
  CorrectorOutcome out;
  for (int it = 0; it <= max_iters; ++it) {
    const Eigen::VectorXd theta = residual(u, mu, ws.lap);
    const double c = t_ref.head(J).dot(u - u0) + t_ref[J] * (mu - mu0) - delta;
    const double rnorm = theta.cwiseAbs().maxCoeff();
    out.residual_norm = rnorm;
    out.iterations = it;
    if (!std::isfinite(rnorm)) return out;
    if (rnorm <= tol && std::abs(c) <= tol) {
      out.u = std::move(u);
      out.mu = mu;
      out.ok = true;
      return out;
    }
    if (it == max_iters) return out;

    SparseOperator A = jacobian(u, mu, ws.lap);
    const Eigen::VectorXd f_mu = 4.0 * u;
    SpMat M = bordered_matrix(A, f_mu, t_ref);
    Eigen::SparseLU<SpMat> lu(M);
    if (lu.info() != Eigen::Success) return out;
    Eigen::VectorXd rhs(J + 1);
    rhs.head(J) = -theta;
    rhs[J] = -c;
    const Eigen::VectorXd dw = lu.solve(rhs);
    if (!dw.allFinite()) return out;
    u += dw.head(J);
    mu += dw[J];
  }
  return out;
}

// Unit tangent at (u, mu) oriented against t_prev (the raw solution satisfies
// t_prev . t_raw = 1, so the orientation is inherited).
bool tangent_at(const Workspace& ws, const Eigen::VectorXd& u, double mu,
                const Eigen::VectorXd& t_prev, Eigen::VectorXd& t_out) {
  const int J = ws.J();
  SparseOperator A = jacobian(u, mu, ws.lap);
  const Eigen::VectorXd f_mu = 4.0 * u;
  SpMat M = bordered_matrix(A, f_mu, t_prev);
  Eigen::SparseLU<SpMat> lu(M);
  if (lu.info() != Eigen::Success) return false;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(J + 1);
  rhs[J] = 1.0;
  Eigen::VectorXd t = lu.solve(rhs);
  if (!t.allFinite()) return false;
  const double norm = t.norm();
  if (norm == 0.0) return false;
  t_out = t / norm;
  return true;
}

void fill_spectrum(BranchPoint& p, const Workspace& ws,
                   const ContinuationSettings& settings,
                   const Eigen::MatrixXd* warm, Eigen::MatrixXd* basis_out) {
  SparseOperator A = jacobian(p.state, p.mu, ws.lap);
  EigResult eig = leading_eigenvalues(A, settings.n_eigs, settings.eig_tol, warm);
  p.leading_eigs = eig.values;
  p.min_stability_eig = eig.values[0];
  p.stable = eig.values[0] < 0.0;
  if (basis_out != nullptr) *basis_out = eig.vectors;
}

int crossing_index(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(std::min(a.size(), b.size()));
  for (int k = 0; k < n; ++k) {
    if (a[k] * b[k] < 0.0) return k;
  }
  return -1;
}

void validate_settings(const ContinuationSettings& s) {
  if (!(s.min_step > 0.0) || s.min_step > s.initial_step ||
      s.initial_step > s.max_step) {
    throw std::invalid_argument(
        "continuation settings must satisfy 0 < min_step <= initial_step <= max_step");
  }
  if (s.direction != 1 && s.direction != -1) {
    throw std::invalid_argument("continuation direction must be +1 or -1");
  }
}

}  // namespace

Field newton_correct(const Field& guess, double mu_fixed, double tol,
                     int max_iters) {
  Workspace ws(guess.grid);
  Eigen::VectorXd u = guess.values;
  double rnorm = 0.0;
  for (int it = 0; it <= max_iters; ++it) {
    const Eigen::VectorXd theta = residual(u, mu_fixed, ws.lap);
    rnorm = theta.cwiseAbs().maxCoeff();
    if (!std::isfinite(rnorm)) {
      throw ConvergenceFailure("newton_correct: residual is not finite", u,
                               rnorm);
    }
    if (rnorm <= tol) return Field(std::move(u), guess.grid);
    if (it == max_iters) break;
    SparseOperator A = jacobian(u, mu_fixed, ws.lap);
    Eigen::SparseLU<SpMat> lu((SpMat(A.mat)));
    if (lu.info() != Eigen::Success) {
      throw ConvergenceFailure("newton_correct: singular Jacobian", u, rnorm);
    }
    const Eigen::VectorXd du = lu.solve(Eigen::VectorXd(-theta));
    if (!du.allFinite()) {
      throw ConvergenceFailure("newton_correct: linear solve failed", u, rnorm);
    }
    u += du;
  }
  throw ConvergenceFailure("newton_correct: no convergence within max iterations",
                           u, rnorm);
}

BranchPoint make_start_point(const Field& state, double mu,
                             const ContinuationSettings& settings) {
  Workspace ws(state.grid);
  const double rnorm = residual(state, mu, ws.lap).values.cwiseAbs().maxCoeff();
  if (rnorm > 100.0 * settings.newton_tol) {
    throw std::invalid_argument(
        "make_start_point: state does not satisfy the residual tolerance");
  }
  BranchPoint p;
  p.state = state;
  p.mu = mu;
  fill_spectrum(p, ws, settings, nullptr, nullptr);
  return p;
}

Branch continue_branch(const BranchPoint& start,
                       const ContinuationSettings& settings,
                       const std::string& label) {
  validate_settings(settings);
  Workspace ws(start.state.grid);
  const int J = ws.J();

  Branch branch;
  branch.label = label;
  branch.settings = settings;
  branch.status = BranchStatus::truncated;

  BranchPoint cur = start;
  {
    const double rnorm =
        residual(cur.state, cur.mu, ws.lap).values.cwiseAbs().maxCoeff();
    if (rnorm > 100.0 * settings.newton_tol) {
      throw std::invalid_argument(
          "continue_branch: start does not satisfy the residual tolerance");
    }
  }

  Eigen::MatrixXd eig_basis;
  if (cur.leading_eigs.size() == 0) {
    fill_spectrum(cur, ws, settings, nullptr, &eig_basis);
  } else {
    SparseOperator A = jacobian(cur.state, cur.mu, ws.lap);
    EigResult eig =
        leading_eigenvalues(A, settings.n_eigs, settings.eig_tol, nullptr);
    eig_basis = eig.vectors;
  }

  Eigen::VectorXd t_prev;
  if (cur.tangent.size() == J + 1 && cur.tangent.norm() > 0.5) {
    t_prev = static_cast<double>(settings.direction) * cur.tangent;
  } else {
    Eigen::VectorXd seed = Eigen::VectorXd::Zero(J + 1);
    seed[J] = static_cast<double>(settings.direction);
    if (!tangent_at(ws, cur.state.values, cur.mu, seed, t_prev)) {
      throw SingularityError("continue_branch: tangent solve failed at start");
    }
  }
  cur.tangent = t_prev;
  branch.points.push_back(cur);

  double delta = settings.initial_step;
  int easy_streak = 0;
  while (static_cast<int>(branch.points.size()) < settings.max_points) {
    const Eigen::VectorXd u_pred = cur.state.values + delta * t_prev.head(J);
    const double mu_pred = cur.mu + delta * t_prev[J];
    CorrectorOutcome corr = correct_bordered(
        ws, u_pred, mu_pred, t_prev, cur.state.values, cur.mu, delta,
        settings.newton_tol, settings.max_newton_iters);
    if (!corr.ok) {
      delta *= 0.5;
      easy_streak = 0;
      if (delta < settings.min_step) {
        throw ContinuationStall(
            "continue_branch: step size underflow at mu = " +
                std::to_string(cur.mu),
            std::move(branch));
      }
      continue;
    }

    BranchPoint np;
    np.state = Field(corr.u, ws.grid);
    np.mu = corr.mu;
    if (!tangent_at(ws, np.state.values, np.mu, t_prev, np.tangent)) {
      np.tangent = t_prev;  // singular bordered matrix exactly at the point
    }
    fill_spectrum(np, ws, settings, &eig_basis, &eig_basis);

    if (cur.tangent[J] * np.tangent[J] < 0.0) {
      np.kind = PointKind::fold;
    } else if (crossing_index(cur.leading_eigs, np.leading_eigs) >= 0) {
      np.kind = PointKind::branch_point;
    }
    branch.points.push_back(np);

    if (corr.iterations <= 4) {
      if (++easy_streak >= 3) {
        delta = std::min(2.0 * delta, settings.max_step);
        easy_streak = 0;
      }
    } else {
      easy_streak = 0;
    }

    cur = branch.points.back();
    t_prev = cur.tangent;
    if (cur.mu < settings.mu_min || cur.mu > settings.mu_max) {
      branch.status = BranchStatus::completed;
      break;
    }
  }
  return branch;
}

BranchPoint locate_singularity(const Branch& branch, std::size_t i) {
  if (i + 1 >= branch.points.size()) {
    throw std::invalid_argument("locate_singularity: bracket out of range");
  }
  const BranchPoint& a = branch.points[i];
  const BranchPoint& b = branch.points[i + 1];
  const ContinuationSettings& settings = branch.settings;
  Workspace ws(a.state.grid);
  const int J = ws.J();

  const bool fold_change = a.tangent[J] * b.tangent[J] < 0.0;
  const int k = crossing_index(a.leading_eigs, b.leading_eigs);
  if (!fold_change && k < 0) {
    throw std::invalid_argument(
        "locate_singularity: bracket has no test-function sign change");
  }
  const bool is_fold = fold_change;
  const PointKind kind = is_fold ? PointKind::fold : PointKind::branch_point;

  Eigen::VectorXd dw(J + 1);
  dw.head(J) = b.state.values - a.state.values;
  dw[J] = b.mu - a.mu;
  const double total = dw.norm();
  const Eigen::VectorXd t_sec = dw / total;

  const double f_lo = is_fold ? a.tangent[J] : a.leading_eigs[k];
  const double tol_test = 1e-6;

  double s_lo = 0.0, s_hi = 1.0;
  Eigen::MatrixXd eig_basis;
  BranchPoint best;
  double best_f = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < 200; ++iter) {
    const double s = 0.5 * (s_lo + s_hi);
    Eigen::VectorXd u_pred = a.state.values + s * dw.head(J);
    const double mu_pred = a.mu + s * dw[J];
    CorrectorOutcome corr = correct_bordered(
        ws, u_pred, mu_pred, t_sec, a.state.values, a.mu, s * total,
        settings.newton_tol, settings.max_newton_iters);
    if (!corr.ok) {
      throw ConvergenceFailure("locate_singularity: corrector failed", u_pred,
                               corr.residual_norm);
    }
    BranchPoint trial;
    trial.state = Field(corr.u, ws.grid);
    trial.mu = corr.mu;
    if (!tangent_at(ws, trial.state.values, trial.mu, t_sec, trial.tangent)) {
      trial.tangent = t_sec;
    }
    fill_spectrum(trial, ws, settings,
                  eig_basis.size() > 0 ? &eig_basis : nullptr, &eig_basis);

    const double f = is_fold ? trial.tangent[J] : trial.leading_eigs[k];
    if (std::abs(f) < std::abs(best_f)) {
      best = trial;
      best_f = f;
    }
    if (std::abs(f) <= tol_test) {
      best.kind = kind;
      return best;
    }
    if (f * f_lo > 0.0) {
      s_lo = s;
    } else {
      s_hi = s;
    }
    if (s_hi - s_lo < 1e-15) break;
  }
  if (std::abs(best_f) <= 10.0 * tol_test) {
    best.kind = kind;
    return best;
  }
  throw ConvergenceFailure(
      "locate_singularity: test function did not reach tolerance",
      best.state.values, std::abs(best_f));
}

SwitchResult switch_branch(const BranchPoint& bp,
                           const ContinuationSettings& settings) {
  if (bp.kind != PointKind::branch_point) {
    throw std::invalid_argument("switch_branch: point is not a branch point");
  }
  Workspace ws(bp.state.grid);
  const int J = ws.J();
  SparseOperator A = jacobian(bp.state, bp.mu, ws.lap);

  EigResult near0 = eigenpairs_near_zero(A, std::min(2, J), settings.eig_tol);
  if (near0.values.size() > 1) {
    const double t1 = std::abs(near0.values[0]);
    const double t2 = std::abs(near0.values[1]);
    if (!(t2 > std::max(10.0 * t1, 1e-4))) {
      throw SingularityError(
          "switch_branch: null eigenvalue is not isolated (|theta2| = " +
          std::to_string(t2) + ")");
    }
  }
  // The kick amplitude is grid-independent: psi is scaled to unit sup norm so
  // that eps is a function-space amplitude, not a coefficient-vector norm.
  Eigen::VectorXd psi = near0.vectors.col(0);
  int imax = 0;
  psi.cwiseAbs().maxCoeff(&imax);
  psi /= psi[imax];

  const double mu_new = bp.mu + settings.switch_mu_offset;
  double eps = settings.kick;
  Field corrected;
  bool done = false;
  for (int attempt = 0; attempt < 3 && !done; ++attempt) {
    try {
      Field guess(bp.state.values + eps * psi, ws.grid);
      corrected = newton_correct(guess, mu_new, settings.newton_tol,
                                 2 * settings.max_newton_iters);
      done = true;
    } catch (const ConvergenceFailure&) {
      if (attempt == 2) throw;
      eps *= 0.5;
    }
  }

  SwitchResult result;
  result.point.state = corrected;
  result.point.mu = mu_new;
  Eigen::VectorXd dw(J + 1);
  dw.head(J) = corrected.values - bp.state.values;
  dw[J] = mu_new - bp.mu;
  result.point.tangent = dw.normalized();
  fill_spectrum(result.point, ws, settings, nullptr, nullptr);
  result.switched = corrected.values.cwiseAbs().maxCoeff() > 1e-3;
  return result;
}

}  // namespace cqac
