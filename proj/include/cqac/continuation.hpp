#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cqac/errors.hpp"
#include "cqac/grid.hpp"

namespace cqac {

enum class PointKind { regular, fold, branch_point };

std::string to_string(PointKind kind);
PointKind point_kind_from_string(const std::string& s);

/// One accepted point of a continuation run. `tangent` is the unit tangent of
/// the curve in (state, mu) space; `min_stability_eig` is the largest (i.e.
/// stability-determining) eigenvalue of the Jacobian at the point, and
/// `leading_eigs` holds the tracked top eigenvalues in descending order.
struct BranchPoint {
  Field state;
  double mu = 0.0;
  Eigen::VectorXd tangent;  // size J+1, unit Euclidean norm
  double min_stability_eig = 0.0;
  Eigen::VectorXd leading_eigs;
  PointKind kind = PointKind::regular;
  bool stable = false;
};

struct ContinuationSettings {
  double initial_step = 0.02;
  double min_step = 1e-8;
  double max_step = 0.1;
  double newton_tol = 1e-10;
  int max_newton_iters = 12;
  int max_points = 500;
  int direction = +1;     // sign applied to the starting tangent
  double eig_tol = 1e-9;  // eigenvalue-solve tolerance
  int n_eigs = 4;         // leading eigenvalues tracked per point
  double kick = 0.1;      // branch-switch amplitude epsilon
  double switch_mu_offset = -0.015;  // mu perturbation for the switch corrector
  double mu_min = 0.0;
  double mu_max = 4.0;
};

enum class BranchStatus {
  completed,  // left the [mu_min, mu_max] window
  truncated,  // hit max_points
};

struct Branch {
  std::vector<BranchPoint> points;
  std::string label;
  ContinuationSettings settings;
  BranchStatus status = BranchStatus::completed;
};

/// Step size underflowed during continuation; carries the partial branch.
class ContinuationStall : public std::runtime_error {
public:
  ContinuationStall(const std::string& what, Branch partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Branch& partial() const { return partial_; }

private:
  Branch partial_;
};

struct EigResult {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns matching values
  int iterations = 0;
};

/// Leading (algebraically largest) eigenvalues of a symmetric operator by
/// shift-inverted subspace iteration; `warm_basis` seeds the subspace.
EigResult leading_eigenvalues(const SparseOperator& A, int count, double tol,
                              const Eigen::MatrixXd* warm_basis = nullptr);

/// Eigenvalues of smallest magnitude (shift-invert at zero).
EigResult eigenpairs_near_zero(const SparseOperator& A, int count, double tol);

/// Largest eigenvalue of a symmetric operator.
double stability_eig(const SparseOperator& A, double tol = 1e-9);

/// Newton iteration for the steady state at fixed mu. Converges when
/// ||residual||_inf <= tol; throws ConvergenceFailure otherwise.
Field newton_correct(const Field& guess, double mu_fixed, double tol = 1e-10,
                     int max_iters = 20);

/// Builds a starting BranchPoint from a state already satisfying the residual
/// tolerance (tangent left empty; continue_branch orients it).
BranchPoint make_start_point(const Field& state, double mu,
                             const ContinuationSettings& settings);

/// Pseudo-arclength predictor-corrector continuation. Adapts the step on
/// corrector failure, tracks the leading Jacobian eigenvalues, and flags folds
/// (tangent-mu sign change) and branch points (eigenvalue sign change without
/// a tangent-mu sign change) on the newly accepted point.
Branch continue_branch(const BranchPoint& start,
                       const ContinuationSettings& settings,
                       const std::string& label = "");

/// Refines the singular point bracketed by points[i] and points[i+1] by
/// bisection on arclength, re-correcting at every trial. The test function is
/// the crossing eigenvalue for branch points and the tangent mu-component for
/// folds; iteration stops when it is within 1e-6.
BranchPoint locate_singularity(const Branch& branch, std::size_t i);

struct SwitchResult {
  BranchPoint point;
  bool switched = false;  // false when the corrector fell back to the old branch
};

/// Branch switching at a simple branch point: kicks the state along the unit
/// null eigenvector and corrects at a slightly perturbed mu.
SwitchResult switch_branch(const BranchPoint& bp,
                           const ContinuationSettings& settings);

}  // namespace cqac
