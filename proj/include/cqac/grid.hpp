#pragma once

#include <utility>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace cqac {

/// Regular mesh on the rectangle [-Lx,Lx] x [-Ly,Ly] with M (resp. N)
/// subdivisions in x (resp. y). Only the (M-1)(N-1) interior nodes carry
/// unknowns; Dirichlet boundary rows are eliminated. Interior nodes are
/// numbered m-fastest: the 1-based pair (m,n) with m in 1..M-1, n in 1..N-1
/// maps to the 0-based vector index j = (n-1)(M-1) + (m-1).
struct Grid2D {
  double Lx = 1.0;
  double Ly = 1.0;
  int M = 2;
  int N = 2;
  double hx = 1.0;
  double hy = 1.0;
  int J = 1;
  bool spacing_warning = false;  // set when hx != hy

  int index(int m, int n) const { return (n - 1) * (M - 1) + (m - 1); }
  std::pair<int, int> node(int j) const {
    return {j % (M - 1) + 1, j / (M - 1) + 1};
  }
  double x(int m) const { return -Lx + m * hx; }
  double y(int n) const { return -Ly + n * hy; }
  double node_x(int j) const { return x(j % (M - 1) + 1); }
  double node_y(int j) const { return y(j / (M - 1) + 1); }

  bool same_shape(const Grid2D& other) const {
    return M == other.M && N == other.N && Lx == other.Lx && Ly == other.Ly;
  }
};

/// Builds the grid. Throws std::invalid_argument for non-positive lengths or
/// M, N < 2; an irregular spacing hx != hy is allowed and only flagged.
Grid2D build_grid(double Lx, double Ly, int M, int N);

/// Sparse real operator on the interior nodes, compressed-row storage.
struct SparseOperator {
  Eigen::SparseMatrix<double, Eigen::RowMajor> mat;
  bool symmetric = false;

  int dimension() const { return static_cast<int>(mat.rows()); }
};

/// Solution samples at the interior nodes of a grid.
struct Field {
  Eigen::VectorXd values;
  Grid2D grid;

  Field() = default;
  Field(Eigen::VectorXd v, const Grid2D& g) : values(std::move(v)), grid(g) {}

  int size() const { return static_cast<int>(values.size()); }

  /// Constant field on a grid.
  static Field constant(const Grid2D& g, double value) {
    return Field(Eigen::VectorXd::Constant(g.J, value), g);
  }
  static Field zero(const Grid2D& g) { return constant(g, 0.0); }
};

/// Five-point discrete Laplacian with homogeneous Dirichlet conditions:
/// diagonal -2/hx^2 - 2/hy^2, x-neighbors 1/hx^2, y-neighbors 1/hy^2.
SparseOperator assemble_laplacian(const Grid2D& grid);

/// Cubic-quintic reaction term f(u;mu) = 4(mu*u + u^3 - u^5), componentwise.
Eigen::VectorXd reaction(const Eigen::VectorXd& u, double mu);
Field reaction(const Field& u, double mu);

/// Steady-state residual of the discretized system,
/// theta(p;mu) = Lap*p + 4(mu*p + p^3 - p^5).
Eigen::VectorXd residual(const Eigen::VectorXd& u, double mu,
                         const SparseOperator& lap);
Field residual(const Field& u, double mu, const SparseOperator& lap);

/// Jacobian of the residual: Lap + diag(4(mu + 3u^2 - 5u^4)). Symmetric.
SparseOperator jacobian(const Eigen::VectorXd& u, double mu,
                        const SparseOperator& lap);
SparseOperator jacobian(const Field& u, double mu, const SparseOperator& lap);

/// Discrete L2 norm sqrt(hx*hy*sum(p_j^2)).
double l2_norm(const Field& u);

}  // namespace cqac
