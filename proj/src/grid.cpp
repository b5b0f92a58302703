#include "cqac/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace cqac {

Grid2D build_grid(double Lx, double Ly, int M, int N) {
  if (!(Lx > 0.0) || !(Ly > 0.0)) {
    throw std::invalid_argument("build_grid: domain half-widths must be positive");
  }
  if (M < 2 || N < 2) {
    throw std::invalid_argument("build_grid: M and N must be at least 2");
  }
  Grid2D g;
  g.Lx = Lx;
  g.Ly = Ly;
  g.M = M;
  g.N = N;
  g.hx = 2.0 * Lx / M;
  g.hy = 2.0 * Ly / N;
  g.J = (M - 1) * (N - 1);
  g.spacing_warning = (g.hx != g.hy);
  return g;
}

SparseOperator assemble_laplacian(const Grid2D& grid) {
  const double cx = 1.0 / (grid.hx * grid.hx);
  const double cy = 1.0 / (grid.hy * grid.hy);
  const double diag = -2.0 * cx - 2.0 * cy;
  const int Mi = grid.M - 1;
  const int Ni = grid.N - 1;

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(grid.J) * 5);
  for (int n = 1; n <= Ni; ++n) {
    for (int m = 1; m <= Mi; ++m) {
      const int j = grid.index(m, n);
      entries.emplace_back(j, j, diag);
      if (m > 1) entries.emplace_back(j, grid.index(m - 1, n), cx);
      if (m < Mi) entries.emplace_back(j, grid.index(m + 1, n), cx);
      if (n > 1) entries.emplace_back(j, grid.index(m, n - 1), cy);
      if (n < Ni) entries.emplace_back(j, grid.index(m, n + 1), cy);
    }
  }

  SparseOperator op;
  op.mat.resize(grid.J, grid.J);
  op.mat.setFromTriplets(entries.begin(), entries.end());
  op.mat.makeCompressed();
  op.symmetric = true;
  return op;
}

Eigen::VectorXd reaction(const Eigen::VectorXd& u, double mu) {
  const Eigen::ArrayXd a = u.array();
  const Eigen::ArrayXd a2 = a * a;
  return 4.0 * (mu * a + a2 * a - a2 * a2 * a);
}

Field reaction(const Field& u, double mu) {
  return Field(reaction(u.values, mu), u.grid);
}

Eigen::VectorXd residual(const Eigen::VectorXd& u, double mu,
                         const SparseOperator& lap) {
  if (lap.dimension() != u.size()) {
    throw std::invalid_argument("residual: operator/field dimension mismatch");
  }
  return lap.mat * u + reaction(u, mu);
}

Field residual(const Field& u, double mu, const SparseOperator& lap) {
  return Field(residual(u.values, mu, lap), u.grid);
}

SparseOperator jacobian(const Eigen::VectorXd& u, double mu,
                        const SparseOperator& lap) {
  if (lap.dimension() != u.size()) {
    throw std::invalid_argument("jacobian: operator/field dimension mismatch");
  }
  SparseOperator op;
  op.mat = lap.mat;
  const Eigen::ArrayXd a2 = u.array().square();
  const Eigen::ArrayXd shift = 4.0 * (mu + 3.0 * a2 - 5.0 * a2 * a2);
  for (int j = 0; j < u.size(); ++j) {
    op.mat.coeffRef(j, j) += shift[j];
  }
  op.symmetric = lap.symmetric;
  return op;
}

SparseOperator jacobian(const Field& u, double mu, const SparseOperator& lap) {
  return jacobian(u.values, mu, lap);
}

double l2_norm(const Field& u) {
  return std::sqrt(u.grid.hx * u.grid.hy * u.values.squaredNorm());
}

}  // namespace cqac
