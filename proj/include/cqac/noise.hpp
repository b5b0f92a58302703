#pragma once

#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "cqac/grid.hpp"

namespace cqac {

/// How the scalar noise map G(u) depends on the state.
enum class GKind { additive, quad_sup, sup_shift };

/// Spectral description of the Q-Wiener forcing: eigenvalue law
/// lambda_k = sigma_tilde * exp(-phi_k/10) over K sine modes.
struct NoiseSpec {
  double sigma_tilde = 5.0;
  Eigen::VectorXd phi;  // non-negative, non-decreasing; size K
  int K = 0;
  GKind g_kind = GKind::additive;
  std::vector<std::pair<int, int>> mode_table;  // (k1,k2) pairs, size K
};

/// Assembled J x K diffusion matrix B with its provenance.
struct NoiseMatrix {
  Eigen::MatrixXd B;
  Grid2D grid;
  NoiseSpec spec;
};

/// lambda_k = sigma_tilde * exp(-phi_k / 10), k = 1..K.
Eigen::VectorXd eigenvalues(const NoiseSpec& spec);

/// First K index pairs (k1,k2) ordered by the continuous Dirichlet eigenvalue
/// pi^2 (k1^2/(4 Lx^2) + k2^2/(4 Ly^2)); ties broken by smaller k1.
std::vector<std::pair<int, int>> rank_modes(const Grid2D& grid, int K);

/// Node samples of sin(pi k1 (x+Lx)/(2Lx)) * sin(pi k2 (y+Ly)/(2Ly)).
Field eigenfunction_samples(int k1, int k2, const Grid2D& grid);

/// Scalar or per-node amplitude G(u*), depending on the noise kind.
using Amplitude = std::variant<double, Eigen::VectorXd>;
Amplitude amplitude(const Field& u_star, GKind g_kind);

/// B[j,k] = sqrt(lambda_k) * G-value at node j * e_{(k1,k2)} sample at node j.
NoiseMatrix assemble_B(const Field& u_star, const NoiseSpec& spec,
                       const Grid2D& grid);

/// Validates phi and fills K and the mode table for the given grid.
NoiseSpec make_noise_spec(double sigma_tilde, Eigen::VectorXd phi,
                          GKind g_kind, const Grid2D& grid);

/// phi_k = k, k = 1..K (the default eigenvalue decay of the study).
Eigen::VectorXd phi_linear(int K);
/// phi_k = a*(k-1) + b, k = 1..K.
Eigen::VectorXd phi_affine(int K, double a, double b);

}  // namespace cqac
