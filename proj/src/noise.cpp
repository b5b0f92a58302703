#include "cqac/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cqac {

Eigen::VectorXd eigenvalues(const NoiseSpec& spec) {
  return spec.sigma_tilde * (-spec.phi.array() / 10.0).exp();
}

std::vector<std::pair<int, int>> rank_modes(const Grid2D& grid, int K) {
  if (K < 1) {
    throw std::invalid_argument("rank_modes: K must be at least 1");
  }
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double cx = pi2 / (4.0 * grid.Lx * grid.Lx);
  const double cy = pi2 / (4.0 * grid.Ly * grid.Ly);

  struct Entry {
    double nu;
    int k1, k2;
  };
  // Any pair with k1 > K (or k2 > K) is preceded by at least K smaller modes,
  // so the [1..K]^2 corner always contains the first K pairs.
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(K) * K);
  for (int k1 = 1; k1 <= K; ++k1) {
    for (int k2 = 1; k2 <= K; ++k2) {
      entries.push_back({cx * k1 * k1 + cy * k2 * k2, k1, k2});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.nu != b.nu) return a.nu < b.nu;
    if (a.k1 != b.k1) return a.k1 < b.k1;
    return a.k2 < b.k2;
  });

  std::vector<std::pair<int, int>> table;
  table.reserve(K);
  for (int i = 0; i < K; ++i) {
    table.emplace_back(entries[i].k1, entries[i].k2);
  }
  return table;
}

Field eigenfunction_samples(int k1, int k2, const Grid2D& grid) {
  if (k1 < 1 || k2 < 1) {
    throw std::invalid_argument("eigenfunction_samples: k1, k2 must be >= 1");
  }
  const double pi = std::numbers::pi;
  Eigen::VectorXd v(grid.J);
  for (int j = 0; j < grid.J; ++j) {
    const double x = grid.node_x(j);
    const double y = grid.node_y(j);
    v[j] = std::sin(pi * k1 * (x + grid.Lx) / (2.0 * grid.Lx)) *
           std::sin(pi * k2 * (y + grid.Ly) / (2.0 * grid.Ly));
  }
  return Field(std::move(v), grid);
}

Amplitude amplitude(const Field& u_star, GKind g_kind) {
  switch (g_kind) {
    case GKind::additive:
      return 1.0;
    case GKind::quad_sup: {
      const double sup = u_star.values.cwiseAbs().maxCoeff();
      return 0.5 * sup * sup;
    }
    case GKind::sup_shift: {
      const double sup = u_star.values.cwiseAbs().maxCoeff();
      return Eigen::VectorXd(sup - u_star.values.array());
    }
  }
  throw std::invalid_argument("amplitude: unknown g_kind");
}

NoiseMatrix assemble_B(const Field& u_star, const NoiseSpec& spec,
                       const Grid2D& grid) {
  if (static_cast<int>(spec.mode_table.size()) != spec.K ||
      spec.phi.size() != spec.K) {
    throw std::invalid_argument("assemble_B: inconsistent NoiseSpec");
  }
  if (u_star.size() != grid.J) {
    throw std::invalid_argument("assemble_B: state/grid dimension mismatch");
  }
  const Eigen::VectorXd lambda = eigenvalues(spec);
  const Amplitude g = amplitude(u_star, spec.g_kind);

  NoiseMatrix out;
  out.B.resize(grid.J, spec.K);
  for (int k = 0; k < spec.K; ++k) {
    auto [k1, k2] = spec.mode_table[k];
    Eigen::VectorXd col =
        std::sqrt(lambda[k]) * eigenfunction_samples(k1, k2, grid).values;
    if (std::holds_alternative<double>(g)) {
      col *= std::get<double>(g);
    } else {
      col.array() *= std::get<Eigen::VectorXd>(g).array();
    }
    out.B.col(k) = col;
  }
  out.grid = grid;
  out.spec = spec;
  return out;
}

NoiseSpec make_noise_spec(double sigma_tilde, Eigen::VectorXd phi,
                          GKind g_kind, const Grid2D& grid) {
  if (sigma_tilde < 0.0) {
    throw std::invalid_argument("make_noise_spec: sigma_tilde must be >= 0");
  }
  const int K = static_cast<int>(phi.size());
  if (K < 1) {
    throw std::invalid_argument("make_noise_spec: phi must be non-empty");
  }
  for (int k = 0; k < K; ++k) {
    if (phi[k] < 0.0) {
      throw std::invalid_argument("make_noise_spec: phi must be non-negative");
    }
    if (k > 0 && phi[k] < phi[k - 1]) {
      throw std::invalid_argument("make_noise_spec: phi must be non-decreasing");
    }
  }
  NoiseSpec spec;
  spec.sigma_tilde = sigma_tilde;
  spec.phi = std::move(phi);
  spec.K = K;
  spec.g_kind = g_kind;
  spec.mode_table = rank_modes(grid, K);
  return spec;
}

Eigen::VectorXd phi_linear(int K) {
  return Eigen::VectorXd::LinSpaced(K, 1.0, static_cast<double>(K));
}

Eigen::VectorXd phi_affine(int K, double a, double b) {
  Eigen::VectorXd phi(K);
  for (int k = 0; k < K; ++k) phi[k] = a * k + b;
  return phi;
}

}  // namespace cqac
