#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "cqac/analysis.hpp"
#include "cqac/grid.hpp"
#include "cqac/noise.hpp"

namespace cqac {

/// Counter-based random stream: stateless, reproducible per
/// (seed, path, mode) triple regardless of evaluation order.
struct CounterStream {
  std::uint64_t key = 0;

  static CounterStream make(std::uint64_t seed, std::uint64_t path,
                            std::uint64_t mode);
  /// Uniform in (0, 1].
  double uniform(std::uint64_t counter) const;
  /// Standard normal via Box-Muller, one draw per counter value.
  double gauss(std::uint64_t counter) const;
};

/// Time statistics of one Euler-Maruyama sample path: probe-node trace and
/// the domain extrema over all interior nodes at every recorded step.
struct PathStats {
  std::vector<double> t;
  std::vector<double> probe;
  std::vector<double> domain_max;
  std::vector<double> domain_min;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  double dt = 0.0;
  double T = 0.0;
  int probe_node = 0;
  bool dt_stability_warning = false;
  double exit_fraction = -1.0;  // set by the caller after containment_check
};

/// Integrates dp = theta(p;mu) dt + sigma(p) dW with the explicit
/// Euler-Maruyama scheme. The diffusion matrix is constant for additive noise
/// and reassembled each step for state-dependent kinds. Throws
/// DivergenceError if ||p||_inf exceeds the overflow guard.
PathStats euler_maruyama(const Field& p0, double mu, const NoiseSpec& spec,
                         double dt, double T, std::uint64_t seed,
                         std::uint64_t path_index = 0);

/// Fraction of retained steps (t >= transient_cut) whose domain extrema leave
/// the band [c_min, c_max].
double containment_check(const PathStats& stats, const CovBounds& bounds,
                         double transient_cut);

/// Sample variance of the probe trace over t >= transient_cut.
double stationary_variance(const PathStats& stats, double transient_cut);

}  // namespace cqac
