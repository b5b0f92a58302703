#include "cqac/mc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cqac/errors.hpp"

namespace cqac {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

std::uint64_t fin(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr double kOverflowGuard = 1e6;

}  // namespace

CounterStream CounterStream::make(std::uint64_t seed, std::uint64_t path,
                                  std::uint64_t mode) {
  std::uint64_t k = fin(seed + kGamma);
  k = fin(k ^ (path * 0xBF58476D1CE4E5B9ull + 0x632BE59BD9B4E019ull));
  k = fin(k ^ (mode * 0x94D049BB133111EBull + 0xD6E8FEB86659FD93ull));
  return CounterStream{k};
}

double CounterStream::uniform(std::uint64_t counter) const {
  const std::uint64_t bits = fin(key + (counter + 1) * kGamma);
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

double CounterStream::gauss(std::uint64_t counter) const {
  const double u1 = uniform(2 * counter);
  const double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

PathStats euler_maruyama(const Field& p0, double mu, const NoiseSpec& spec,
                         double dt, double T, std::uint64_t seed,
                         std::uint64_t path_index) {
  if (!(dt > 0.0)) throw std::invalid_argument("euler_maruyama: dt must be > 0");
  if (T < 0.0) throw std::invalid_argument("euler_maruyama: T must be >= 0");
  const Grid2D& g = p0.grid;
  SparseOperator lap = assemble_laplacian(g);

  PathStats stats;
  stats.seed = seed;
  stats.path_index = path_index;
  stats.dt = dt;
  stats.T = T;
  const double hx2 = g.hx * g.hx, hy2 = g.hy * g.hy;
  stats.dt_stability_warning = dt > hx2 * hy2 / (2.0 * (hx2 + hy2));

  // Probe at the interior node closest to the domain center.
  int probe = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.J; ++j) {
    const double d2 = g.node_x(j) * g.node_x(j) + g.node_y(j) * g.node_y(j);
    if (d2 < best) {
      best = d2;
      probe = j;
    }
  }
  stats.probe_node = probe;

  // sqrt(lambda_k)-scaled mode samples; equals B for additive noise.
  NoiseSpec additive = spec;
  additive.g_kind = GKind::additive;
  const Eigen::MatrixXd E = assemble_B(Field::zero(g), additive, g).B;

  std::vector<CounterStream> streams;
  streams.reserve(static_cast<std::size_t>(spec.K));
  for (int k = 0; k < spec.K; ++k) {
    streams.push_back(
        CounterStream::make(seed, path_index, static_cast<std::uint64_t>(k)));
  }

  const long long n = std::llround(T / dt);
  stats.t.reserve(static_cast<std::size_t>(n) + 1);
  stats.probe.reserve(static_cast<std::size_t>(n) + 1);
  stats.domain_max.reserve(static_cast<std::size_t>(n) + 1);
  stats.domain_min.reserve(static_cast<std::size_t>(n) + 1);

  Eigen::VectorXd p = p0.values;
  auto record = [&](double time) {
    stats.t.push_back(time);
    stats.probe.push_back(p[probe]);
    stats.domain_max.push_back(p.maxCoeff());
    stats.domain_min.push_back(p.minCoeff());
  };
  record(0.0);

  const double sqdt = std::sqrt(dt);
  Eigen::VectorXd dW(spec.K);
  for (long long i = 1; i <= n; ++i) {
    const Eigen::VectorXd drift = lap.mat * p + reaction(p, mu);
    for (int k = 0; k < spec.K; ++k) {
      dW[k] = sqdt * streams[static_cast<std::size_t>(k)].gauss(
                         static_cast<std::uint64_t>(i - 1));
    }
    Eigen::VectorXd noise = E * dW;
    switch (spec.g_kind) {
      case GKind::additive:
        break;
      case GKind::quad_sup: {
        const double sup = p.cwiseAbs().maxCoeff();
        noise *= 0.5 * sup * sup;
        break;
      }
      case GKind::sup_shift: {
        const double sup = p.cwiseAbs().maxCoeff();
        noise.array() *= (sup - p.array());
        break;
      }
    }
    p += dt * drift + noise;
    const double t_now = static_cast<double>(i) * dt;
    if (!p.allFinite() || p.cwiseAbs().maxCoeff() > kOverflowGuard) {
      throw DivergenceError("euler_maruyama: path diverged", t_now);
    }
    record(t_now);
  }
  return stats;
}

double containment_check(const PathStats& stats, const CovBounds& bounds,
                         double transient_cut) {
  if (!(transient_cut < stats.T) && stats.T > 0.0) {
    throw std::invalid_argument(
        "containment_check: transient_cut must be below the final time");
  }
  long long retained = 0, outside = 0;
  for (std::size_t i = 0; i < stats.t.size(); ++i) {
    if (stats.t[i] < transient_cut) continue;
    ++retained;
    if (stats.domain_max[i] > bounds.c_max || stats.domain_min[i] < bounds.c_min) {
      ++outside;
    }
  }
  if (retained == 0) return 0.0;
  return static_cast<double>(outside) / static_cast<double>(retained);
}

double stationary_variance(const PathStats& stats, double transient_cut) {
  double sum = 0.0;
  long long n = 0;
  for (std::size_t i = 0; i < stats.t.size(); ++i) {
    if (stats.t[i] < transient_cut) continue;
    sum += stats.probe[i];
    ++n;
  }
  if (n < 2) return 0.0;
  const double mean = sum / static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < stats.t.size(); ++i) {
    if (stats.t[i] < transient_cut) continue;
    const double d = stats.probe[i] - mean;
    acc += d * d;
  }
  return acc / static_cast<double>(n - 1);
}

}  // namespace cqac
