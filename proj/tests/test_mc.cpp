#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cqac/errors.hpp"
#include "cqac/mc.hpp"

using namespace cqac;

namespace {

Grid2D scalar_grid() { return build_grid(1.0, 1.0, 2, 2); }

NoiseSpec scalar_noise(double sigma) {
  Grid2D g = scalar_grid();
  Eigen::VectorXd phi(1);
  phi << 1.0;
  return make_noise_spec(sigma, phi, GKind::additive, g);
}

}  // namespace

TEST_CASE("counter streams are deterministic and well-behaved") {
  CounterStream s = CounterStream::make(42, 0, 3);
  CHECK(s.gauss(7) == CounterStream::make(42, 0, 3).gauss(7));
  CHECK(s.gauss(7) != CounterStream::make(42, 0, 4).gauss(7));
  CHECK(s.gauss(7) != CounterStream::make(42, 1, 3).gauss(7));
  CHECK(s.gauss(7) != CounterStream::make(43, 0, 3).gauss(7));

  const int n = 20000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.gauss(static_cast<std::uint64_t>(i));
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) <= 0.05);
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("euler_maruyama: zero noise at a fixed point stays identically zero") {
  Grid2D g = scalar_grid();
  PathStats stats =
      euler_maruyama(Field::zero(g), 0.7, scalar_noise(0.0), 1e-3, 0.5, 1);
  for (double v : stats.probe) CHECK(v == 0.0);
  for (double v : stats.domain_max) CHECK(v == 0.0);
  for (double v : stats.domain_min) CHECK(v == 0.0);
}

TEST_CASE("euler_maruyama: bitwise reproducibility for a fixed seed") {
  Grid2D g = build_grid(1.0, 0.9, 8, 7);
  NoiseSpec spec = make_noise_spec(5.0, phi_linear(4), GKind::additive, g);
  PathStats a = euler_maruyama(Field::zero(g), 0.5, spec, 1e-5, 0.02, 99, 2);
  PathStats b = euler_maruyama(Field::zero(g), 0.5, spec, 1e-5, 0.02, 99, 2);
  REQUIRE(a.t.size() == b.t.size());
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    CHECK(a.probe[i] == b.probe[i]);
    CHECK(a.domain_max[i] == b.domain_max[i]);
    CHECK(a.domain_min[i] == b.domain_min[i]);
  }
  PathStats c = euler_maruyama(Field::zero(g), 0.5, spec, 1e-5, 0.02, 99, 3);
  bool any_diff = false;
  for (std::size_t i = 1; i < a.t.size(); ++i) {
    any_diff = any_diff || (a.probe[i] != c.probe[i]);
  }
  CHECK(any_diff);
}

TEST_CASE("euler_maruyama: zero-noise path equals explicit Euler exactly") {
  Grid2D g = build_grid(1.0, 0.9, 7, 6);
  SparseOperator lap = assemble_laplacian(g);
  Eigen::VectorXd p0v(g.J);
  for (int j = 0; j < g.J; ++j) p0v[j] = 0.1 * std::sin(1.0 + j);
  Field p0(p0v, g);
  NoiseSpec spec = make_noise_spec(0.0, phi_linear(3), GKind::additive, g);
  const double dt = 1e-4, T = 0.01, mu = 0.8;
  PathStats stats = euler_maruyama(p0, mu, spec, dt, T, 5);

  Eigen::VectorXd p = p0v;
  int probe = stats.probe_node;
  for (std::size_t i = 1; i < stats.t.size(); ++i) {
    p += dt * (lap.mat * p + reaction(p, mu));
    CHECK(stats.probe[i] == p[probe]);
    CHECK(stats.domain_max[i] == p.maxCoeff());
    CHECK(stats.domain_min[i] == p.minCoeff());
  }
}

namespace {
double ensemble_variance(const NoiseSpec& spec, double mu, double dt, double T,
                         std::uint64_t seed, int paths) {
  Grid2D g = scalar_grid();
  double acc = 0.0;
  for (int path = 0; path < paths; ++path) {
    PathStats stats = euler_maruyama(Field::zero(g), mu, spec, dt, T, seed,
                                     static_cast<std::uint64_t>(path));
    acc += stationary_variance(stats, 0.1 * T);
  }
  return acc / paths;
}
}  // namespace

TEST_CASE("euler_maruyama: small-noise scalar variance matches the OU value") {
  // a = 2, b^2 = sigma_tilde * exp(-0.1); at sigma_tilde = 0.01 the
  // linearization is valid and the stationary variance is b^2/(2a).
  NoiseSpec spec = scalar_noise(0.01);
  const double target = 0.01 * std::exp(-0.1) / 4.0;
  const double estimate = ensemble_variance(spec, 0.5, 1e-4, 50.0, 2024, 30);
  CHECK(std::abs(estimate - target) <= 0.1 * target);
}

TEST_CASE("euler_maruyama: order-one noise matches the nonlinear density") {
  // At sigma_tilde = 5 the path explores the cubic-quintic shoulders and the
  // OU value no longer applies; the oracle is the 1D stationary density
  //   rho(p) ~ exp(2 Phi(p)/b^2),  Phi(p) = -p^2 + p^4 - (2/3) p^6
  // integrated by Simpson quadrature.
  const double b2 = 5.0 * std::exp(-0.1);
  auto phi_pot = [](double p) {
    return -p * p + std::pow(p, 4) - 2.0 / 3.0 * std::pow(p, 6);
  };
  const int n = 4000;
  const double lo = -4.0, hi = 4.0, h = (hi - lo) / n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double p = lo + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const double rho = std::exp(2.0 * phi_pot(p) / b2);
    num += w * p * p * rho;
    den += w * rho;
  }
  const double target = num / den;
  CHECK(target == doctest::Approx(0.554346).epsilon(1e-4));

  NoiseSpec spec = scalar_noise(5.0);
  const double estimate = ensemble_variance(spec, 0.5, 1e-4, 50.0, 2024, 30);
  CHECK(std::abs(estimate - target) <= 0.1 * target);
}

TEST_CASE("euler_maruyama: weak-convergence sanity under dt halving") {
  Grid2D g = scalar_grid();
  NoiseSpec spec = scalar_noise(5.0);
  const double T = 40.0;
  const int paths = 20;
  auto ensemble = [&](double dt, std::uint64_t seed) {
    double mean = 0.0, m2 = 0.0;
    for (int path = 0; path < paths; ++path) {
      PathStats s = euler_maruyama(Field::zero(g), 0.5, spec, dt, T, seed,
                                   static_cast<std::uint64_t>(path));
      const double v = stationary_variance(s, 4.0);
      mean += v;
      m2 += v * v;
    }
    mean /= paths;
    const double var = m2 / paths - mean * mean;
    return std::pair{mean, std::sqrt(var / paths)};
  };
  auto [v1, se1] = ensemble(2e-3, 7001);
  auto [v2, se2] = ensemble(1e-3, 7002);
  const double se = std::sqrt(se1 * se1 + se2 * se2);
  CHECK(std::abs(v1 - v2) <= 3.0 * se);
}

TEST_CASE("euler_maruyama: divergence guard reports blow-up time") {
  Grid2D g = build_grid(1.0, 0.9, 10, 9);
  NoiseSpec spec = make_noise_spec(5.0, phi_linear(2), GKind::additive, g);
  try {
    euler_maruyama(Field::zero(g), 1.0, spec, 0.5, 10.0, 3);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.blowup_time() > 0.0);
    CHECK(e.blowup_time() <= 10.0);
  }
}

TEST_CASE("euler_maruyama: stability warning flag") {
  Grid2D g = build_grid(1.0, 0.9, 10, 9);
  NoiseSpec spec = make_noise_spec(0.0, phi_linear(2), GKind::additive, g);
  const double hx2 = g.hx * g.hx, hy2 = g.hy * g.hy;
  const double bound = hx2 * hy2 / (2.0 * (hx2 + hy2));
  PathStats ok = euler_maruyama(Field::zero(g), 0.5, spec, 0.5 * bound, 0.02, 1);
  CHECK_FALSE(ok.dt_stability_warning);
  PathStats warned =
      euler_maruyama(Field::zero(g), 0.5, spec, 2.0 * bound, 0.02, 1);
  CHECK(warned.dt_stability_warning);
}

TEST_CASE("containment_check: fixed cases and monotonicity") {
  Grid2D g = scalar_grid();
  NoiseSpec spec = scalar_noise(5.0);
  PathStats stats = euler_maruyama(Field::zero(g), 0.5, spec, 1e-3, 2.0, 11);

  CovBounds infinite{std::numeric_limits<double>::infinity(),
                     -std::numeric_limits<double>::infinity()};
  CHECK(containment_check(stats, infinite, 0.2) == 0.0);

  NoiseSpec off = scalar_noise(0.0);
  PathStats still = euler_maruyama(Field::zero(g), 0.5, off, 1e-3, 2.0, 11);
  CHECK(containment_check(still, CovBounds{0.5, -0.5}, 0.2) == 0.0);

  const double f_tight = containment_check(stats, CovBounds{0.5, -0.5}, 0.2);
  const double f_wide = containment_check(stats, CovBounds{1.5, -1.5}, 0.2);
  CHECK(f_wide <= f_tight);

  CHECK_THROWS_AS(containment_check(stats, infinite, 3.0),
                  std::invalid_argument);
}

TEST_CASE("path stats invariant: probe stays within the domain extrema") {
  Grid2D g = build_grid(1.0, 0.9, 9, 8);
  NoiseSpec spec = make_noise_spec(5.0, phi_linear(4), GKind::additive, g);
  PathStats stats = euler_maruyama(Field::zero(g), 1.0, spec, 1e-5, 0.01, 77);
  for (std::size_t i = 0; i < stats.t.size(); ++i) {
    CHECK(stats.probe[i] >= stats.domain_min[i]);
    CHECK(stats.probe[i] <= stats.domain_max[i]);
  }
}
