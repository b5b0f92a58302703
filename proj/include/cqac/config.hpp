#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqac/continuation.hpp"
#include "cqac/errors.hpp"
#include "cqac/krylov.hpp"
#include "cqac/noise.hpp"

namespace cqac {

enum class RunKind {
  det_continue,
  cov_continue,
  mc_validate,
  fit_scaling,
  solver_bench,
};

RunKind run_kind_from_string(const std::string& s);
std::string to_string(RunKind kind);

struct GridConfig {
  double Lx = 1.0;
  double Ly = 0.9;
  int M = 50;
  int N = 45;
};

struct ContinuationConfig {
  ContinuationSettings settings;  // global defaults
  std::vector<std::string> branches = {"Gamma0", "Gamma1"};
  std::map<std::string, ContinuationSettings> overrides;  // per-branch
};

struct NoiseConfig {
  double sigma_tilde = 5.0;
  std::string phi_rule = "linear_k";  // or "affine(a,b)"
  std::optional<std::vector<double>> phi;  // explicit values win
  int K = 8;
  GKind g_kind = GKind::additive;
  std::string label;  // used in artifact names

  NoiseSpec resolve(const Grid2D& grid) const;
};

struct McConfig {
  double mu = 1.0;
  double dt = 1e-5;
  double T = 1.0;
  std::uint64_t seed = 1;
  int paths = 1;
  double transient_frac = 0.1;  // discard t < transient_frac * T
  bool write_all_paths = false;
};

struct FitConfig {
  std::string input_csv;
  double mu_crit = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::string norm = "cov_max_norm";
  int exclude_nearest = 2;  // points closest to mu_crit dropped
};

struct CovConfig {
  std::string branch_states;        // existing artifact; empty = compute
  std::string branch = "Gamma0";    // branch to compute when no artifact given
  double mu_lo = 0.0;
  double mu_hi = 4.0;
  bool descending = false;          // process points in decreasing mu
  bool dump_variance_surface = false;
};

struct RunConfig {
  RunKind kind = RunKind::det_continue;
  std::string output_dir = "out";
  bool determinism = true;
  GridConfig grid;
  ContinuationConfig continuation;
  std::vector<NoiseConfig> noises;
  LinearSolverConfig solver;
  std::vector<LinearSolverConfig> bench_methods;
  McConfig mc;
  FitConfig fit;
  CovConfig cov;
};

GKind g_kind_from_string(const std::string& s);
std::string to_string(GKind kind);

/// Parses and validates; ConfigError messages name the offending key.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

/// The full configuration with every default resolved, for sidecar metadata.
nlohmann::json resolved_config_json(const RunConfig& cfg);

/// Writes `<artifact>.meta.json` with the resolved config and a timestamp.
void write_sidecar(const std::string& artifact_path, const RunConfig& cfg);

}  // namespace cqac
