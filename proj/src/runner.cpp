#include "cqac/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "cqac/io.hpp"
#include "cqac/lyapunov.hpp"

namespace cqac {

namespace {

using nlohmann::json;

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

Grid2D build_run_grid(const GridConfig& cfg) {
  Grid2D grid = build_grid(cfg.Lx, cfg.Ly, cfg.M, cfg.N);
  if (grid.spacing_warning) {
    std::fprintf(stderr,
                 "warning: irregular grid spacing hx = %g, hy = %g\n", grid.hx,
                 grid.hy);
  }
  return grid;
}

ContinuationSettings settings_for(const RunConfig& cfg, const std::string& label) {
  auto it = cfg.continuation.overrides.find(label);
  return it != cfg.continuation.overrides.end() ? it->second
                                                : cfg.continuation.settings;
}

struct DetResult {
  std::map<std::string, Branch> branches;
  std::vector<BranchPoint> branch_points;           // refined, along Gamma0
  std::map<std::string, std::optional<BranchPoint>> folds;
  std::vector<std::string> failures;
};

// Gamma0 from the homogeneous state, then the requested bifurcating branches.
DetResult compute_branches(const RunConfig& cfg) {
  DetResult out;
  Grid2D grid = build_run_grid(cfg.grid);

  ContinuationSettings s0 = settings_for(cfg, "Gamma0");
  Branch gamma0;
  try {
    BranchPoint start = make_start_point(Field::zero(grid), s0.mu_min, s0);
    gamma0 = continue_branch(start, s0, "Gamma0");
  } catch (const ContinuationStall& e) {
    out.failures.push_back(std::string("Gamma0: ") + e.what());
    gamma0 = e.partial();
    gamma0.label = "Gamma0";
  }

  for (std::size_t i = 0; i + 1 < gamma0.points.size(); ++i) {
    if (gamma0.points[i + 1].kind == PointKind::branch_point) {
      try {
        out.branch_points.push_back(locate_singularity(gamma0, i));
      } catch (const std::exception& e) {
        out.failures.push_back(std::string("Gamma0 branch point: ") + e.what());
      }
    }
  }
  out.branches["Gamma0"] = std::move(gamma0);

  for (const std::string& label : cfg.continuation.branches) {
    if (label == "Gamma0") continue;
    if (label != "Gamma1" && label != "Gamma2" && label != "Gamma3") {
      out.failures.push_back("unknown branch label: " + label);
      continue;
    }
    const std::size_t k = static_cast<std::size_t>(label[5] - '1');
    if (k >= out.branch_points.size()) {
      out.failures.push_back(label + ": branch point " + std::to_string(k + 1) +
                             " not found in the continuation window");
      continue;
    }
    ContinuationSettings sk = settings_for(cfg, label);
    try {
      SwitchResult sw = switch_branch(out.branch_points[k], sk);
      if (!sw.switched) {
        out.failures.push_back(label + ": branch switch fell back to the trivial branch");
        continue;
      }
      Branch branch;
      try {
        branch = continue_branch(sw.point, sk, label);
      } catch (const ContinuationStall& e) {
        out.failures.push_back(label + ": " + e.what());
        branch = e.partial();
        branch.label = label;
      }
      std::optional<BranchPoint> fold;
      for (std::size_t i = 0; i + 1 < branch.points.size(); ++i) {
        if (branch.points[i + 1].kind == PointKind::fold) {
          try {
            fold = locate_singularity(branch, i);
          } catch (const std::exception& e) {
            out.failures.push_back(label + " fold: " + e.what());
          }
          break;
        }
      }
      out.folds[label] = fold;
      out.branches[label] = std::move(branch);
    } catch (const std::exception& e) {
      out.failures.push_back(label + ": " + e.what());
    }
  }
  return out;
}

json regimes_json(const std::vector<BranchPoint>& bps,
                  const std::map<std::string, std::optional<BranchPoint>>& folds,
                  double mu_hi) {
  auto fold_mu = [&](const char* label) -> json {
    auto it = folds.find(label);
    if (it == folds.end() || !it->second.has_value()) return nullptr;
    return it->second->mu;
  };
  json bp1 = bps.size() > 0 ? json(bps[0].mu) : json(nullptr);
  json f1 = fold_mu("Gamma1");
  json f2 = fold_mu("Gamma2");
  json f3 = fold_mu("Gamma3");
  return json{{"R0", {0.0, f1}},
              {"R1", {f1, bp1}},
              {"R2", {bp1, f2}},
              {"R3", {f2, f3}},
              {"R4", {f3, mu_hi}}};
}

RunResult run_det_continue(const RunConfig& cfg) {
  RunResult result;
  DetResult det = compute_branches(cfg);
  result.failures = det.failures;

  for (const auto& [label, branch] : det.branches) {
    const std::string csv = join_path(cfg.output_dir, label + ".csv");
    const std::string states = join_path(cfg.output_dir, label + "_states.bin");
    write_branch_csv(branch, csv);
    write_branch_states(branch, states);
    write_sidecar(csv, cfg);
    result.artifacts.push_back(csv);
    result.artifacts.push_back(states);
  }

  json bps = json::array();
  for (const BranchPoint& bp : det.branch_points) {
    bps.push_back({{"mu", bp.mu},
                   {"kind", to_string(bp.kind)},
                   {"min_stability_eig", bp.min_stability_eig}});
  }
  json folds = json::array();
  for (const auto& [label, fold] : det.folds) {
    if (fold.has_value()) {
      folds.push_back({{"branch", label},
                       {"mu", fold->mu},
                       {"kind", to_string(fold->kind)},
                       {"u_l2", l2_norm(fold->state)}});
    }
  }
  json summary{{"branch_points", bps},
               {"folds", folds},
               {"regimes", regimes_json(det.branch_points, det.folds,
                                        cfg.continuation.settings.mu_max)},
               {"failures", det.failures}};
  const std::string summary_path =
      join_path(cfg.output_dir, "bifurcation_summary.json");
  std::ofstream out(summary_path);
  out << summary.dump(2) << '\n';
  write_sidecar(summary_path, cfg);
  result.artifacts.push_back(summary_path);

  result.exit_code = det.failures.empty() ? 0 : 3;
  return result;
}

// Branch restricted to the covariance window, optionally in descending mu.
Branch select_cov_points(const Branch& branch, const CovConfig& cov) {
  Branch out;
  out.label = branch.label;
  out.settings = branch.settings;
  out.status = branch.status;
  for (const BranchPoint& p : branch.points) {
    if (p.mu >= cov.mu_lo && p.mu <= cov.mu_hi) out.points.push_back(p);
  }
  if (cov.descending) {
    std::sort(out.points.begin(), out.points.end(),
              [](const BranchPoint& a, const BranchPoint& b) { return a.mu > b.mu; });
  }
  return out;
}

Branch load_or_compute_branch(const RunConfig& cfg, RunResult& result) {
  if (!cfg.cov.branch_states.empty()) {
    return read_branch_states(cfg.cov.branch_states);
  }
  DetResult det = compute_branches(cfg);
  for (const std::string& f : det.failures) result.failures.push_back(f);
  auto it = det.branches.find(cfg.cov.branch);
  if (it == det.branches.end()) {
    throw ConfigError("cov.branch: branch '" + cfg.cov.branch +
                      "' was not computed");
  }
  return it->second;
}

RunResult run_cov_continue(const RunConfig& cfg) {
  RunResult result;
  Grid2D grid = build_run_grid(cfg.grid);
  Branch branch = select_cov_points(load_or_compute_branch(cfg, result), cfg.cov);

  for (const NoiseConfig& noise : cfg.noises) {
    NoiseSpec spec = noise.resolve(grid);
    CovarianceContinuation run = continue_covariance(branch, spec, cfg.solver);
    for (const CovarianceSolution& sol : run.solutions) {
      if (!sol.converged) {
        result.failures.push_back("cov " + noise.label + " at mu = " +
                                  std::to_string(sol.mu) + ": no convergence");
      }
    }
    const std::string csv = join_path(cfg.output_dir, "cov_" + noise.label + ".csv");
    write_covariance_csv(run, csv, cfg.determinism);
    write_sidecar(csv, cfg);
    result.artifacts.push_back(csv);
    if (cfg.cov.dump_variance_surface) {
      for (const CovarianceSolution& sol : run.solutions) {
        const std::string surf = join_path(
            cfg.output_dir, "var_" + noise.label + "_" +
                                std::to_string(sol.branch_index) + ".csv");
        write_variance_surface_csv(sol, grid, surf);
        result.artifacts.push_back(surf);
      }
    }
  }
  result.exit_code = result.failures.empty() ? 0 : 3;
  return result;
}

RunResult run_mc_validate(const RunConfig& cfg) {
  RunResult result;
  Grid2D grid = build_run_grid(cfg.grid);
  const NoiseConfig& noise = cfg.noises.front();
  NoiseSpec spec = noise.resolve(grid);

  Field p_star = Field::zero(grid);
  SparseOperator lap = assemble_laplacian(grid);
  SparseOperator A = jacobian(p_star, cfg.mc.mu, lap);
  NoiseMatrix nm = assemble_B(p_star, spec, grid);
  CovarianceSolution cov;
  try {
    cov = solve_lyapunov(A, nm.B, cfg.solver);
  } catch (const LyapunovNonConvergence& e) {
    cov = e.best();
    result.failures.push_back("mc-validate: covariance solve did not converge");
  }
  const CovBounds bounds = cov_bounds(cov.V);
  const double cut = cfg.mc.transient_frac * cfg.mc.T;

  json per_path = json::array();
  double exit_mean = 0.0, var_mean = 0.0;
  int completed = 0;
  bool dt_warning = false;
  for (int path = 0; path < cfg.mc.paths; ++path) {
    try {
      PathStats stats =
          euler_maruyama(p_star, cfg.mc.mu, spec, cfg.mc.dt, cfg.mc.T,
                         cfg.mc.seed, static_cast<std::uint64_t>(path));
      stats.exit_fraction = containment_check(stats, bounds, cut);
      const double variance = stationary_variance(stats, cut);
      dt_warning = dt_warning || stats.dt_stability_warning;
      per_path.push_back({{"path", path},
                          {"exit_fraction", stats.exit_fraction},
                          {"stationary_variance", variance}});
      exit_mean += stats.exit_fraction;
      var_mean += variance;
      ++completed;
      if (path == 0 || cfg.mc.write_all_paths) {
        const std::string csv = join_path(
            cfg.output_dir, "path_" + std::to_string(path) + ".csv");
        write_pathstats_csv(stats, csv);
        write_sidecar(csv, cfg);
        result.artifacts.push_back(csv);
      }
    } catch (const DivergenceError& e) {
      result.failures.push_back("mc-validate path " + std::to_string(path) +
                                ": diverged at t = " +
                                std::to_string(e.blowup_time()));
      per_path.push_back({{"path", path},
                          {"diverged_at", e.blowup_time()}});
    }
  }
  if (completed > 0) {
    exit_mean /= completed;
    var_mean /= completed;
  }

  json summary{{"seed", cfg.mc.seed},
               {"dt", cfg.mc.dt},
               {"T", cfg.mc.T},
               {"mu", cfg.mc.mu},
               {"paths", cfg.mc.paths},
               {"transient_cut", cut},
               {"c_max", bounds.c_max},
               {"c_min", bounds.c_min},
               {"dt_stability_warning", dt_warning},
               {"exit_fraction", exit_mean},
               {"stationary_variance_estimate", var_mean},
               {"per_path", per_path},
               {"failures", result.failures}};
  const std::string summary_path = join_path(cfg.output_dir, "mc_summary.json");
  std::ofstream out(summary_path);
  out << summary.dump(2) << '\n';
  write_sidecar(summary_path, cfg);
  result.artifacts.push_back(summary_path);

  result.exit_code = result.failures.empty() ? 0 : 3;
  return result;
}

RunResult run_fit_scaling(const RunConfig& cfg) {
  RunResult result;
  std::ifstream in(cfg.fit.input_csv);
  if (!in.is_open()) {
    throw ConfigError("fit.input_csv: cannot open " + cfg.fit.input_csv);
  }
  std::string header;
  std::getline(in, header);
  std::vector<std::string> columns;
  {
    std::stringstream ss(header);
    std::string tok;
    while (std::getline(ss, tok, ',')) columns.push_back(tok);
  }
  const auto mu_it = std::find(columns.begin(), columns.end(), "mu");
  const auto val_it = std::find(columns.begin(), columns.end(), cfg.fit.norm);
  if (mu_it == columns.end()) throw ConfigError("fit.input_csv: no 'mu' column");
  if (val_it == columns.end()) {
    throw ConfigError("fit.norm: no '" + cfg.fit.norm + "' column in input");
  }
  const std::size_t mu_col = static_cast<std::size_t>(mu_it - columns.begin());
  const std::size_t val_col = static_cast<std::size_t>(val_it - columns.begin());

  std::vector<std::pair<double, double>> points;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> cells;
    while (std::getline(ss, tok, ',')) cells.push_back(tok);
    if (cells.size() <= std::max(mu_col, val_col)) continue;
    const double mu = std::stod(cells[mu_col]);
    const double value = std::stod(cells[val_col]);
    if (mu >= cfg.fit.window_lo && mu <= cfg.fit.window_hi) {
      points.emplace_back(mu, value);
    }
  }
  // Drop the points nearest to mu_crit, where the linearization degrades.
  std::sort(points.begin(), points.end(),
            [&](const auto& a, const auto& b) {
              return std::abs(a.first - cfg.fit.mu_crit) <
                     std::abs(b.first - cfg.fit.mu_crit);
            });
  const int drop = std::min<int>(cfg.fit.exclude_nearest,
                                 static_cast<int>(points.size()));
  points.erase(points.begin(), points.begin() + drop);
  std::sort(points.begin(), points.end());

  ScalingFit fit = fit_scaling(points, cfg.fit.mu_crit);
  json out_json{{"mu_crit", fit.mu_crit},
                {"alpha", fit.alpha},
                {"kappa", fit.kappa},
                {"window", {fit.window_lo, fit.window_hi}},
                {"r_squared", fit.r_squared},
                {"n_points", fit.n_points}};
  const std::string path = join_path(cfg.output_dir, "scaling_fit.json");
  std::ofstream out(path);
  out << out_json.dump(2) << '\n';
  write_sidecar(path, cfg);
  result.artifacts.push_back(path);
  return result;
}

RunResult run_solver_bench(const RunConfig& cfg) {
  RunResult result;
  Grid2D grid = build_run_grid(cfg.grid);
  Branch branch = select_cov_points(load_or_compute_branch(cfg, result), cfg.cov);
  NoiseSpec spec = cfg.noises.front().resolve(grid);

  const std::string csv = join_path(cfg.output_dir, "solver_bench.csv");
  std::ofstream out(csv);
  out << "index,mu,solver,iterations,residual,wall_time_s,converged\n";
  for (const LinearSolverConfig& method : cfg.bench_methods) {
    CovarianceContinuation run = continue_covariance(branch, spec, method);
    for (const CovarianceSolution& sol : run.solutions) {
      out << sol.branch_index << ',' << format_double(sol.mu) << ','
          << sol.solver_id << ',' << sol.iterations << ','
          << format_double(sol.residual) << ','
          << format_double(cfg.determinism ? 0.0 : sol.wall_time_s) << ','
          << (sol.converged ? 1 : 0) << '\n';
      if (!sol.converged) {
        result.failures.push_back("solver-bench " + sol.solver_id + " at mu = " +
                                  std::to_string(sol.mu) + ": no convergence");
      }
    }
  }
  out.close();
  write_sidecar(csv, cfg);
  result.artifacts.push_back(csv);
  result.exit_code = result.failures.empty() ? 0 : 3;
  return result;
}

}  // namespace

RunResult run(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) {
    throw ConfigError("output_dir: cannot create '" + cfg.output_dir +
                      "': " + ec.message());
  }
  switch (cfg.kind) {
    case RunKind::det_continue: return run_det_continue(cfg);
    case RunKind::cov_continue: return run_cov_continue(cfg);
    case RunKind::mc_validate: return run_mc_validate(cfg);
    case RunKind::fit_scaling: return run_fit_scaling(cfg);
    case RunKind::solver_bench: return run_solver_bench(cfg);
  }
  throw ConfigError("run: unknown kind");
}

}  // namespace cqac
