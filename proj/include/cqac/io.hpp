#pragma once

#include <string>

#include "cqac/analysis.hpp"
#include "cqac/continuation.hpp"
#include "cqac/lyapunov.hpp"
#include "cqac/mc.hpp"

namespace cqac {

/// Doubles are printed with "%.17g" so that re-runs give byte-identical files.
std::string format_double(double v);

/// Branch summary: one row per point with columns
/// index,mu,u_l2,u_inf,min_eig,stable,kind.
void write_branch_csv(const Branch& branch, const std::string& path);

/// Full states in a little binary companion keyed by point index.
void write_branch_states(const Branch& branch, const std::string& path);
Branch read_branch_states(const std::string& path);

/// Covariance continuation: one row per solved point with columns
/// index,mu,cov_max_norm,diag_l1,diag_l2,diag_linf,iterations,residual,
/// wall_time_s,warm_started. With `deterministic` set, wall_time_s is
/// written as 0 so that bodies are reproducible.
void write_covariance_csv(const CovarianceContinuation& run,
                          const std::string& path, bool deterministic);

/// Grid-resolved variances of one covariance solution: x,y,variance rows.
void write_variance_surface_csv(const CovarianceSolution& sol,
                                const Grid2D& grid, const std::string& path);

/// Sample-path statistics: t,probe,domain_max,domain_min rows.
void write_pathstats_csv(const PathStats& stats, const std::string& path);

}  // namespace cqac
