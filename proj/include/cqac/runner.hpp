#pragma once

#include <string>
#include <vector>

#include "cqac/config.hpp"

namespace cqac {

struct RunResult {
  int exit_code = 0;  // 0 success, 3 numerical failure with partial artifacts
  std::vector<std::string> artifacts;
  std::vector<std::string> failures;
};

/// Executes a validated configuration and writes the artifacts (each with a
/// .meta.json sidecar carrying the resolved config). Numerical failures are
/// recorded in the result and in the artifacts rather than thrown.
RunResult run(const RunConfig& cfg);

}  // namespace cqac
