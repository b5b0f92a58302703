#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cqac/config.hpp"
#include "cqac/io.hpp"
#include "cqac/runner.hpp"

using namespace cqac;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("cqac_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.is_open());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json coarse_grid_json() {
  return json{{"Lx", 1.0}, {"Ly", 0.9}, {"M", 12}, {"N", 11}};
}

}  // namespace

TEST_CASE("config: unknown run kind and missing keys are named") {
  CHECK_THROWS_WITH_AS(parse_run_config(json{{"run", "frobnicate"}}),
                       doctest::Contains("run:"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_run_config(json{{"run", "det-continue"}, {"grid", {{"M", 1}}}}),
      doctest::Contains("grid.M"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_run_config(json{{"run", "fit-scaling"}}),
      doctest::Contains("fit.input_csv"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_run_config(json{{"run", "det-continue"},
                            {"solver", {{"method", "sor"}}}}),
      doctest::Contains("solver.method"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_run_config(json{{"run", "det-continue"},
                            {"noise", {{"g_kind", "cubic"}}}}),
      doctest::Contains("g_kind"), ConfigError);
}

TEST_CASE("config: noise phi rules resolve") {
  Grid2D g = build_grid(1.0, 0.9, 10, 9);
  RunConfig cfg = parse_run_config(
      json{{"run", "cov-continue"},
           {"noise", {{"sigma_tilde", 5.0}, {"phi_rule", "affine(0.4,0)"}, {"K", 11}}}});
  NoiseSpec spec = cfg.noises.front().resolve(g);
  CHECK(spec.K == 11);
  CHECK(eigenvalues(spec)[0] == doctest::Approx(5.0));
  CHECK(eigenvalues(spec)[10] == doctest::Approx(5.0 * std::exp(-0.4)));

  RunConfig explicit_phi = parse_run_config(
      json{{"run", "cov-continue"}, {"noise", {{"phi", {1.0, 2.5}}}}});
  CHECK(explicit_phi.noises.front().K == 2);

  CHECK_THROWS_AS(
      parse_run_config(json{{"run", "cov-continue"},
                            {"noise", {{"phi", {2.0, 1.0}}}}})
          .noises.front()
          .resolve(g),
      ConfigError);
}

TEST_CASE("config: resolved json round-trips through the parser") {
  RunConfig cfg = parse_run_config(json{{"run", "solver-bench"}});
  json resolved = resolved_config_json(cfg);
  RunConfig again = parse_run_config(resolved);
  CHECK(again.kind == cfg.kind);
  CHECK(again.grid.M == cfg.grid.M);
  CHECK(resolved_config_json(again) == resolved);
}

TEST_CASE("det-continue emits a branch point row in the expected window") {
  fs::path dir = temp_dir("det");
  RunConfig cfg = parse_run_config(json{
      {"run", "det-continue"},
      {"output_dir", dir.string()},
      {"continuation",
       {{"branches", {"Gamma0"}},
        {"initial_step", 5e-4},
        {"max_step", 8e-4},
        {"mu_min", 1.374},
        {"mu_max", 1.381}}},
  });
  // start the homogeneous branch at the lower window edge on the default grid
  RunResult result = run(cfg);
  CHECK(result.exit_code == 0);

  // CSV: first branch_point row within the predicted bracket
  std::ifstream csv(dir / "Gamma0.csv");
  REQUIRE(csv.is_open());
  std::string line;
  std::getline(csv, line);
  CHECK(line == "index,mu,u_l2,u_inf,min_eig,stable,kind");
  bool found = false;
  while (std::getline(csv, line) && !found) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 7);
    if (cells[6] == "branch_point") {
      found = true;
      const double mu = std::stod(cells[1]);
      CHECK(mu >= 1.3769);
      CHECK(mu <= 1.3789);
    }
  }
  CHECK(found);

  // summary: refined branch point and sidecar metadata
  json summary = json::parse(slurp(dir / "bifurcation_summary.json"));
  REQUIRE(summary["branch_points"].size() >= 1);
  CHECK(std::abs(summary["branch_points"][0]["mu"].get<double>() - 1.37788) <=
        1e-4);
  CHECK(fs::exists(dir / "Gamma0.csv.meta.json"));
  json meta = json::parse(slurp(dir / "Gamma0.csv.meta.json"));
  CHECK(meta["config"]["run"] == "det-continue");
  CHECK(fs::exists(dir / "Gamma0_states.bin"));

  // states round-trip
  Branch back = read_branch_states((dir / "Gamma0_states.bin").string());
  CHECK(back.points.size() >= 5);
  CHECK(back.points.front().state.grid.J == 49 * 44);
}

TEST_CASE("cov-continue: identical mu columns across truncation levels") {
  fs::path dir = temp_dir("cov");
  json config{
      {"run", "cov-continue"},
      {"output_dir", dir.string()},
      {"grid", coarse_grid_json()},
      {"continuation",
       {{"branches", {"Gamma0"}},
        {"initial_step", 0.05},
        {"max_step", 0.1},
        {"mu_min", 0.0},
        {"mu_max", 1.0}}},
      {"cov", {{"branch", "Gamma0"}, {"mu_lo", 0.0}, {"mu_hi", 1.0}}},
      {"noise_specs",
       {{{"K", 2}, {"label", "K2"}},
        {{"K", 4}, {"label", "K4"}},
        {{"K", 8}, {"label", "K8"}}}},
  };
  RunConfig cfg = parse_run_config(config);
  RunResult result = run(cfg);
  CHECK(result.exit_code == 0);

  auto mu_column = [&](const std::string& name) {
    std::ifstream in(dir / name);
    REQUIRE(in.is_open());
    std::string line;
    std::getline(in, line);
    std::vector<std::string> mus;
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string cell;
      std::getline(ss, cell, ',');
      std::getline(ss, cell, ',');
      mus.push_back(cell);
    }
    return mus;
  };
  auto k2 = mu_column("cov_K2.csv");
  auto k4 = mu_column("cov_K4.csv");
  auto k8 = mu_column("cov_K8.csv");
  CHECK(k2.size() >= 8);
  CHECK(k2 == k4);
  CHECK(k2 == k8);

  // determinism: re-running reproduces byte-identical CSV bodies
  const std::string body = slurp(dir / "cov_K8.csv");
  RunResult again = run(cfg);
  CHECK(again.exit_code == 0);
  CHECK(slurp(dir / "cov_K8.csv") == body);
}

TEST_CASE("solver-bench: one row per (point, method)") {
  fs::path dir = temp_dir("bench");
  RunConfig cfg = parse_run_config(json{
      {"run", "solver-bench"},
      {"output_dir", dir.string()},
      {"grid", coarse_grid_json()},
      {"continuation",
       {{"branches", {"Gamma0"}},
        {"initial_step", 0.1},
        {"max_step", 0.2},
        {"mu_min", 0.0},
        {"mu_max", 0.6}}},
      {"cov", {{"branch", "Gamma0"}, {"mu_lo", 0.0}, {"mu_hi", 0.6}}},
      {"noise", {{"K", 4}}},
      {"solver", {{"methods", {"bicgstab", "gmres(10)", "gmres(0)", "qmr"}}}},
  });
  RunResult result = run(cfg);
  CHECK(result.exit_code == 0);

  std::ifstream in(dir / "solver_bench.csv");
  REQUIRE(in.is_open());
  std::string line;
  std::getline(in, line);
  CHECK(line == "index,mu,solver,iterations,residual,wall_time_s,converged");
  std::map<std::string, int> rows_per_solver;
  int rows = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 7);
    rows_per_solver[cells[2]] += 1;
    CHECK(cells[6] == "1");
    ++rows;
  }
  CHECK(rows_per_solver.size() == 4);
  int per = rows_per_solver.begin()->second;
  CHECK(per >= 3);
  for (const auto& [solver, count] : rows_per_solver) CHECK(count == per);
  CHECK(rows == 4 * per);
}

TEST_CASE("mc-validate: summary artifact with containment data") {
  fs::path dir = temp_dir("mc");
  RunConfig cfg = parse_run_config(json{
      {"run", "mc-validate"},
      {"output_dir", dir.string()},
      {"grid", {{"Lx", 1.0}, {"Ly", 1.0}, {"M", 2}, {"N", 2}}},
      {"noise", {{"sigma_tilde", 5.0}, {"phi", {1.0}}}},
      {"mc", {{"mu", 0.5}, {"dt", 1e-3}, {"T", 2.0}, {"seed", 7}, {"paths", 2}}},
  });
  RunResult result = run(cfg);
  CHECK(result.exit_code == 0);

  json summary = json::parse(slurp(dir / "mc_summary.json"));
  CHECK(summary["paths"] == 2);
  const double ef = summary["exit_fraction"].get<double>();
  CHECK(ef >= 0.0);
  CHECK(ef <= 1.0);
  CHECK(summary["c_max"].get<double>() > 0.0);
  CHECK(summary["per_path"].size() == 2);
  CHECK(fs::exists(dir / "path_0.csv"));

  // deterministic rerun: identical summary body
  const std::string body = slurp(dir / "mc_summary.json");
  run(cfg);
  CHECK(slurp(dir / "mc_summary.json") == body);
}

TEST_CASE("fit-scaling: exact power law through the CLI path") {
  fs::path dir = temp_dir("fit");
  const fs::path input = dir / "synthetic.csv";
  {
    std::ofstream out(input);
    out << "index,mu,cov_max_norm\n";
    const double mu_crit = 1.4;
    for (int i = 0; i < 12; ++i) {
      const double mu = 1.0 + 0.03 * i;
      out << i << ',' << format_double(mu) << ','
          << format_double(2.0 / std::sqrt(mu_crit - mu)) << '\n';
    }
  }
  RunConfig cfg = parse_run_config(json{
      {"run", "fit-scaling"},
      {"output_dir", dir.string()},
      {"fit",
       {{"input_csv", input.string()},
        {"mu_crit", 1.4},
        {"window_lo", 1.0},
        {"window_hi", 1.34},
        {"norm", "cov_max_norm"},
        {"exclude_nearest", 2}}},
  });
  RunResult result = run(cfg);
  CHECK(result.exit_code == 0);
  json fit = json::parse(slurp(dir / "scaling_fit.json"));
  CHECK(std::abs(fit["alpha"].get<double>() - 0.5) <= 1e-10);
  CHECK(std::abs(fit["kappa"].get<double>() - 2.0) <= 1e-10);
  CHECK(fit["n_points"].get<int>() == 10);  // 12 in window, 2 excluded
}

TEST_CASE("non-convergence is a recorded numerical failure, not a crash") {
  fs::path dir = temp_dir("fail");
  RunConfig cfg = parse_run_config(json{
      {"run", "cov-continue"},
      {"output_dir", dir.string()},
      {"grid", coarse_grid_json()},
      {"continuation",
       {{"branches", {"Gamma0"}},
        {"initial_step", 0.1},
        {"max_step", 0.2},
        {"mu_min", 0.0},
        {"mu_max", 0.5}}},
      {"cov", {{"branch", "Gamma0"}}},
      {"noise", {{"K", 4}}},
      {"solver", {{"maxit", 1}, {"tol", 1e-12}}},
  });
  RunResult result = run(cfg);
  CHECK(result.exit_code == 3);
  CHECK(!result.failures.empty());
  CHECK(fs::exists(dir / "cov_spec0.csv"));  // partial artifact written
}

TEST_CASE("branch states reader rejects foreign files") {
  fs::path dir = temp_dir("badstates");
  const fs::path bogus = dir / "bogus.bin";
  {
    std::ofstream out(bogus, std::ios::binary);
    out << "definitely not a branch states file";
  }
  CHECK_THROWS_AS(read_branch_states(bogus.string()), std::runtime_error);
}

TEST_CASE("variance surface dump") {
  fs::path dir = temp_dir("surf");
  RunConfig cfg = parse_run_config(json{
      {"run", "cov-continue"},
      {"output_dir", dir.string()},
      {"grid", {{"Lx", 1.0}, {"Ly", 0.9}, {"M", 8}, {"N", 7}}},
      {"continuation",
       {{"branches", {"Gamma0"}},
        {"initial_step", 0.2},
        {"max_step", 0.4},
        {"mu_min", 0.9},
        {"mu_max", 1.0}}},
      {"cov",
       {{"branch", "Gamma0"}, {"mu_lo", 0.9}, {"mu_hi", 1.0},
        {"dump_variance_surface", true}}},
      {"noise", {{"K", 2}, {"label", "K2"}}},
  });
  RunResult result = run(cfg);
  CHECK(result.exit_code == 0);
  bool any_surface = false;
  for (const std::string& artifact : result.artifacts) {
    if (artifact.find("var_K2_") != std::string::npos) {
      any_surface = true;
      std::ifstream in(artifact);
      std::string header;
      std::getline(in, header);
      CHECK(header == "x,y,variance");
      std::string row;
      int count = 0;
      while (std::getline(in, row)) ++count;
      CHECK(count == 7 * 6);
    }
  }
  CHECK(any_surface);
}
