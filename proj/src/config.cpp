#include "cqac/config.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

namespace cqac {

using nlohmann::json;

RunKind run_kind_from_string(const std::string& s) {
  if (s == "det-continue") return RunKind::det_continue;
  if (s == "cov-continue") return RunKind::cov_continue;
  if (s == "mc-validate") return RunKind::mc_validate;
  if (s == "fit-scaling") return RunKind::fit_scaling;
  if (s == "solver-bench") return RunKind::solver_bench;
  throw ConfigError("run: unknown kind '" + s + "'");
}

std::string to_string(RunKind kind) {
  switch (kind) {
    case RunKind::det_continue: return "det-continue";
    case RunKind::cov_continue: return "cov-continue";
    case RunKind::mc_validate: return "mc-validate";
    case RunKind::fit_scaling: return "fit-scaling";
    case RunKind::solver_bench: return "solver-bench";
  }
  return "unknown";
}

GKind g_kind_from_string(const std::string& s) {
  if (s == "additive") return GKind::additive;
  if (s == "quad_sup") return GKind::quad_sup;
  if (s == "sup_shift") return GKind::sup_shift;
  throw ConfigError("g_kind: unknown value '" + s + "'");
}

std::string to_string(GKind kind) {
  switch (kind) {
    case GKind::additive: return "additive";
    case GKind::quad_sup: return "quad_sup";
    case GKind::sup_shift: return "sup_shift";
  }
  return "unknown";
}

NoiseSpec NoiseConfig::resolve(const Grid2D& grid) const {
  Eigen::VectorXd phi_vec;
  if (phi.has_value()) {
    phi_vec.resize(static_cast<Eigen::Index>(phi->size()));
    for (std::size_t i = 0; i < phi->size(); ++i) {
      phi_vec[static_cast<Eigen::Index>(i)] = (*phi)[i];
    }
  } else if (phi_rule == "linear_k") {
    phi_vec = phi_linear(K);
  } else if (phi_rule.rfind("affine(", 0) == 0 && phi_rule.back() == ')') {
    double a = 0.0, b = 0.0;
    const std::string args = phi_rule.substr(7, phi_rule.size() - 8);
    if (std::sscanf(args.c_str(), "%lf,%lf", &a, &b) != 2) {
      throw ConfigError("noise.phi_rule: cannot parse '" + phi_rule + "'");
    }
    phi_vec = phi_affine(K, a, b);
  } else {
    throw ConfigError("noise.phi_rule: unknown rule '" + phi_rule + "'");
  }
  try {
    return make_noise_spec(sigma_tilde, phi_vec, g_kind, grid);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  }
}

namespace {

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double get_num(const json& j, const char* key, double fallback) {
  const json* v = find(j, key);
  if (v == nullptr) return fallback;
  if (!v->is_number()) throw ConfigError(std::string(key) + ": expected a number");
  return v->get<double>();
}

int get_int(const json& j, const char* key, int fallback) {
  const json* v = find(j, key);
  if (v == nullptr) return fallback;
  if (!v->is_number_integer()) {
    throw ConfigError(std::string(key) + ": expected an integer");
  }
  return v->get<int>();
}

bool get_bool(const json& j, const char* key, bool fallback) {
  const json* v = find(j, key);
  if (v == nullptr) return fallback;
  if (!v->is_boolean()) throw ConfigError(std::string(key) + ": expected a boolean");
  return v->get<bool>();
}

std::string get_str(const json& j, const char* key, const std::string& fallback) {
  const json* v = find(j, key);
  if (v == nullptr) return fallback;
  if (!v->is_string()) throw ConfigError(std::string(key) + ": expected a string");
  return v->get<std::string>();
}

ContinuationSettings parse_settings(const json& j, ContinuationSettings base) {
  base.initial_step = get_num(j, "initial_step", base.initial_step);
  base.min_step = get_num(j, "min_step", base.min_step);
  base.max_step = get_num(j, "max_step", base.max_step);
  base.newton_tol = get_num(j, "newton_tol", base.newton_tol);
  base.max_newton_iters = get_int(j, "max_newton_iters", base.max_newton_iters);
  base.max_points = get_int(j, "max_points", base.max_points);
  base.direction = get_int(j, "direction", base.direction);
  base.eig_tol = get_num(j, "eig_tol", base.eig_tol);
  base.n_eigs = get_int(j, "n_eigs", base.n_eigs);
  base.kick = get_num(j, "kick", base.kick);
  base.switch_mu_offset = get_num(j, "switch_mu_offset", base.switch_mu_offset);
  base.mu_min = get_num(j, "mu_min", base.mu_min);
  base.mu_max = get_num(j, "mu_max", base.mu_max);
  return base;
}

LinearSolverConfig parse_solver(const json& j, LinearSolverConfig base) {
  if (const json* m = find(j, "method")) {
    if (!m->is_string()) throw ConfigError("solver.method: expected a string");
    try {
      base.method = method_from_string(m->get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("solver.method: ") + e.what());
    }
  }
  base.tol = get_num(j, "tol", base.tol);
  base.maxit = get_int(j, "maxit", base.maxit);
  base.gmres_restart = get_int(j, "gmres_restart", base.gmres_restart);
  if (!(base.tol > 0.0)) throw ConfigError("solver.tol: must be > 0");
  if (base.maxit < 1) throw ConfigError("solver.maxit: must be >= 1");
  if (base.gmres_restart < 0) throw ConfigError("solver.gmres_restart: must be >= 0");
  return base;
}

// "bicgstab" | "gmres(10)" | "gmres(0)" | "qmr"
LinearSolverConfig parse_method_token(const std::string& token,
                                      LinearSolverConfig base) {
  std::string name = token;
  if (token.rfind("gmres(", 0) == 0 && token.back() == ')') {
    name = "gmres";
    base.gmres_restart = std::stoi(token.substr(6, token.size() - 7));
  }
  try {
    base.method = method_from_string(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("solver_bench.methods: ") + e.what());
  }
  return base;
}

NoiseConfig parse_noise(const json& j, int index) {
  NoiseConfig cfg;
  cfg.sigma_tilde = get_num(j, "sigma_tilde", cfg.sigma_tilde);
  cfg.phi_rule = get_str(j, "phi_rule", cfg.phi_rule);
  cfg.K = get_int(j, "K", cfg.K);
  cfg.g_kind = g_kind_from_string(get_str(j, "g_kind", "additive"));
  cfg.label = get_str(j, "label", "spec" + std::to_string(index));
  if (const json* phi = find(j, "phi")) {
    if (!phi->is_array()) throw ConfigError("noise.phi: expected an array");
    std::vector<double> values;
    for (const auto& v : *phi) {
      if (!v.is_number()) throw ConfigError("noise.phi: expected numbers");
      values.push_back(v.get<double>());
    }
    cfg.phi = values;
    cfg.K = static_cast<int>(values.size());
  }
  if (cfg.K < 1) throw ConfigError("noise.K: must be >= 1");
  return cfg;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  RunConfig cfg;
  cfg.kind = run_kind_from_string(get_str(j, "run", ""));
  cfg.output_dir = get_str(j, "output_dir", cfg.output_dir);
  if (cfg.output_dir.empty()) throw ConfigError("output_dir: must not be empty");
  cfg.determinism = get_bool(j, "determinism", cfg.determinism);

  if (const json* g = find(j, "grid")) {
    cfg.grid.Lx = get_num(*g, "Lx", cfg.grid.Lx);
    cfg.grid.Ly = get_num(*g, "Ly", cfg.grid.Ly);
    cfg.grid.M = get_int(*g, "M", cfg.grid.M);
    cfg.grid.N = get_int(*g, "N", cfg.grid.N);
    if (!(cfg.grid.Lx > 0.0)) throw ConfigError("grid.Lx: must be > 0");
    if (!(cfg.grid.Ly > 0.0)) throw ConfigError("grid.Ly: must be > 0");
    if (cfg.grid.M < 2) throw ConfigError("grid.M: must be >= 2");
    if (cfg.grid.N < 2) throw ConfigError("grid.N: must be >= 2");
  }

  if (const json* c = find(j, "continuation")) {
    cfg.continuation.settings = parse_settings(*c, cfg.continuation.settings);
    if (const json* branches = find(*c, "branches")) {
      if (!branches->is_array()) {
        throw ConfigError("continuation.branches: expected an array");
      }
      cfg.continuation.branches.clear();
      for (const auto& b : *branches) {
        if (!b.is_string()) {
          throw ConfigError("continuation.branches: expected strings");
        }
        cfg.continuation.branches.push_back(b.get<std::string>());
      }
    }
    if (const json* ov = find(*c, "branch_overrides")) {
      if (!ov->is_object()) {
        throw ConfigError("continuation.branch_overrides: expected an object");
      }
      for (auto it = ov->begin(); it != ov->end(); ++it) {
        cfg.continuation.overrides[it.key()] =
            parse_settings(it.value(), cfg.continuation.settings);
      }
    }
  }

  if (const json* n = find(j, "noise")) {
    cfg.noises.push_back(parse_noise(*n, 0));
  }
  if (const json* specs = find(j, "noise_specs")) {
    if (!specs->is_array()) throw ConfigError("noise_specs: expected an array");
    int i = static_cast<int>(cfg.noises.size());
    for (const auto& n : *specs) cfg.noises.push_back(parse_noise(n, i++));
  }
  if (cfg.noises.empty()) cfg.noises.push_back(NoiseConfig{});

  if (const json* s = find(j, "solver")) {
    cfg.solver = parse_solver(*s, cfg.solver);
    if (const json* methods = find(*s, "methods")) {
      if (!methods->is_array()) {
        throw ConfigError("solver.methods: expected an array");
      }
      for (const auto& m : *methods) {
        if (!m.is_string()) throw ConfigError("solver.methods: expected strings");
        cfg.bench_methods.push_back(
            parse_method_token(m.get<std::string>(), cfg.solver));
      }
    }
  }
  if (cfg.bench_methods.empty()) {
    for (const char* token : {"bicgstab", "gmres(10)", "gmres(0)", "qmr"}) {
      cfg.bench_methods.push_back(parse_method_token(token, cfg.solver));
    }
  }

  if (const json* m = find(j, "mc")) {
    cfg.mc.mu = get_num(*m, "mu", cfg.mc.mu);
    cfg.mc.dt = get_num(*m, "dt", cfg.mc.dt);
    cfg.mc.T = get_num(*m, "T", cfg.mc.T);
    cfg.mc.seed = static_cast<std::uint64_t>(get_num(*m, "seed", 1.0));
    cfg.mc.paths = get_int(*m, "paths", cfg.mc.paths);
    cfg.mc.transient_frac = get_num(*m, "transient_frac", cfg.mc.transient_frac);
    cfg.mc.write_all_paths = get_bool(*m, "write_all_paths", false);
    if (!(cfg.mc.dt > 0.0)) throw ConfigError("mc.dt: must be > 0");
    if (cfg.mc.T < 0.0) throw ConfigError("mc.T: must be >= 0");
    if (cfg.mc.paths < 1) throw ConfigError("mc.paths: must be >= 1");
    if (cfg.mc.transient_frac < 0.0 || cfg.mc.transient_frac >= 1.0) {
      throw ConfigError("mc.transient_frac: must be in [0, 1)");
    }
  }

  if (const json* f = find(j, "fit")) {
    cfg.fit.input_csv = get_str(*f, "input_csv", "");
    cfg.fit.mu_crit = get_num(*f, "mu_crit", 0.0);
    cfg.fit.window_lo = get_num(*f, "window_lo", 0.0);
    cfg.fit.window_hi = get_num(*f, "window_hi", 0.0);
    cfg.fit.norm = get_str(*f, "norm", cfg.fit.norm);
    cfg.fit.exclude_nearest = get_int(*f, "exclude_nearest", cfg.fit.exclude_nearest);
    if (cfg.fit.exclude_nearest < 0) {
      throw ConfigError("fit.exclude_nearest: must be >= 0");
    }
  }

  if (const json* c = find(j, "cov")) {
    cfg.cov.branch_states = get_str(*c, "branch_states", "");
    cfg.cov.branch = get_str(*c, "branch", cfg.cov.branch);
    cfg.cov.mu_lo = get_num(*c, "mu_lo", cfg.cov.mu_lo);
    cfg.cov.mu_hi = get_num(*c, "mu_hi", cfg.cov.mu_hi);
    cfg.cov.descending = get_bool(*c, "descending", false);
    cfg.cov.dump_variance_surface = get_bool(*c, "dump_variance_surface", false);
  }

  // Per-kind required blocks.
  if (cfg.kind == RunKind::fit_scaling) {
    if (cfg.fit.input_csv.empty()) throw ConfigError("fit.input_csv: required");
    if (!(cfg.fit.window_lo < cfg.fit.window_hi)) {
      throw ConfigError("fit.window_lo/window_hi: need window_lo < window_hi");
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_run_config(j);
}

namespace {

json settings_json(const ContinuationSettings& s) {
  return json{{"initial_step", s.initial_step},
              {"min_step", s.min_step},
              {"max_step", s.max_step},
              {"newton_tol", s.newton_tol},
              {"max_newton_iters", s.max_newton_iters},
              {"max_points", s.max_points},
              {"direction", s.direction},
              {"eig_tol", s.eig_tol},
              {"n_eigs", s.n_eigs},
              {"kick", s.kick},
              {"switch_mu_offset", s.switch_mu_offset},
              {"mu_min", s.mu_min},
              {"mu_max", s.mu_max}};
}

json solver_json(const LinearSolverConfig& s) {
  return json{{"method", solver_name(s)},
              {"tol", s.tol},
              {"maxit", s.maxit},
              {"gmres_restart", s.gmres_restart}};
}

}  // namespace

json resolved_config_json(const RunConfig& cfg) {
  json noises = json::array();
  for (const NoiseConfig& n : cfg.noises) {
    json entry{{"sigma_tilde", n.sigma_tilde},
               {"K", n.K},
               {"g_kind", to_string(n.g_kind)},
               {"label", n.label}};
    if (n.phi.has_value()) {
      entry["phi"] = *n.phi;
    } else {
      entry["phi_rule"] = n.phi_rule;
    }
    noises.push_back(entry);
  }
  json overrides = json::object();
  for (const auto& [label, settings] : cfg.continuation.overrides) {
    overrides[label] = settings_json(settings);
  }
  json methods = json::array();
  for (const auto& m : cfg.bench_methods) methods.push_back(solver_json(m));
  return json{
      {"run", to_string(cfg.kind)},
      {"output_dir", cfg.output_dir},
      {"determinism", cfg.determinism},
      {"grid",
       {{"Lx", cfg.grid.Lx}, {"Ly", cfg.grid.Ly}, {"M", cfg.grid.M}, {"N", cfg.grid.N}}},
      {"continuation",
       {{"settings", settings_json(cfg.continuation.settings)},
        {"branches", cfg.continuation.branches},
        {"branch_overrides", overrides}}},
      {"noise_specs", noises},
      {"solver", solver_json(cfg.solver)},
      {"bench_methods", methods},
      {"mc",
       {{"mu", cfg.mc.mu},
        {"dt", cfg.mc.dt},
        {"T", cfg.mc.T},
        {"seed", cfg.mc.seed},
        {"paths", cfg.mc.paths},
        {"transient_frac", cfg.mc.transient_frac},
        {"write_all_paths", cfg.mc.write_all_paths}}},
      {"fit",
       {{"input_csv", cfg.fit.input_csv},
        {"mu_crit", cfg.fit.mu_crit},
        {"window_lo", cfg.fit.window_lo},
        {"window_hi", cfg.fit.window_hi},
        {"norm", cfg.fit.norm},
        {"exclude_nearest", cfg.fit.exclude_nearest}}},
      {"cov",
       {{"branch_states", cfg.cov.branch_states},
        {"branch", cfg.cov.branch},
        {"mu_lo", cfg.cov.mu_lo},
        {"mu_hi", cfg.cov.mu_hi},
        {"descending", cfg.cov.descending},
        {"dump_variance_surface", cfg.cov.dump_variance_surface}}}};
}

void write_sidecar(const std::string& artifact_path, const RunConfig& cfg) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  json meta{{"created_at", stamp}, {"config", resolved_config_json(cfg)}};
  std::ofstream out(artifact_path + ".meta.json");
  if (!out.is_open()) {
    throw std::runtime_error("cannot write sidecar for: " + artifact_path);
  }
  out << meta.dump(2) << '\n';
}

}  // namespace cqac
