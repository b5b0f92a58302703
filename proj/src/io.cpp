#include "cqac/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace cqac {

namespace {

constexpr char kBranchMagic[8] = {'C', 'Q', 'A', 'C', 'B', 'R', '0', '1'};

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out.is_open()) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  return out;
}

template <class T>
void put(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in.good()) throw std::runtime_error("truncated branch states file");
  return value;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_branch_csv(const Branch& branch, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "index,mu,u_l2,u_inf,min_eig,stable,kind\n";
  for (std::size_t i = 0; i < branch.points.size(); ++i) {
    const BranchPoint& p = branch.points[i];
    const double u_inf =
        p.state.size() > 0 ? p.state.values.cwiseAbs().maxCoeff() : 0.0;
    out << i << ',' << format_double(p.mu) << ',' << format_double(l2_norm(p.state))
        << ',' << format_double(u_inf) << ','
        << format_double(p.min_stability_eig) << ',' << (p.stable ? 1 : 0)
        << ',' << to_string(p.kind) << '\n';
  }
}

void write_branch_states(const Branch& branch, const std::string& path) {
  std::ofstream out = open_out(path, /*binary=*/true);
  out.write(kBranchMagic, sizeof(kBranchMagic));
  const Grid2D& g = branch.points.empty() ? Grid2D{} : branch.points.front().state.grid;
  put<std::uint64_t>(out, static_cast<std::uint64_t>(g.M));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(g.N));
  put<double>(out, g.Lx);
  put<double>(out, g.Ly);
  put<std::uint64_t>(out, branch.points.size());
  for (std::size_t i = 0; i < branch.points.size(); ++i) {
    const BranchPoint& p = branch.points[i];
    put<std::uint64_t>(out, i);
    put<double>(out, p.mu);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(p.kind));
    put<std::uint8_t>(out, p.stable ? 1 : 0);
    put<double>(out, p.min_stability_eig);
    out.write(reinterpret_cast<const char*>(p.state.values.data()),
              static_cast<std::streamsize>(sizeof(double) * p.state.values.size()));
    out.write(reinterpret_cast<const char*>(p.tangent.data()),
              static_cast<std::streamsize>(sizeof(double) * p.tangent.size()));
  }
}

Branch read_branch_states(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) {
    throw std::runtime_error("cannot open branch states file: " + path);
  }
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in.good() || std::memcmp(magic, kBranchMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("not a branch states file: " + path);
  }
  const auto M = static_cast<int>(get<std::uint64_t>(in));
  const auto N = static_cast<int>(get<std::uint64_t>(in));
  const double Lx = get<double>(in);
  const double Ly = get<double>(in);
  Grid2D g = build_grid(Lx, Ly, M, N);
  const auto count = get<std::uint64_t>(in);

  Branch branch;
  branch.points.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    get<std::uint64_t>(in);  // index, implicit by position
    BranchPoint p;
    p.mu = get<double>(in);
    p.kind = static_cast<PointKind>(get<std::uint8_t>(in));
    p.stable = get<std::uint8_t>(in) != 0;
    p.min_stability_eig = get<double>(in);
    Eigen::VectorXd state(g.J);
    in.read(reinterpret_cast<char*>(state.data()),
            static_cast<std::streamsize>(sizeof(double) * g.J));
    Eigen::VectorXd tangent(g.J + 1);
    in.read(reinterpret_cast<char*>(tangent.data()),
            static_cast<std::streamsize>(sizeof(double) * (g.J + 1)));
    if (!in.good()) throw std::runtime_error("truncated branch states file");
    p.state = Field(std::move(state), g);
    p.tangent = std::move(tangent);
    p.leading_eigs = Eigen::VectorXd::Constant(1, p.min_stability_eig);
    branch.points.push_back(std::move(p));
  }
  return branch;
}

void write_covariance_csv(const CovarianceContinuation& run,
                          const std::string& path, bool deterministic) {
  std::ofstream out = open_out(path);
  out << "index,mu,cov_max_norm,diag_l1,diag_l2,diag_linf,iterations,residual,"
         "wall_time_s,warm_started\n";
  for (const CovarianceSolution& sol : run.solutions) {
    const CovNorms n = cov_norms(sol.V);
    out << sol.branch_index << ',' << format_double(sol.mu) << ','
        << format_double(n.max_norm) << ',' << format_double(n.diag_l1) << ','
        << format_double(n.diag_l2) << ',' << format_double(n.diag_linf) << ','
        << sol.iterations << ',' << format_double(sol.residual) << ','
        << format_double(deterministic ? 0.0 : sol.wall_time_s) << ','
        << (sol.warm_started ? 1 : 0) << '\n';
  }
}

void write_variance_surface_csv(const CovarianceSolution& sol,
                                const Grid2D& grid, const std::string& path) {
  if (sol.V.rows() != grid.J) {
    throw std::invalid_argument("write_variance_surface_csv: grid mismatch");
  }
  std::ofstream out = open_out(path);
  out << "x,y,variance\n";
  for (int j = 0; j < grid.J; ++j) {
    out << format_double(grid.node_x(j)) << ',' << format_double(grid.node_y(j))
        << ',' << format_double(sol.V(j, j)) << '\n';
  }
}

void write_pathstats_csv(const PathStats& stats, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "t,probe,domain_max,domain_min\n";
  for (std::size_t i = 0; i < stats.t.size(); ++i) {
    out << format_double(stats.t[i]) << ',' << format_double(stats.probe[i])
        << ',' << format_double(stats.domain_max[i]) << ','
        << format_double(stats.domain_min[i]) << '\n';
  }
}

}  // namespace cqac
