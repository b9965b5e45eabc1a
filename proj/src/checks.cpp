#include "tampc/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "tampc/estimator.hpp"
#include "tampc/fem1d.hpp"
#include "tampc/mpc.hpp"
#include "tampc/problems.hpp"
#include "tampc/spacetime_mixed.hpp"

namespace tampc {
namespace {

using Check = std::function<std::string()>;  // empty string means pass

std::string estimator_nonnegative() {
  const ProblemSpec problem = make_test1();
  const auto solution = solve_mixed(problem, uniform_time_grid(0, 1, 9), SpatialMesh(5));
  const auto report = estimate(solution);
  for (double e : report.eta_sq_per_interval) {
    if (!(e >= 0.0) || !std::isfinite(e)) return "negative or non-finite eta^2";
  }
  if (!(report.eta_sq_total > 0.0)) return "Test 1 estimate is not positive";
  return {};
}

std::string estimator_zero_data() {
  const auto solution = solve_mixed(make_zero_problem(), uniform_time_grid(0, 1, 6), SpatialMesh(8));
  if (solution.y().values().cwiseAbs().maxCoeff() != 0.0) return "zero data gives non-zero state";
  const auto report = estimate(solution);
  if (report.eta_sq_total != 0.0) return "zero data gives non-zero estimate";
  return {};
}

std::string doerfler_minimal() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  std::uniform_int_distribution<int> length(1, 40);
  const double thetas[] = {0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> eta(static_cast<std::size_t>(length(rng)));
    for (auto& e : eta) e = trial % 5 == 0 ? std::floor(4 * value(rng)) : value(rng);
    const double theta = thetas[trial % 6];
    const double total = std::accumulate(eta.begin(), eta.end(), 0.0);
    const auto marked = doerfler_mark(eta, theta);
    if (total == 0.0) {
      if (!marked.empty()) return "marks intervals of an all-zero estimate";
      continue;
    }
    std::set<std::size_t> unique(marked.begin(), marked.end());
    if (unique.size() != marked.size()) return "duplicate marks";
    double sum = 0.0;
    for (auto i : marked) sum += eta.at(i);
    if (sum < theta * total * (1 - 1e-12)) return "marked set misses the bulk";
    std::vector<double> sorted = eta;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double smaller = 0.0;
    for (std::size_t k = 0; k + 1 < marked.size(); ++k) smaller += sorted[k];
    if (smaller >= theta * total) return "a smaller set reaches the bulk";
  }
  return {};
}

std::string bisection_nested() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> t{0.0};
    const int n = 2 + trial % 15;
    for (int k = 0; k < n; ++k) t.push_back(t.back() + 0.01 + value(rng));
    const TimeGrid grid(t);
    std::vector<std::size_t> marked;
    for (std::size_t i = 0; i < grid.interval_count(); ++i) {
      if (value(rng) < 0.4) marked.push_back(i);
    }
    const TimeGrid refined = bisect(grid, marked);
    if (refined.size() != grid.size() + marked.size()) return "wrong refined size";
    const auto& r = refined.instances();
    for (double old : grid.instances()) {
      if (!std::binary_search(r.begin(), r.end(), old)) return "old instance lost";
    }
    for (auto i : marked) {
      const double mid = 0.5 * (grid[i] + grid[i + 1]);
      if (!std::binary_search(r.begin(), r.end(), mid)) return "midpoint missing";
    }
  }
  return {};
}

std::string mpc_consistent(MpcVariant variant, bool equidistant) {
  const ProblemSpec problem = make_test1();
  MpcConfig config;
  config.variant = variant;
  config.m = 10;
  config.N = 3;
  config.horizon_length = 0.2;
  config.equidistant_windows = equidistant;
  config.fine_mesh = SpatialMesh(20);
  config.keep_subproblems = true;
  const MpcRun run = run_mpc(problem, config);
  const auto& grid = run.closed_loop_y.grid();
  if (grid.back() != problem.t_end) return "closed loop does not end at T";
  if (run.subproblems.size() != run.iterations() || grid.size() != run.iterations() + 1) {
    return "iteration bookkeeping mismatch";
  }
  for (std::size_t i = 0; i < run.iterations(); ++i) {
    const auto& sub = run.subproblems[i];
    if (sub.grid.front() != grid[i]) return "horizon does not start at the current time";
    if (sub.y.row(0) != run.closed_loop_y.row(i)) return "subproblem initial state differs from closed loop";
    if (run.feedback_u.row(i + 1) != sub.u.row(1)) return "applied control is not the first subproblem control";
  }
  return {};
}

std::string fem_matrices() {
  for (std::size_t cells : {2u, 7u, 30u}) {
    const SpatialMesh mesh(cells);
    const auto m = assemble_mass<double>(mesh);
    const auto k = assemble_stiffness<double>(mesh);
    if (!m.is_symmetric() || !k.is_symmetric()) return "mass or stiffness not symmetric";
    const Eigen::SelfAdjointEigenSolver<Matrix> em(m.to_dense());
    if (!(em.eigenvalues().minCoeff() > 0.0)) return "mass matrix not positive definite";
    const Eigen::SelfAdjointEigenSolver<Matrix> ek(k.to_dense());
    if (ek.eigenvalues().minCoeff() < -1e-10 * ek.eigenvalues().maxCoeff()) return "stiffness not semidefinite";
    const auto interior = static_cast<Eigen::Index>(mesh.n_nodes()) - 2;
    const Eigen::SelfAdjointEigenSolver<Matrix> eki(k.block(1, interior).to_dense());
    if (!(eki.eigenvalues().minCoeff() > 0.0)) return "interior stiffness not positive definite";
    if (std::abs(m.to_dense().sum() - 1.0) > 1e-12) return "mass entries do not sum to |Omega|";
  }
  return {};
}

std::string laplacian_eigenfunction() {
  const SpatialMesh mesh(100);
  const Vector v = mesh.sample([](double x) { return std::sin(std::numbers::pi * x); });
  const Vector lap = discrete_laplacian(v, mesh);
  const double target = -std::numbers::pi * std::numbers::pi;
  for (std::size_t j = 1; j + 1 < mesh.n_nodes(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double ratio = lap(jj) / v(jj);
    if (std::abs(ratio - target) > 1e-3 * std::abs(target)) {
      std::ostringstream msg;
      msg << "ratio " << ratio << " at node " << j;
      return msg.str();
    }
  }
  return {};
}

}  // namespace

std::vector<CheckResult> run_property_checks() {
  const std::vector<std::pair<std::string, Check>> checks{
      {"estimator is non-negative", estimator_nonnegative},
      {"estimator vanishes for zero data", estimator_zero_data},
      {"Doerfler marking is minimal", doerfler_minimal},
      {"bisection keeps old instances", bisection_nested},
      {"uniform MPC feedback and continuity", [] { return mpc_consistent(MpcVariant::uniform, false); }},
      {"offline MPC feedback and continuity", [] { return mpc_consistent(MpcVariant::offline, false); }},
      {"online MPC feedback and continuity", [] { return mpc_consistent(MpcVariant::online, false); }},
      {"online equidistant MPC feedback and continuity", [] { return mpc_consistent(MpcVariant::online, true); }},
      {"mass and stiffness symmetric and definite", fem_matrices},
      {"discrete Laplacian eigenfunction", laplacian_eigenfunction},
  };
  std::vector<CheckResult> results;
  for (const auto& [name, check] : checks) {
    CheckResult r{name, false, {}};
    try {
      r.detail = check();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = std::string("threw: ") + e.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

bool print_check_results(std::ostream& out, const std::vector<CheckResult>& results) {
  bool all = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed) out << ": " << r.detail;
    out << '\n';
    all = all && r.passed;
  }
  return all;
}

}  // namespace tampc
