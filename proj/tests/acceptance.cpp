// Acceptance criteria 1-8; one PASS/FAIL line each. Criterion 8 only warns.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "tampc/checks.hpp"
#include "tampc/estimator.hpp"
#include "tampc/fem1d.hpp"
#include "tampc/mpc.hpp"
#include "tampc/openloop.hpp"
#include "tampc/problems.hpp"
#include "tampc/report.hpp"

using namespace tampc;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

double seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

MpcRun run(const ProblemSpec& problem, MpcVariant variant, std::size_t m, std::size_t N, double span = 0.2,
           bool equidistant = false) {
  MpcConfig c;
  c.variant = variant;
  c.m = m;
  c.N = N;
  c.horizon_length = span;
  c.equidistant_windows = equidistant;
  return run_mpc(problem, c);
}

Outcome quadrature_fidelity() {
  const ProblemSpec p = make_test1();
  const auto u = SpaceTimeField::sample(uniform_time_grid(0, 1, 101), SpatialMesh(100), *p.exact_u);
  const double u_sq = l2_norm_spacetime_squared(u);
  const TimeGrid g200 = uniform_time_grid(0, 1, 201);
  const SpatialMesh m200(200);
  const double track = l2_norm_spacetime_squared(SpaceTimeField::sample(g200, m200, *p.exact_y) -
                                                 SpaceTimeField::sample(g200, m200, p.y_d));
  std::ostringstream d;
  d << "||u||^2 = " << u_sq << ", ||y - y_d||^2 = " << track;
  return {std::abs(u_sq - 0.25) <= 1e-3 && std::abs(track - 26.8197) <= 0.01 * 26.8197, d.str()};
}

/// Dense minimizer of the reduced cost over controls vanishing on the boundary,
/// with the quadratic recovered by polarization of cost evaluations.
Outcome kkt_oracle() {
  const ProblemSpec p = make_test1();
  const TimeGrid grid({0.0, 0.3, 1.0});
  const SpatialMesh mesh(3);
  const Vector y0 = mesh.sample(p.y0);
  const Eigen::Index levels = 2, nodes = 4;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> free;
  for (Eigen::Index k = 0; k < levels; ++k)
    for (Eigen::Index j = 1; j + 1 < nodes; ++j) free.emplace_back(k, j);
  const auto n = static_cast<Eigen::Index>(free.size());
  auto cost = [&](const Vector& z) {
    Matrix u = Matrix::Zero(levels, nodes);
    for (Eigen::Index i = 0; i < n; ++i) u(free[i].first, free[i].second) = z(i);
    return reduced_cost(p, grid, y0, mesh, u);
  };
  const double c0 = cost(Vector::Zero(n));
  Matrix h(n, n);
  Vector g(n), single(n);
  for (Eigen::Index i = 0; i < n; ++i) single(i) = cost(Vector::Unit(n, i));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      h(i, j) = cost(Vector::Unit(n, i) + Vector::Unit(n, j)) - single(i) - single(j) + c0;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) g(i) = single(i) - c0 - 0.5 * h(i, i);
  const Vector z = h.ldlt().solve(-g);

  const auto sol = solve_open_loop(p, grid, y0, mesh);
  double diff = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    diff = std::max(diff, std::abs(sol.u(static_cast<std::size_t>(free[i].first + 1),
                                         static_cast<std::size_t>(free[i].second)) - z(i)));
  }
  for (std::size_t k = 1; k < grid.size(); ++k) {
    diff = std::max({diff, std::abs(sol.u(k, 0)), std::abs(sol.u(k, 3))});
  }
  std::ostringstream d;
  d << "max |u_kkt - u_dense| = " << diff;
  return {diff <= 1e-8, d.str()};
}

Outcome gradient_check() {
  const ProblemSpec p = make_test2();
  const TimeGrid grid({0.0, 0.1, 0.35, 0.5, 0.52, 0.9});
  const SpatialMesh mesh(8);
  const Vector y0 = mesh.sample(p.y0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  auto random = [&] {
    Matrix m(5, 9);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = normal(rng);
    return m;
  };
  const Matrix u = random();
  const Matrix grad = reduced_gradient(p, grid, y0, mesh, u);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix d = random();
    const double step = 1e-3;
    const double fd = (reduced_cost(p, grid, y0, mesh, u + step * d) - reduced_cost(p, grid, y0, mesh, u - step * d)) /
                      (2 * step);
    const double an = (grad.array() * d.array()).sum();
    worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-12));
  }
  std::ostringstream d;
  d << "worst relative mismatch " << worst;
  return {worst <= 1e-6, d.str()};
}

Outcome layer_capture() {
  const ProblemSpec p = make_test1();
  MpcConfig c;
  c.variant = MpcVariant::offline;
  c.m = 45;
  c.N = 9;
  const TimeGrid master = offline_master_grid(p, c);
  std::size_t interior = 0, inside = 0;
  for (std::size_t i = 1; i < c.m; ++i) {
    ++interior;
    if (master[i] >= 0.45 && master[i] <= 0.55) ++inside;
  }
  const double fraction = static_cast<double>(inside) / static_cast<double>(interior);
  const double uniform = *run(p, MpcVariant::uniform, 45, 9).l2_error_y;
  const double offline = *run(p, MpcVariant::offline, 45, 9).l2_error_y;
  std::ostringstream d;
  d << "layer fraction " << fraction << ", error uniform " << uniform << " offline " << offline;
  return {fraction >= 0.4 && offline <= uniform / 3.0, d.str()};
}

Outcome online_comparison() {
  const ProblemSpec p = make_test1();
  double best_adaptive = std::numeric_limits<double>::infinity();
  double best_equidistant = best_adaptive;
  bool time_ok = true;
  std::ostringstream d;
  for (std::size_t N : {5u, 9u}) {
    for (double span : {0.1, 0.2, 0.3, 0.4}) {
      const auto a = run(p, MpcVariant::online, 0, N, span, false);
      const auto e = run(p, MpcVariant::online, 0, N, span, true);
      best_adaptive = std::min(best_adaptive, *a.l2_error_y);
      best_equidistant = std::min(best_equidistant, *e.l2_error_y);
      if (a.total_wall_time > 2.0 * e.total_wall_time) time_ok = false;
      d << "[N=" << N << " T=" << span << ": " << *a.l2_error_y << " (" << a.iterations() << " it, "
        << a.total_wall_time << " s) vs " << *e.l2_error_y << " (" << e.iterations() << " it, " << e.total_wall_time
        << " s)] ";
    }
  }
  d << "best adaptive " << best_adaptive << ", best equidistant " << best_equidistant
    << (time_ok ? "" : ", adaptive time exceeds 2x equidistant");
  return {best_adaptive <= 0.05 && best_adaptive <= 0.5 * best_equidistant && time_ok, d.str()};
}

Outcome test2_magnitude() {
  const ProblemSpec p = make_test2();
  const double offline = *run(p, MpcVariant::offline, 45, 5).l2_error_y;
  const double uniform = *run(p, MpcVariant::uniform, 45, 5).l2_error_y;
  std::ostringstream d;
  d << "error offline " << offline << ", uniform " << uniform;
  return {offline < 0.5 && uniform > 1.0, d.str()};
}

Outcome property_suite() {
  const auto results = run_property_checks();
  std::ostringstream d;
  const bool ok = print_check_results(d, results);
  std::string text = d.str();
  std::replace(text.begin(), text.end(), '\n', ';');
  return {ok, text};
}

Outcome decoupling() {
  const ProblemSpec p = make_test1();
  const TimeGrid a = adapt_time_grid(p, 0, 1, 46, SpatialMesh(5), 0.5);
  const TimeGrid b = adapt_time_grid(p, 0, 1, 46, SpatialMesh(20), 0.5);
  double h = 0.0;
  for (double t : a.instances()) {
    double nearest = std::numeric_limits<double>::infinity();
    for (double s : b.instances()) nearest = std::min(nearest, std::abs(t - s));
    h = std::max(h, nearest);
  }
  const double bound = 2.0 * std::min(a.min_step(), b.min_step());
  std::ostringstream d;
  d << "one-sided Hausdorff " << h << ", bound " << bound;
  return {h <= bound, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 quadrature fidelity", quadrature_fidelity},
      {"2 KKT oracle equivalence", kkt_oracle},
      {"3 adjoint gradient check", gradient_check},
      {"4 layer capture (offline)", layer_capture},
      {"5 online comparison", online_comparison},
      {"6 Test 2 order of magnitude", test2_magnitude},
      {"7 property suite", property_suite},
      {"8 decoupling heuristic", decoupling},
  };
  int failures = 0;
  for (const auto& [name, criterion] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criterion();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const bool soft = name.front() == '8';
    const char* tag = o.passed ? "PASS" : "FAIL";
    std::printf("%s criterion %s (%.2f s): %s%s\n", tag, name.c_str(), seconds(start), o.detail.c_str(),
                !o.passed && soft ? " (warning only)" : "");
    std::fflush(stdout);
    if (!o.passed && !soft) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
