#include "tampc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tampc/fem1d.hpp"
#include "tampc/quadrature.hpp"

namespace tampc {

EstimatorReport estimate(const MixedSolution& solution) {
  const auto& problem = solution.problem();
  const auto& grid = solution.grid();
  const auto& mesh = solution.mesh();
  const double nu = problem.nu;
  const double mu = problem.mu;
  const double reaction = 1.0 / problem.alpha + mu * mu;
  const auto rule = gauss_legendre(2);

  EstimatorReport report{grid, std::vector<double>(grid.interval_count(), 0.0), 0.0,
                         !problem.estimator_condition_ok()};
  const Vector x = mesh.nodes();
  for (std::size_t i = 0; i < grid.interval_count(); ++i) {
    const double ta = grid[i];
    const double dt = grid.step(i);
    double integral = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double s = 0.5 * (1.0 + rule.nodes[q]);
      const double t = ta + s * dt;
      const Vector y = (1.0 - s) * solution.y().row(i) + s * solution.y().row(i + 1);
      const Vector w = (1.0 - s) * solution.w().row(i) + s * solution.w().row(i + 1);
      Vector residual = nu * discrete_laplacian(w, mesh) - 2.0 * nu * mu * discrete_laplacian(y, mesh) -
                        reaction * y;
      for (Eigen::Index j = 0; j < residual.size(); ++j) residual(j) += problem.desired_rhs(t, x(j));
      integral += 0.5 * dt * rule.weights[q] * l2_norm_squared(residual, mesh);
    }
    report.eta_sq_per_interval[i] = dt * dt * integral;
  }
  report.eta_sq_total =
      std::accumulate(report.eta_sq_per_interval.begin(), report.eta_sq_per_interval.end(), 0.0);
  return report;
}

std::vector<std::size_t> doerfler_mark(const std::vector<double>& eta_sq, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw InvalidArgument("Doerfler fraction must lie in (0, 1]");
  std::vector<std::size_t> order(eta_sq.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return eta_sq[a] > eta_sq[b]; });
  const double total = std::accumulate(eta_sq.begin(), eta_sq.end(), 0.0);
  std::vector<std::size_t> marked;
  if (!(total > 0.0)) return marked;
  const double goal = theta * total;
  double sum = 0.0;
  for (std::size_t idx : order) {
    if (sum >= goal) break;
    marked.push_back(idx);
    sum += eta_sq[idx];
  }
  return marked;
}

std::vector<std::size_t> doerfler_mark(const EstimatorReport& report, double theta) {
  return doerfler_mark(report.eta_sq_per_interval, theta);
}

TimeGrid bisect(const TimeGrid& grid, const std::vector<std::size_t>& marked) {
  std::vector<bool> split(grid.interval_count(), false);
  for (std::size_t i : marked) {
    if (i >= grid.interval_count()) {
      std::ostringstream msg;
      msg << "bisect: interval index " << i << " out of range (" << grid.interval_count() << " intervals)";
      throw InvalidArgument(msg.str());
    }
    split[i] = true;
  }
  std::vector<double> t;
  t.reserve(grid.size() + marked.size());
  for (std::size_t i = 0; i < grid.interval_count(); ++i) {
    t.push_back(grid[i]);
    if (split[i]) t.push_back(0.5 * (grid[i] + grid[i + 1]));
  }
  t.push_back(grid.back());
  return TimeGrid(std::move(t));
}

AdaptResult adapt_time_grid_detailed(const ProblemSpec& problem, double t_a, double t_b,
                                     std::size_t target_count, const SpatialMesh& mesh,
                                     const AdaptOptions& options) {
  if (target_count < 2) throw InvalidArgument("adaptive grid needs target_count >= 2");
  if (!(t_b > t_a)) throw InvalidArgument("adaptive grid needs t_b > t_a");
  if (!(options.theta > 0.0 && options.theta <= 1.0)) {
    throw InvalidArgument("Doerfler fraction must lie in (0, 1]");
  }

  TimeGrid grid = [&] {
    if (options.seed) {
      if (options.seed->front() != t_a || options.seed->back() != t_b) {
        throw InvalidArgument("adaptive grid seed must span [t_a, t_b]");
      }
      if (options.seed->size() > target_count) {
        throw InvalidArgument("adaptive grid seed has more instances than the target");
      }
      return *options.seed;
    }
    const std::size_t start = std::max<std::size_t>(2, (target_count + 3) / 4);
    return uniform_time_grid(t_a, t_b, start);
  }();

  LoadCache loads(mesh);
  std::size_t cycles = 0;
  while (grid.size() < target_count) {
    if (cycles == options.max_cycles) {
      std::ostringstream msg;
      msg << "time adaptation did not reach " << target_count << " instances within "
          << options.max_cycles << " cycles (have " << grid.size() << ")";
      throw NonConvergenceError(msg.str());
    }
    const EstimatorReport report = estimate(solve_mixed(problem, grid, mesh, &loads));
    std::vector<std::size_t> marked = doerfler_mark(report, options.theta);
    if (marked.empty()) {
      marked.resize(grid.interval_count());
      std::iota(marked.begin(), marked.end(), std::size_t{0});
    }
    const std::size_t room = target_count - grid.size();
    if (marked.size() > room) marked.resize(room);
    grid = bisect(grid, marked);
    ++cycles;
  }
  return {std::move(grid), cycles};
}

TimeGrid adapt_time_grid(const ProblemSpec& problem, double t_a, double t_b, std::size_t target_count,
                         const SpatialMesh& mesh, double theta) {
  AdaptOptions options;
  options.theta = theta;
  return adapt_time_grid_detailed(problem, t_a, t_b, target_count, mesh, options).grid;
}

void write_csv(std::ostream& out, const EstimatorReport& report) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out.imbue(std::locale::classic());
  out.precision(17);
  out << "i,t_left,t_right,dt,eta_sq\n";
  for (std::size_t i = 0; i < report.eta_sq_per_interval.size(); ++i) {
    out << i << ',' << report.grid[i] << ',' << report.grid[i + 1] << ',' << report.grid.step(i) << ','
        << report.eta_sq_per_interval[i] << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace tampc
