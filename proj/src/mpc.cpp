#include "tampc/mpc.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "tampc/estimator.hpp"
#include "tampc/fem1d.hpp"
#include "tampc/problems.hpp"

namespace tampc {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Supplies the horizon grid of the next iteration, or nothing when the loop is done.
using HorizonSource = std::function<std::optional<TimeGrid>(std::size_t iteration, double t, const Vector& y)>;

MpcRun drive(const ProblemSpec& problem, const MpcConfig& config, const HorizonSource& next_horizon,
             double setup_time) {
  const auto start = Clock::now();
  const SpatialMesh& mesh = config.fine_mesh;
  const double t_end = problem.t_end;

  std::vector<double> times{0.0};
  std::vector<Vector> states{mesh.sample(problem.y0)};
  std::vector<Vector> controls;
  MpcRun run{config, SpaceTimeField(uniform_time_grid(0, 1, 2), mesh),
             SpaceTimeField(uniform_time_grid(0, 1, 2), mesh), {}, {}, {}, {}, {}, 0.0, 0.0, {}, 0.0, 0.0};

  for (std::size_t i = 0;; ++i) {
    const auto iteration_start = Clock::now();
    const double t0 = times.back();
    const Vector& y0 = states.back();
    std::optional<TimeGrid> horizon;
    try {
      horizon = next_horizon(i, t0, y0);
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << "MPC iteration " << i << " (t = " << t0 << "): " << e.what();
      throw NumericalError(msg.str());
    }
    if (!horizon) break;

    OpenLoopSolution sub = [&] {
      try {
        return solve_open_loop(problem, *horizon, y0, mesh);
      } catch (const NumericalError& e) {
        std::ostringstream msg;
        msg << "MPC iteration " << i << " (t = " << t0 << "): " << e.what();
        throw NumericalError(msg.str());
      }
    }();

    double t1 = (*horizon)[1];
    if (t1 > t_end || t_end - t1 <= 1e-10 * t_end) t1 = t_end;
    const Vector applied = sub.u.row(1);
    Matrix segment_values(2, applied.size());
    segment_values.row(0) = applied.transpose();
    segment_values.row(1) = applied.transpose();
    const SpaceTimeField segment(TimeGrid({t0, t1}), mesh, std::move(segment_values));
    Vector y1 = advance_state(problem, y0, segment, t0, t1, mesh, 1);

    times.push_back(t1);
    states.push_back(std::move(y1));
    controls.push_back(applied);
    run.per_iteration_cost.push_back(sub.cost);
    run.per_iteration_grids.push_back(*horizon);
    if (config.keep_subproblems) run.subproblems.push_back(std::move(sub));
    run.per_iteration_wall_time.push_back(seconds_since(iteration_start));
  }

  const auto rows = static_cast<Eigen::Index>(times.size());
  const auto cols = static_cast<Eigen::Index>(mesh.n_nodes());
  Matrix y(rows, cols), u(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) y.row(r) = states[static_cast<std::size_t>(r)].transpose();
  for (Eigen::Index r = 1; r < rows; ++r) u.row(r) = controls[static_cast<std::size_t>(r - 1)].transpose();
  u.row(0) = u.row(1);
  const TimeGrid realized(times);
  run.closed_loop_y = SpaceTimeField(realized, mesh, std::move(y));
  run.feedback_u = SpaceTimeField(realized, mesh, std::move(u));

  const auto desired = SpaceTimeField::sample(realized, mesh, problem.y_d);
  run.tracking_cost = l2_norm_spacetime_squared(run.closed_loop_y - desired);
  run.control_cost = l2_norm_spacetime_squared(run.feedback_u);
  if (problem.exact_y) {
    const auto exact = SpaceTimeField::sample(realized, mesh, *problem.exact_y);
    run.l2_error_y = l2_norm_spacetime(run.closed_loop_y - exact);
  }
  run.adaptation_wall_time += setup_time;
  run.total_wall_time = setup_time + seconds_since(start);
  return run;
}

void check_variant(const MpcConfig& config, MpcVariant expected) {
  if (config.variant != expected) {
    throw InvalidArgument("MPC config variant '" + to_string(config.variant) + "' used with the '" +
                          to_string(expected) + "' driver");
  }
}

}  // namespace

MpcRun run_mpc_uniform(const ProblemSpec& problem, const MpcConfig& config) {
  problem.validate();
  config.validate(problem);
  check_variant(config, MpcVariant::uniform);
  const double t_end = problem.t_end;
  const auto m = static_cast<double>(config.m);
  auto horizon = [&](std::size_t i, double, const Vector&) -> std::optional<TimeGrid> {
    if (i == config.m) return std::nullopt;
    std::vector<double> t(config.N);
    for (std::size_t k = 0; k < config.N; ++k) t[k] = static_cast<double>(i + k) * t_end / m;
    return TimeGrid(std::move(t));
  };
  return drive(problem, config, horizon, 0.0);
}

TimeGrid offline_master_grid(const ProblemSpec& problem, const MpcConfig& config) {
  const TimeGrid adapted =
      adapt_time_grid(problem, 0.0, problem.t_end, config.m + 1, config.coarse_mesh, config.doerfler_theta);
  std::vector<double> t = adapted.instances();
  const double h = adapted.step(adapted.interval_count() - 1);
  for (std::size_t k = 1; k < config.N; ++k) t.push_back(problem.t_end + static_cast<double>(k) * h);
  return TimeGrid(std::move(t));
}

MpcRun run_mpc_offline(const ProblemSpec& problem, const MpcConfig& config) {
  problem.validate();
  config.validate(problem);
  check_variant(config, MpcVariant::offline);
  const auto start = Clock::now();
  const TimeGrid master = offline_master_grid(problem, config);
  const double setup = seconds_since(start);
  auto horizon = [&](std::size_t i, double, const Vector&) -> std::optional<TimeGrid> {
    if (i == config.m) return std::nullopt;
    return master.slice(i, config.N);
  };
  MpcRun run = drive(problem, config, horizon, setup);
  run.master_grid = master;
  return run;
}

MpcRun run_mpc_online(const ProblemSpec& problem, const MpcConfig& config) {
  problem.validate();
  config.validate(problem);
  check_variant(config, MpcVariant::online);
  const double t_end = problem.t_end;
  const double span = config.horizon_length;
  const SpatialMesh fine = config.fine_mesh;
  std::optional<TimeGrid> previous;
  double adaptation_time = 0.0;

  auto horizon = [&](std::size_t, double t0, const Vector& y0) -> std::optional<TimeGrid> {
    if (t0 >= t_end) return std::nullopt;
    const double t_b = t0 + span;
    TimeGrid grid = uniform_time_grid(t0, t_b, config.N);
    if (!config.equidistant_windows) {
      const auto adapt_start = Clock::now();
      const ProblemSpec window =
          with_initial_state(problem, [fine, y0](double x) { return fine.interpolate(y0, x); });
      AdaptOptions options;
      options.theta = config.doerfler_theta;
      if (config.warm_start && previous) {
        // Drop the instant just passed, append the new right end, keep every other interior point.
        std::vector<double> kept;
        for (double t : previous->instances()) {
          if (t >= t0 && t < t_b) kept.push_back(t);
        }
        kept.push_back(t_b);
        std::vector<double> coarse{kept.front()};
        for (std::size_t k = 2; k + 1 < kept.size(); k += 2) coarse.push_back(kept[k]);
        coarse.push_back(kept.back());
        if (coarse.size() <= config.N && coarse.front() == t0) options.seed = TimeGrid(std::move(coarse));
      }
      grid = adapt_time_grid_detailed(window, t0, t_b, config.N, config.coarse_mesh, options).grid;
      adaptation_time += seconds_since(adapt_start);
    }
    if (grid.step(0) < 1e-10 * t_end) {
      std::ostringstream msg;
      msg << "online MPC stagnates at t = " << t0 << " (first step " << grid.step(0) << ")";
      throw StagnationError(msg.str());
    }
    previous = grid;
    return grid;
  };
  MpcRun run = drive(problem, config, horizon, 0.0);
  run.adaptation_wall_time = adaptation_time;
  return run;
}

MpcRun run_mpc(const ProblemSpec& problem, const MpcConfig& config) {
  switch (config.variant) {
    case MpcVariant::uniform: return run_mpc_uniform(problem, config);
    case MpcVariant::offline: return run_mpc_offline(problem, config);
    case MpcVariant::online: return run_mpc_online(problem, config);
  }
  throw InvalidArgument("unknown MPC variant");
}

void write_trajectory_csv(std::ostream& out, const MpcRun& run) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out.imbue(std::locale::classic());
  out.precision(17);
  out << "t,x,y,u\n";
  const auto& grid = run.closed_loop_y.grid();
  const auto& mesh = run.closed_loop_y.mesh();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < mesh.n_nodes(); ++j) {
      out << grid[i] << ',' << mesh.node(j) << ',' << run.closed_loop_y(i, j) << ',' << run.feedback_u(i, j)
          << '\n';
    }
  }
  out.flags(flags);
  out.precision(precision);
}

void write_iterations_csv(std::ostream& out, const MpcRun& run) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out.imbue(std::locale::classic());
  out << "i,t_start,horizon_length,n_instances,wall_time_s,subproblem_cost\n";
  for (std::size_t i = 0; i < run.iterations(); ++i) {
    const auto& g = run.per_iteration_grids[i];
    out << i << ',' << std::setprecision(17) << g.front() << ',' << g.length() << ',' << g.size() << ','
        << std::fixed << std::setprecision(3) << run.per_iteration_wall_time[i] << ',';
    out.flags(flags);
    out << std::setprecision(17) << run.per_iteration_cost[i] << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace tampc
