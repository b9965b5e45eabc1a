#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "tampc/core.hpp"
#include "tampc/openloop.hpp"

namespace tampc {

/// Closed-loop record of one MPC run.
struct MpcRun {
  MpcConfig config;
  /// State on the realized closed-loop grid 0 = t_0 < ... = T (fine mesh).
  SpaceTimeField closed_loop_y;
  /// Row i+1 holds the feedback applied on (t_i, t_{i+1}]; row 0 repeats row 1.
  SpaceTimeField feedback_u;
  std::vector<TimeGrid> per_iteration_grids;
  std::vector<double> per_iteration_wall_time;
  std::vector<double> per_iteration_cost;
  /// Filled only with MpcConfig::keep_subproblems.
  std::vector<OpenLoopSolution> subproblems;
  /// Offline variant: the estimator-driven grid including the N-1 points past T.
  std::optional<TimeGrid> master_grid;
  /// Time spent building adaptive grids (included in total_wall_time).
  double adaptation_wall_time = 0.0;
  double total_wall_time = 0.0;
  std::optional<double> l2_error_y;
  /// ||y - y_d||² and ||u||² in L²(0,T; L²(0,1)).
  double tracking_cost = 0.0;
  double control_cost = 0.0;

  [[nodiscard]] std::size_t iterations() const { return per_iteration_grids.size(); }
};

/// Receding horizon on the uniform grid t_i = i T / m with horizons of N instances.
[[nodiscard]] MpcRun run_mpc_uniform(const ProblemSpec& problem, const MpcConfig& config);

/**
 * Builds an estimator-driven grid with m+1 instances on [0, T] (coarse mesh),
 * extends it by N-1 instances at the last spacing, then runs the receding
 * horizon over windows of N consecutive master-grid instances.
 */
[[nodiscard]] MpcRun run_mpc_offline(const ProblemSpec& problem, const MpcConfig& config);

/// The extended master grid used by run_mpc_offline (m+N instances).
[[nodiscard]] TimeGrid offline_master_grid(const ProblemSpec& problem, const MpcConfig& config);

/**
 * Windows of fixed length T̄ = horizon_length. Each window gets its own N-point
 * grid (estimator-driven on the coarse mesh, or equidistant when
 * `equidistant_windows` is set); the loop advances by the window's first step
 * until T is reached. The final step is clipped to end at T.
 */
[[nodiscard]] MpcRun run_mpc_online(const ProblemSpec& problem, const MpcConfig& config);

/// Dispatches on config.variant.
[[nodiscard]] MpcRun run_mpc(const ProblemSpec& problem, const MpcConfig& config);

/// CSV with columns t,x,y,u.
void write_trajectory_csv(std::ostream& out, const MpcRun& run);
/// CSV with columns i,t_start,horizon_length,n_instances,wall_time_s,subproblem_cost.
void write_iterations_csv(std::ostream& out, const MpcRun& run);

}  // namespace tampc
