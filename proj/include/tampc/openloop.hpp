#pragma once

#include <iosfwd>

#include "tampc/core.hpp"

namespace tampc {

/**
 * Discrete minimizer of one prediction-horizon subproblem.
 *
 * Implicit Euler in time with P1 in space; controls live on levels 1..N-1
 * (level 0 repeats level 1 for output). Row i of `p` holds the multiplier of
 * the state equation on (t_{i-1}, t_i], so alpha u + p = 0 holds row by row and
 * the terminal condition p(t_N) = 0 sits one level past the last row.
 */
struct OpenLoopSolution {
  TimeGrid grid;
  SpaceTimeField y;
  SpaceTimeField u;
  SpaceTimeField p;
  /// Discrete reduced cost at the minimizer.
  double cost = 0.0;
};

/**
 * Minimizes
 *   J_h = sum_{i=1}^{N-1} dt_i [ 1/2 (y_i - y_d(t_i))ᵀ M (y_i - y_d(t_i)) + alpha/2 u_iᵀ M u_i ]
 * subject to
 *   M (y_i - y_{i-1}) / dt_i + nu K y_i - mu M y_i = M (f(t_i) + u_i),  y_0 = y_init,
 * by one direct solve of the symmetric KKT system in (y, u, p).
 */
[[nodiscard]] OpenLoopSolution solve_open_loop(const ProblemSpec& problem, const TimeGrid& grid,
                                               const Vector& y_init, const SpatialMesh& mesh);

/**
 * Implicit Euler for y_t - nu y_xx - mu y = f + u over `steps` equal substeps of
 * [t_a, t_b]; the control is interpolated linearly in time from `control`.
 * Returns y(t_b).
 */
[[nodiscard]] Vector advance_state(const ProblemSpec& problem, const Vector& y_start,
                                   const SpaceTimeField& control, double t_a, double t_b,
                                   const SpatialMesh& mesh, std::size_t steps = 1);

// Reduced-cost view of the same discrete problem, used for verification. A
// control is a (N-1) x n_nodes matrix; row k is applied on (t_k, t_{k+1}].

/// States y_0..y_{N-1} (rows) driven by `control`.
[[nodiscard]] Matrix simulate_state(const ProblemSpec& problem, const TimeGrid& grid,
                                    const Vector& y_init, const SpatialMesh& mesh, const Matrix& control);

[[nodiscard]] double reduced_cost(const ProblemSpec& problem, const TimeGrid& grid, const Vector& y_init,
                                  const SpatialMesh& mesh, const Matrix& control);

/// Gradient of reduced_cost with respect to the nodal control values, via the discrete adjoint.
[[nodiscard]] Matrix reduced_gradient(const ProblemSpec& problem, const TimeGrid& grid,
                                      const Vector& y_init, const SpatialMesh& mesh, const Matrix& control);

/// J_h evaluated on given trajectories (rows 1..N-1 of y and u).
[[nodiscard]] double discrete_cost(const ProblemSpec& problem, const SpaceTimeField& y,
                                   const SpaceTimeField& u);

/// CSV with columns t,x,y,u,p.
void write_csv(std::ostream& out, const OpenLoopSolution& solution);

}  // namespace tampc
