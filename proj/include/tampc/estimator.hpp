#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "tampc/core.hpp"
#include "tampc/spacetime_mixed.hpp"

namespace tampc {

/// Per-interval squared temporal error indicators of a mixed solution.
struct EstimatorReport {
  TimeGrid grid;
  std::vector<double> eta_sq_per_interval;
  double eta_sq_total = 0.0;
  /// Set when mu > nu / c_p²; the indicator is then heuristic only.
  bool stability_warning = false;
};

/**
 * Residual indicator per interval I_i:
 *
 *   eta_i² = dt_i² ∫_{I_i} ∫ |ỹ_d + y_tt + nu Δ_h w - 2 nu mu Δ_h y - (1/alpha + mu²) y|² dx dt
 *
 * with y_tt = 0 for the piecewise-linear-in-time discrete state, Δ_h the
 * lumped-mass nodal Laplacian, 2-point Gauss in time and the P1 mass form in space.
 */
[[nodiscard]] EstimatorReport estimate(const MixedSolution& solution);

/**
 * Minimal set of intervals whose indicators sum to at least theta times the
 * total, chosen greedily by descending indicator (ties: lower index first).
 * Returned in selection order. Empty when the total is zero.
 */
[[nodiscard]] std::vector<std::size_t> doerfler_mark(const EstimatorReport& report, double theta);
[[nodiscard]] std::vector<std::size_t> doerfler_mark(const std::vector<double>& eta_sq, double theta);

/// Inserts the midpoint of every marked interval.
[[nodiscard]] TimeGrid bisect(const TimeGrid& grid, const std::vector<std::size_t>& marked);

struct AdaptOptions {
  double theta = 0.5;
  /// Replaces the default uniform start; must span the same interval.
  std::optional<TimeGrid> seed;
  std::size_t max_cycles = 50;
};

struct AdaptResult {
  TimeGrid grid;
  std::size_t cycles = 0;
};

/**
 * solve -> estimate -> mark -> refine on [t_a, t_b] until the grid has exactly
 * `target_count` instances. The default start is uniform with
 * max(2, ceil(target_count / 4)) instances. When the last cycle would overshoot,
 * only the highest-indicator marked intervals are bisected. A cycle with an
 * all-zero estimate refines every interval, lowest index first.
 */
[[nodiscard]] AdaptResult adapt_time_grid_detailed(const ProblemSpec& problem, double t_a, double t_b,
                                                   std::size_t target_count, const SpatialMesh& mesh,
                                                   const AdaptOptions& options = {});

[[nodiscard]] TimeGrid adapt_time_grid(const ProblemSpec& problem, double t_a, double t_b,
                                       std::size_t target_count, const SpatialMesh& mesh,
                                       double theta = 0.5);

/// CSV with columns i,t_left,t_right,dt,eta_sq.
void write_csv(std::ostream& out, const EstimatorReport& report);

}  // namespace tampc
