#pragma once

#include <iosfwd>
#include <map>
#include <utility>

#include <Eigen/Sparse>

#include "tampc/core.hpp"

namespace tampc {

/**
 * Q1 space-time discretization of the mixed fourth-order optimality system
 *
 *   -y_tt - nu w_xx + 2 nu mu y_xx + (1/alpha + mu²) y = y_d/alpha - f_t - nu f_xx - mu f,
 *    nu y_xx + w = 0,
 *
 * with y(0) = y0, y = 0 and w = f on the lateral boundary, and the natural
 * end-time condition (y_t - nu y_xx - mu y)(T) = f(T).
 *
 * Unknowns are ordered time-major: level i holds y(t_i, x_0..x_n) followed by
 * w(t_i, x_0..x_n).
 */
struct MixedSystem {
  TimeGrid grid;
  SpatialMesh mesh;
  /// Bilinear form on every degree of freedom, before constraints are imposed.
  Eigen::SparseMatrix<double> bilinear;
  /// Linear form on every degree of freedom.
  Vector load;
  /// System with constrained rows replaced by identity rows.
  Eigen::SparseMatrix<double> matrix;
  Vector rhs;

  [[nodiscard]] Eigen::Index y_index(std::size_t level, std::size_t node) const {
    return static_cast<Eigen::Index>(2 * level * mesh.n_nodes() + node);
  }
  [[nodiscard]] Eigen::Index w_index(std::size_t level, std::size_t node) const {
    return static_cast<Eigen::Index>((2 * level + 1) * mesh.n_nodes() + node);
  }
  [[nodiscard]] Eigen::Index dimension() const {
    return static_cast<Eigen::Index>(2 * grid.size() * mesh.n_nodes());
  }
  [[nodiscard]] bool is_constrained_row(Eigen::Index row) const;
};

/**
 * Per-interval load integrals, reusable while the source and desired state stay
 * fixed (the initial state may change). Grid adaptation bisects a few intervals
 * per cycle, so most integrals carry over. Bound to one spatial mesh.
 */
class LoadCache {
public:
  explicit LoadCache(const SpatialMesh& mesh) : mesh_(mesh) {}

  [[nodiscard]] const SpatialMesh& mesh() const { return mesh_; }
  [[nodiscard]] const Vector* find(double t_a, double t_b) const;
  void store(double t_a, double t_b, Vector contribution);
  [[nodiscard]] std::size_t size() const { return entries_.size(); }

private:
  SpatialMesh mesh_;
  std::map<std::pair<double, double>, Vector> entries_;
};

/// `cache`, when given, must have been filled for the same f, y_d and mesh.
[[nodiscard]] MixedSystem assemble_mixed(const ProblemSpec& problem, const TimeGrid& grid,
                                         const SpatialMesh& mesh, LoadCache* cache = nullptr);

/// Discrete (y, w) pair on a space-time grid together with the problem it solves.
class MixedSolution {
public:
  MixedSolution(ProblemSpec problem, SpaceTimeField y, SpaceTimeField w);

  [[nodiscard]] const ProblemSpec& problem() const { return problem_; }
  [[nodiscard]] const SpaceTimeField& y() const { return y_; }
  [[nodiscard]] const SpaceTimeField& w() const { return w_; }
  [[nodiscard]] const TimeGrid& grid() const { return y_.grid(); }
  [[nodiscard]] const SpatialMesh& mesh() const { return y_.mesh(); }

private:
  ProblemSpec problem_;
  SpaceTimeField y_;
  SpaceTimeField w_;
};

/// Stacks a solution into the unknown vector layout of MixedSystem.
[[nodiscard]] Vector to_unknowns(const MixedSystem& system, const MixedSolution& solution);

[[nodiscard]] MixedSolution solve_mixed(const ProblemSpec& problem, const TimeGrid& grid,
                                        const SpatialMesh& mesh, LoadCache* cache = nullptr);

/// CSV with columns t,x,y,w.
void write_csv(std::ostream& out, const MixedSolution& solution);

}  // namespace tampc
