#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tampc/errors.hpp"

namespace tampc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// f(t, x)
using SpaceTimeFunction = std::function<double(double, double)>;
/// g(x)
using SpaceFunction = std::function<double(double)>;

/// First Dirichlet eigenvalue of -d²/dx² on (0,1); equals 1/c_p² for the Poincaré constant c_p.
inline constexpr double kFirstDirichletEigenvalue = std::numbers::pi * std::numbers::pi;

/**
 * Linear-quadratic parabolic control problem on (0, t_end) x (0, 1):
 *
 *   y_t - nu y_xx - mu y = f + u,  y = 0 on the lateral boundary,  y(0) = y0,
 *   J = 1/2 ||y - y_d||^2 + alpha/2 ||u||^2.
 *
 * `f_t` and `f_xx` are the analytic derivatives of the source; they enter the
 * right-hand side of the space-time reformulation.
 */
struct ProblemSpec {
  std::string name = "unnamed";
  double nu = 1.0;
  double mu = 0.0;
  double alpha = 1.0;
  double t_end = 1.0;

  SpaceTimeFunction f;
  SpaceTimeFunction f_t;
  SpaceTimeFunction f_xx;
  SpaceTimeFunction y_d;
  SpaceFunction y0;

  std::optional<SpaceTimeFunction> exact_y;
  std::optional<SpaceTimeFunction> exact_u;

  /// Throws InvalidArgument unless nu > 0, alpha > 0, mu >= 0, t_end > 0 and all data are set.
  void validate() const;

  /// mu <= nu / c_p², the condition under which the depletion estimator is a proven bound.
  [[nodiscard]] bool estimator_condition_ok() const { return mu <= nu * kFirstDirichletEigenvalue; }

  /// y_d / alpha - f_t - nu f_xx - mu f
  [[nodiscard]] double desired_rhs(double t, double x) const;
};

class TimeGrid {
public:
  /// Throws InvalidArgument unless the instances are strictly increasing and at least two.
  explicit TimeGrid(std::vector<double> instances);

  [[nodiscard]] const std::vector<double>& instances() const { return instances_; }
  [[nodiscard]] std::size_t size() const { return instances_.size(); }
  [[nodiscard]] std::size_t interval_count() const { return instances_.size() - 1; }
  [[nodiscard]] double operator[](std::size_t i) const { return instances_[i]; }
  [[nodiscard]] double front() const { return instances_.front(); }
  [[nodiscard]] double back() const { return instances_.back(); }
  [[nodiscard]] double length() const { return back() - front(); }

  /// Length of the interval (t_{i}, t_{i+1}], 0-based.
  [[nodiscard]] double step(std::size_t interval) const {
    return instances_[interval + 1] - instances_[interval];
  }
  [[nodiscard]] double min_step() const;

  /// Instances i..i+count-1 as a grid of their own.
  [[nodiscard]] TimeGrid slice(std::size_t first, std::size_t count) const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
  std::vector<double> instances_;
};

/// `count` equispaced instances from t_start to t_stop inclusive.
[[nodiscard]] TimeGrid uniform_time_grid(double t_start, double t_stop, std::size_t count);

/// One value per line, 17 significant digits.
void write_time_grid(std::ostream& out, const TimeGrid& grid);
[[nodiscard]] TimeGrid read_time_grid(std::istream& in);

/// Uniform partition of (0,1).
class SpatialMesh {
public:
  explicit SpatialMesh(std::size_t n_cells);

  [[nodiscard]] std::size_t n_cells() const { return n_cells_; }
  [[nodiscard]] std::size_t n_nodes() const { return n_cells_ + 1; }
  [[nodiscard]] double dx() const { return 1.0 / static_cast<double>(n_cells_); }
  [[nodiscard]] double node(std::size_t j) const {
    return j == n_cells_ ? 1.0 : static_cast<double>(j) * dx();
  }
  [[nodiscard]] Vector nodes() const;

  [[nodiscard]] Vector sample(const SpaceFunction& g) const;
  [[nodiscard]] Vector sample(const SpaceTimeFunction& g, double t) const;

  /// Continuous piecewise-linear interpolant of nodal values, evaluated at x in [0,1].
  [[nodiscard]] double interpolate(const Vector& values, double x) const;

  friend bool operator==(const SpatialMesh&, const SpatialMesh&) = default;

private:
  std::size_t n_cells_;
};

/// Nodal values on a tensor grid; row i holds time instance t_i.
class SpaceTimeField {
public:
  SpaceTimeField(TimeGrid grid, SpatialMesh mesh);
  SpaceTimeField(TimeGrid grid, SpatialMesh mesh, Matrix values);

  [[nodiscard]] static SpaceTimeField sample(const TimeGrid& grid, const SpatialMesh& mesh,
                                             const SpaceTimeFunction& g);

  [[nodiscard]] const TimeGrid& grid() const { return grid_; }
  [[nodiscard]] const SpatialMesh& mesh() const { return mesh_; }
  [[nodiscard]] const Matrix& values() const { return values_; }
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  [[nodiscard]] Vector row(std::size_t i) const { return values_.row(i).transpose(); }

  /// Linear interpolation in time (clamped to the grid span), nodal in space.
  [[nodiscard]] Vector at_time(double t) const;

private:
  TimeGrid grid_;
  SpatialMesh mesh_;
  Matrix values_;
};

[[nodiscard]] SpaceTimeField operator-(const SpaceTimeField& a, const SpaceTimeField& b);
[[nodiscard]] SpaceTimeField operator*(double c, const SpaceTimeField& a);

enum class MpcVariant { uniform, offline, online };

[[nodiscard]] std::string to_string(MpcVariant v);
[[nodiscard]] MpcVariant parse_variant(const std::string& name);

struct MpcConfig {
  MpcVariant variant = MpcVariant::uniform;
  /// Closed-loop steps (uniform and offline).
  std::size_t m = 45;
  /// Time instances per prediction horizon.
  std::size_t N = 9;
  /// Prediction horizon length for the online variant.
  double horizon_length = 0.2;
  double doerfler_theta = 0.5;
  SpatialMesh coarse_mesh{5};
  SpatialMesh fine_mesh{100};
  bool warm_start = false;
  /// Online variant only: equidistant window grids instead of estimator-driven ones.
  bool equidistant_windows = false;
  /// Keep every open-loop solution in the run record.
  bool keep_subproblems = false;

  void validate(const ProblemSpec& problem) const;
};

}  // namespace tampc
