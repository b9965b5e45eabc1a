#include "tampc/core.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace tampc {

void ProblemSpec::validate() const {
  if (!(nu > 0.0)) throw InvalidArgument("problem '" + name + "': nu must be positive");
  if (!(alpha > 0.0)) throw InvalidArgument("problem '" + name + "': alpha must be positive");
  if (!(mu >= 0.0)) throw InvalidArgument("problem '" + name + "': mu must be non-negative");
  if (!(t_end > 0.0)) throw InvalidArgument("problem '" + name + "': t_end must be positive");
  if (!f || !f_t || !f_xx || !y_d || !y0) {
    throw InvalidArgument("problem '" + name + "': data functions f, f_t, f_xx, y_d, y0 are required");
  }
}

double ProblemSpec::desired_rhs(double t, double x) const {
  return y_d(t, x) / alpha - f_t(t, x) - nu * f_xx(t, x) - mu * f(t, x);
}

TimeGrid::TimeGrid(std::vector<double> instances) : instances_(std::move(instances)) {
  if (instances_.size() < 2) throw InvalidArgument("time grid needs at least two instances");
  for (std::size_t i = 1; i < instances_.size(); ++i) {
    if (!(instances_[i] > instances_[i - 1])) {
      std::ostringstream msg;
      msg << "time grid is not strictly increasing at index " << i << " (" << instances_[i - 1]
          << " >= " << instances_[i] << ")";
      throw InvalidArgument(msg.str());
    }
  }
}

double TimeGrid::min_step() const {
  double h = step(0);
  for (std::size_t i = 1; i < interval_count(); ++i) h = std::min(h, step(i));
  return h;
}

TimeGrid TimeGrid::slice(std::size_t first, std::size_t count) const {
  if (first + count > instances_.size()) throw InvalidArgument("time grid slice out of range");
  return TimeGrid({instances_.begin() + static_cast<std::ptrdiff_t>(first),
                   instances_.begin() + static_cast<std::ptrdiff_t>(first + count)});
}

TimeGrid uniform_time_grid(double t_start, double t_stop, std::size_t count) {
  if (count < 2) throw InvalidArgument("uniform grid needs count >= 2");
  if (!(t_stop > t_start)) throw InvalidArgument("uniform grid needs t_stop > t_start");
  std::vector<double> t(count);
  const double h = (t_stop - t_start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) t[i] = t_start + static_cast<double>(i) * h;
  t.back() = t_stop;
  return TimeGrid(std::move(t));
}

void write_time_grid(std::ostream& out, const TimeGrid& grid) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  for (double t : grid.instances()) out << t << '\n';
  out.flags(flags);
  out.precision(precision);
}

TimeGrid read_time_grid(std::istream& in) {
  std::vector<double> t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    ss.imbue(std::locale::classic());
    double value = 0.0;
    if (!(ss >> value)) throw InvalidArgument("time grid file: cannot parse '" + line + "'");
    t.push_back(value);
  }
  return TimeGrid(std::move(t));
}

SpatialMesh::SpatialMesh(std::size_t n_cells) : n_cells_(n_cells) {
  if (n_cells_ < 2) throw InvalidArgument("spatial mesh needs at least 2 cells");
}

Vector SpatialMesh::nodes() const {
  Vector x(n_nodes());
  for (std::size_t j = 0; j < n_nodes(); ++j) x(static_cast<Eigen::Index>(j)) = node(j);
  return x;
}

Vector SpatialMesh::sample(const SpaceFunction& g) const {
  Vector v(n_nodes());
  for (std::size_t j = 0; j < n_nodes(); ++j) v(static_cast<Eigen::Index>(j)) = g(node(j));
  return v;
}

Vector SpatialMesh::sample(const SpaceTimeFunction& g, double t) const {
  Vector v(n_nodes());
  for (std::size_t j = 0; j < n_nodes(); ++j) v(static_cast<Eigen::Index>(j)) = g(t, node(j));
  return v;
}

double SpatialMesh::interpolate(const Vector& values, double x) const {
  x = std::clamp(x, 0.0, 1.0);
  const auto cell = std::min(static_cast<std::size_t>(x / dx()), n_cells_ - 1);
  const double s = (x - node(cell)) / dx();
  const auto j = static_cast<Eigen::Index>(cell);
  return (1.0 - s) * values(j) + s * values(j + 1);
}

SpaceTimeField::SpaceTimeField(TimeGrid grid, SpatialMesh mesh)
    : grid_(std::move(grid)),
      mesh_(mesh),
      values_(Matrix::Zero(static_cast<Eigen::Index>(grid_.size()),
                           static_cast<Eigen::Index>(mesh_.n_nodes()))) {}

SpaceTimeField::SpaceTimeField(TimeGrid grid, SpatialMesh mesh, Matrix values)
    : grid_(std::move(grid)), mesh_(mesh), values_(std::move(values)) {
  if (values_.rows() != static_cast<Eigen::Index>(grid_.size()) ||
      values_.cols() != static_cast<Eigen::Index>(mesh_.n_nodes())) {
    throw InvalidArgument("space-time field dimensions do not match grid and mesh");
  }
}

SpaceTimeField SpaceTimeField::sample(const TimeGrid& grid, const SpatialMesh& mesh,
                                      const SpaceTimeFunction& g) {
  Matrix v(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(mesh.n_nodes()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    v.row(static_cast<Eigen::Index>(i)) = mesh.sample(g, grid[i]).transpose();
  }
  return SpaceTimeField(grid, mesh, std::move(v));
}

Vector SpaceTimeField::at_time(double t) const {
  const auto& ts = grid_.instances();
  if (t <= ts.front()) return row(0);
  if (t >= ts.back()) return row(ts.size() - 1);
  const auto upper = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
  const std::size_t lower = upper - 1;
  const double s = (t - ts[lower]) / (ts[upper] - ts[lower]);
  return (1.0 - s) * row(lower) + s * row(upper);
}

SpaceTimeField operator-(const SpaceTimeField& a, const SpaceTimeField& b) {
  if (!(a.grid() == b.grid()) || !(a.mesh() == b.mesh())) {
    throw InvalidArgument("space-time fields live on different grids");
  }
  return SpaceTimeField(a.grid(), a.mesh(), a.values() - b.values());
}

SpaceTimeField operator*(double c, const SpaceTimeField& a) {
  return SpaceTimeField(a.grid(), a.mesh(), c * a.values());
}

std::string to_string(MpcVariant v) {
  switch (v) {
    case MpcVariant::uniform: return "uniform";
    case MpcVariant::offline: return "offline";
    case MpcVariant::online: return "online";
  }
  return "unknown";
}

MpcVariant parse_variant(const std::string& name) {
  if (name == "uniform") return MpcVariant::uniform;
  if (name == "offline") return MpcVariant::offline;
  if (name == "online") return MpcVariant::online;
  throw InvalidArgument("unknown MPC variant '" + name + "'");
}

void MpcConfig::validate(const ProblemSpec& problem) const {
  if (N < 2) throw InvalidArgument("MPC horizon needs N >= 2");
  if (!(doerfler_theta > 0.0 && doerfler_theta <= 1.0)) {
    throw InvalidArgument("Doerfler fraction must lie in (0, 1]");
  }
  if (variant == MpcVariant::online) {
    if (!(horizon_length > 0.0 && horizon_length <= problem.t_end)) {
      throw InvalidArgument("online horizon length must lie in (0, t_end]");
    }
  } else {
    if (m < 1) throw InvalidArgument("MPC needs m >= 1");
    if (N > m + 1) throw InvalidArgument("MPC horizon needs N <= m + 1");
  }
}

}  // namespace tampc
