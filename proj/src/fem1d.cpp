#include "tampc/fem1d.hpp"

namespace tampc {

double l2_norm_squared(const Vector& values, const SpatialMesh& mesh) {
  if (values.size() != static_cast<Eigen::Index>(mesh.n_nodes())) {
    throw InvalidArgument("nodal vector does not match mesh");
  }
  const double h = mesh.dx();
  double sum = 0.0;
  for (Eigen::Index e = 0; e + 1 < values.size(); ++e) {
    const double a = values(e);
    const double b = values(e + 1);
    sum += h / 3.0 * (a * a + a * b + b * b);
  }
  return sum;
}

double l2_norm_spacetime_squared(const SpaceTimeField& field) {
  const auto& grid = field.grid();
  double previous = l2_norm_squared(field.row(0), field.mesh());
  double sum = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double current = l2_norm_squared(field.row(i), field.mesh());
    sum += 0.5 * grid.step(i - 1) * (previous + current);
    previous = current;
  }
  return sum;
}

double l2_norm_spacetime(const SpaceTimeField& field) {
  return std::sqrt(l2_norm_spacetime_squared(field));
}

}  // namespace tampc
