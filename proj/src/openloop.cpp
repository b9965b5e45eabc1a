#include "tampc/openloop.hpp"

#include <ostream>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "tampc/fem1d.hpp"

namespace tampc {
namespace {

/// Spatial operators restricted to the interior nodes 1..n-1.
struct InteriorOperators {
  BandedMatrix<double> mass_full;
  BandedMatrix<double> mass;
  BandedMatrix<double> stiffness;
  Eigen::Index interior;

  explicit InteriorOperators(const SpatialMesh& mesh)
      : mass_full(assemble_mass(mesh)),
        mass(mass_full.block(1, static_cast<Eigen::Index>(mesh.n_nodes()) - 2)),
        stiffness(assemble_stiffness(mesh).block(1, static_cast<Eigen::Index>(mesh.n_nodes()) - 2)),
        interior(static_cast<Eigen::Index>(mesh.n_nodes()) - 2) {}

  /// M + dt (nu K - mu M) on the interior.
  [[nodiscard]] BandedMatrix<double> step_matrix(const ProblemSpec& problem, double dt) const {
    return mass + (stiffness * problem.nu - mass * problem.mu) * dt;
  }

  /// Interior rows of M_full v.
  [[nodiscard]] Vector mass_rows(const Vector& full) const {
    return (mass_full * full).segment(1, interior);
  }
};

Vector with_boundary(const Vector& interior) {
  Vector full = Vector::Zero(interior.size() + 2);
  full.segment(1, interior.size()) = interior;
  return full;
}

void check_initial(const Vector& y, const SpatialMesh& mesh) {
  if (y.size() != static_cast<Eigen::Index>(mesh.n_nodes())) {
    throw InvalidArgument("initial state does not match mesh");
  }
}

void add_block(std::vector<Eigen::Triplet<double>>& entries, const BandedMatrix<double>& block,
               Eigen::Index row0, Eigen::Index col0, double scale) {
  for (Eigen::Index i = 0; i < block.dimension(); ++i) {
    for (Eigen::Index j = std::max<Eigen::Index>(0, i - 1);
         j <= std::min<Eigen::Index>(block.dimension() - 1, i + 1); ++j) {
      const double v = block(i, j) * scale;
      if (v != 0.0) entries.emplace_back(row0 + i, col0 + j, v);
    }
  }
}

}  // namespace

OpenLoopSolution solve_open_loop(const ProblemSpec& problem, const TimeGrid& grid, const Vector& y_init,
                                 const SpatialMesh& mesh) {
  problem.validate();
  check_initial(y_init, mesh);
  const InteriorOperators ops(mesh);
  const Eigen::Index ni = ops.interior;
  const auto levels = static_cast<Eigen::Index>(grid.size()) - 1;
  const Eigen::Index block = 3 * ni;
  const Eigen::Index dim = levels * block;
  const double alpha = problem.alpha;

  // Level k (1-based) occupies [(k-1)*block, k*block): y_k, u_k, lambda_k.
  auto y_col = [&](Eigen::Index k) { return (k - 1) * block; };
  auto u_col = [&](Eigen::Index k) { return (k - 1) * block + ni; };
  auto l_col = [&](Eigen::Index k) { return (k - 1) * block + 2 * ni; };

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(dim) * 9);
  Vector rhs = Vector::Zero(dim);
  for (Eigen::Index k = 1; k <= levels; ++k) {
    const double dt = grid.step(static_cast<std::size_t>(k - 1));
    const double t = grid[static_cast<std::size_t>(k)];
    const auto a = ops.step_matrix(problem, dt);

    // Stationarity in y_k.
    add_block(entries, ops.mass, y_col(k), y_col(k), dt);
    add_block(entries, a, y_col(k), l_col(k), 1.0);
    if (k < levels) add_block(entries, ops.mass, y_col(k), l_col(k + 1), -1.0);
    rhs.segment(y_col(k), ni) = dt * ops.mass_rows(mesh.sample(problem.y_d, t));

    // Stationarity in u_k.
    add_block(entries, ops.mass, u_col(k), u_col(k), alpha * dt);
    add_block(entries, ops.mass, u_col(k), l_col(k), -dt);

    // State equation on (t_{k-1}, t_k].
    add_block(entries, a, l_col(k), y_col(k), 1.0);
    if (k > 1) add_block(entries, ops.mass, l_col(k), y_col(k - 1), -1.0);
    add_block(entries, ops.mass, l_col(k), u_col(k), -dt);
    rhs.segment(l_col(k), ni) = dt * ops.mass_rows(mesh.sample(problem.f, t));
    if (k == 1) rhs.segment(l_col(k), ni) += ops.mass_rows(y_init);
  }

  Eigen::SparseMatrix<double> kkt(dim, dim);
  kkt.setFromTriplets(entries.begin(), entries.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(kkt);
  if (lu.info() != Eigen::Success) {
    throw SingularMatrixError("open-loop KKT system is singular: " + lu.lastErrorMessage());
  }
  Vector z = lu.solve(rhs);
  Vector residual = rhs - kkt * z;
  const double tolerance = 1e-10 * (1.0 + rhs.lpNorm<Eigen::Infinity>());
  if (residual.lpNorm<Eigen::Infinity>() > tolerance) {
    z += lu.solve(residual);
    residual = rhs - kkt * z;
  }
  if (!z.allFinite()) throw SingularMatrixError("open-loop KKT solve produced non-finite values");

  const auto rows = levels + 1;
  const auto cols = static_cast<Eigen::Index>(mesh.n_nodes());
  Matrix y = Matrix::Zero(rows, cols), u = Matrix::Zero(rows, cols), p = Matrix::Zero(rows, cols);
  y.row(0) = y_init.transpose();
  for (Eigen::Index k = 1; k <= levels; ++k) {
    y.row(k).segment(1, ni) = z.segment(y_col(k), ni).transpose();
    u.row(k).segment(1, ni) = z.segment(u_col(k), ni).transpose();
    p.row(k).segment(1, ni) = -z.segment(l_col(k), ni).transpose();
  }
  u.row(0) = u.row(1);
  p.row(0) = p.row(1);

  OpenLoopSolution out{grid, SpaceTimeField(grid, mesh, std::move(y)), SpaceTimeField(grid, mesh, std::move(u)),
                       SpaceTimeField(grid, mesh, std::move(p)), 0.0};
  out.cost = discrete_cost(problem, out.y, out.u);
  return out;
}

Vector advance_state(const ProblemSpec& problem, const Vector& y_start, const SpaceTimeField& control,
                     double t_a, double t_b, const SpatialMesh& mesh, std::size_t steps) {
  check_initial(y_start, mesh);
  if (!(t_b > t_a)) throw InvalidArgument("advance_state needs t_b > t_a");
  if (steps < 1) throw InvalidArgument("advance_state needs at least one step");
  if (!(control.mesh() == mesh)) throw InvalidArgument("control lives on a different mesh");
  const InteriorOperators ops(mesh);
  const double dt = (t_b - t_a) / static_cast<double>(steps);
  const BandedMatrix<double> a = ops.step_matrix(problem, dt);

  Vector y = y_start;
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t = s == steps ? t_b : t_a + static_cast<double>(s) * dt;
    const Vector forcing = mesh.sample(problem.f, t) + control.at_time(t);
    BandedSystem<double> system{a, ops.mass_rows(y) + dt * ops.mass_rows(forcing)};
    y = with_boundary(solve_banded(system));
  }
  return y;
}

Matrix simulate_state(const ProblemSpec& problem, const TimeGrid& grid, const Vector& y_init,
                      const SpatialMesh& mesh, const Matrix& control) {
  check_initial(y_init, mesh);
  const auto levels = static_cast<Eigen::Index>(grid.size()) - 1;
  if (control.rows() != levels || control.cols() != static_cast<Eigen::Index>(mesh.n_nodes())) {
    throw InvalidArgument("control matrix must be (N-1) x n_nodes");
  }
  const InteriorOperators ops(mesh);
  Matrix y(levels + 1, y_init.size());
  y.row(0) = y_init.transpose();
  for (Eigen::Index k = 1; k <= levels; ++k) {
    const double dt = grid.step(static_cast<std::size_t>(k - 1));
    const double t = grid[static_cast<std::size_t>(k)];
    const Vector forcing = mesh.sample(problem.f, t) + control.row(k - 1).transpose();
    BandedSystem<double> system{ops.step_matrix(problem, dt),
                                ops.mass_rows(y.row(k - 1).transpose()) + dt * ops.mass_rows(forcing)};
    y.row(k) = with_boundary(solve_banded(system)).transpose();
  }
  return y;
}

double reduced_cost(const ProblemSpec& problem, const TimeGrid& grid, const Vector& y_init,
                    const SpatialMesh& mesh, const Matrix& control) {
  const Matrix y = simulate_state(problem, grid, y_init, mesh, control);
  Matrix u(control.rows() + 1, control.cols());
  u.row(0) = control.row(0);
  u.bottomRows(control.rows()) = control;
  return discrete_cost(problem, SpaceTimeField(grid, mesh, y), SpaceTimeField(grid, mesh, u));
}

Matrix reduced_gradient(const ProblemSpec& problem, const TimeGrid& grid, const Vector& y_init,
                        const SpatialMesh& mesh, const Matrix& control) {
  const Matrix y = simulate_state(problem, grid, y_init, mesh, control);
  const InteriorOperators ops(mesh);
  const auto levels = static_cast<Eigen::Index>(grid.size()) - 1;
  Matrix gradient(levels, control.cols());
  Vector p_next = Vector::Zero(ops.interior);
  for (Eigen::Index k = levels; k >= 1; --k) {
    const double dt = grid.step(static_cast<std::size_t>(k - 1));
    const double t = grid[static_cast<std::size_t>(k)];
    const Vector mismatch = y.row(k).transpose() - mesh.sample(problem.y_d, t);
    BandedSystem<double> system{ops.step_matrix(problem, dt),
                                ops.mass * p_next + dt * ops.mass_rows(mismatch)};
    const Vector p = solve_banded(system);
    const Vector combined = problem.alpha * control.row(k - 1).transpose() + with_boundary(p);
    gradient.row(k - 1) = (dt * (ops.mass_full * combined)).transpose();
    p_next = p;
  }
  return gradient;
}

double discrete_cost(const ProblemSpec& problem, const SpaceTimeField& y, const SpaceTimeField& u) {
  const auto& grid = y.grid();
  const auto& mesh = y.mesh();
  double cost = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double dt = grid.step(k - 1);
    const Vector mismatch = y.row(k) - mesh.sample(problem.y_d, grid[k]);
    cost += dt * (0.5 * l2_norm_squared(mismatch, mesh) + 0.5 * problem.alpha * l2_norm_squared(u.row(k), mesh));
  }
  return cost;
}

void write_csv(std::ostream& out, const OpenLoopSolution& solution) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out.imbue(std::locale::classic());
  out.precision(17);
  out << "t,x,y,u,p\n";
  const auto& mesh = solution.y.mesh();
  for (std::size_t i = 0; i < solution.grid.size(); ++i) {
    for (std::size_t j = 0; j < mesh.n_nodes(); ++j) {
      out << solution.grid[i] << ',' << mesh.node(j) << ',' << solution.y(i, j) << ',' << solution.u(i, j)
          << ',' << solution.p(i, j) << '\n';
    }
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace tampc
