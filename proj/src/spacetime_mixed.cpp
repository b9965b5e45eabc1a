#include "tampc/spacetime_mixed.hpp"

#include <array>
#include <ostream>
#include <sstream>

#include <Eigen/SparseLU>

#include "tampc/fem1d.hpp"
#include "tampc/quadrature.hpp"

namespace tampc {
namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

/// P1 mass and stiffness entries of a 1D (possibly nonuniform) grid, tridiagonal.
struct TimeMatrices {
  std::vector<double> mass_diag, mass_off, stiff_diag, stiff_off;
};

TimeMatrices time_matrices(const TimeGrid& grid) {
  const std::size_t n = grid.size();
  TimeMatrices tm{std::vector<double>(n, 0.0), std::vector<double>(n - 1, 0.0),
                  std::vector<double>(n, 0.0), std::vector<double>(n - 1, 0.0)};
  for (std::size_t e = 0; e + 1 < n; ++e) {
    const double h = grid.step(e);
    tm.mass_diag[e] += h / 3.0;
    tm.mass_diag[e + 1] += h / 3.0;
    tm.mass_off[e] = h / 6.0;
    tm.stiff_diag[e] += 1.0 / h;
    tm.stiff_diag[e + 1] += 1.0 / h;
    tm.stiff_off[e] = -1.0 / h;
  }
  return tm;
}

/// Space integrals ∫ g(t, x) ψ_j dx for every P1 hat function, 3-point Gauss per cell.
class SpatialLoad {
public:
  explicit SpatialLoad(const SpatialMesh& mesh) : mesh_(mesh) {
    const auto rule = gauss_legendre(3);
    const double h = mesh.dx();
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double s = 0.5 * (1.0 + rule.nodes[q]);
        points_.push_back({c, mesh.node(c) + s * h, 0.5 * h * rule.weights[q], s});
      }
    }
  }

  template <typename F>
  void accumulate(const F& g, double t, double scale, Eigen::Ref<Vector> out) const {
    for (const auto& p : points_) {
      const double v = scale * p.weight * g(t, p.x);
      out(static_cast<Eigen::Index>(p.cell)) += (1.0 - p.s) * v;
      out(static_cast<Eigen::Index>(p.cell + 1)) += p.s * v;
    }
  }

private:
  struct Point {
    std::size_t cell;
    double x;
    double weight;
    double s;
  };
  SpatialMesh mesh_;
  std::vector<Point> points_;
};

}  // namespace

bool MixedSystem::is_constrained_row(Eigen::Index row) const {
  const auto nodes = static_cast<Eigen::Index>(mesh.n_nodes());
  const Eigen::Index level = row / (2 * nodes);
  const Eigen::Index within = row % (2 * nodes);
  const bool is_y = within < nodes;
  const Eigen::Index node = is_y ? within : within - nodes;
  const bool lateral = node == 0 || node == nodes - 1;
  return lateral || (is_y && level == 0);
}

const Vector* LoadCache::find(double t_a, double t_b) const {
  const auto it = entries_.find({t_a, t_b});
  return it == entries_.end() ? nullptr : &it->second;
}

void LoadCache::store(double t_a, double t_b, Vector contribution) {
  entries_.insert_or_assign({t_a, t_b}, std::move(contribution));
}

MixedSystem assemble_mixed(const ProblemSpec& problem, const TimeGrid& grid, const SpatialMesh& mesh,
                           LoadCache* cache) {
  problem.validate();
  if (cache && !(cache->mesh() == mesh)) throw InvalidArgument("load cache belongs to a different mesh");
  MixedSystem sys{grid, mesh, {}, {}, {}, {}};
  const std::size_t levels = grid.size();
  const std::size_t nodes = mesh.n_nodes();
  const Eigen::Index dim = sys.dimension();

  const double nu = problem.nu;
  const double mu = problem.mu;
  const double reaction = 1.0 / problem.alpha + mu * mu;
  const auto tm = time_matrices(grid);
  const auto mx = assemble_mass(mesh);
  const auto kx = assemble_stiffness(mesh);

  Triplets entries;
  entries.reserve(static_cast<std::size_t>(dim) * 3 * 3 * 2);
  auto couple = [&](std::size_t a, std::size_t b, double t_mass, double t_stiff) {
    for (std::size_t j = 0; j < nodes; ++j) {
      const std::size_t k_lo = j == 0 ? 0 : j - 1;
      const std::size_t k_hi = std::min(nodes - 1, j + 1);
      for (std::size_t k = k_lo; k <= k_hi; ++k) {
        const auto je = static_cast<Eigen::Index>(j);
        const auto ke = static_cast<Eigen::Index>(k);
        const double m = mx(je, ke);
        const double s = kx(je, ke);
        double yy = t_stiff * m + reaction * t_mass * m - 2.0 * nu * mu * t_mass * s;
        if (a == b && a == levels - 1) yy += nu * s - mu * m;
        entries.emplace_back(sys.y_index(a, j), sys.y_index(b, k), yy);
        entries.emplace_back(sys.y_index(a, j), sys.w_index(b, k), nu * t_mass * s);
        entries.emplace_back(sys.w_index(a, j), sys.y_index(b, k), -nu * t_mass * s);
        entries.emplace_back(sys.w_index(a, j), sys.w_index(b, k), t_mass * m);
      }
    }
  };
  for (std::size_t a = 0; a < levels; ++a) {
    couple(a, a, tm.mass_diag[a], tm.stiff_diag[a]);
    if (a + 1 < levels) {
      couple(a, a + 1, tm.mass_off[a], tm.stiff_off[a]);
      couple(a + 1, a, tm.mass_off[a], tm.stiff_off[a]);
    }
  }
  sys.bilinear.resize(dim, dim);
  sys.bilinear.setFromTriplets(entries.begin(), entries.end());

  // Linear form. The -f_t part of the desired-state term is integrated by parts
  // in time; its end-time boundary term cancels the natural end condition's f(T).
  // What remains is ∫∫ (y_d/alpha - mu f - nu f_xx) v + f v_t.
  sys.load = Vector::Zero(dim);
  const SpatialLoad spatial(mesh);
  auto smooth_part = [&problem](double t, double x) {
    return problem.y_d(t, x) / problem.alpha - problem.mu * problem.f(t, x) -
           problem.nu * problem.f_xx(t, x);
  };
  const auto n = static_cast<Eigen::Index>(nodes);
  for (std::size_t e = 0; e + 1 < levels; ++e) {
    const double ta = grid[e];
    const double tb = grid[e + 1];
    const double h = tb - ta;
    auto integrand = [&](double t) {
      Vector v = Vector::Zero(2 * n);
      spatial.accumulate(smooth_part, t, (tb - t) / h, v.head(n));
      spatial.accumulate(smooth_part, t, (t - ta) / h, v.tail(n));
      spatial.accumulate(problem.f, t, -1.0 / h, v.head(n));
      spatial.accumulate(problem.f, t, 1.0 / h, v.tail(n));
      return v;
    };
    const Vector* cached = cache ? cache->find(ta, tb) : nullptr;
    const Vector contribution = cached ? *cached : integrate_adaptive(integrand, ta, tb, 1e-7, 1e-14);
    if (cache && !cached) cache->store(ta, tb, contribution);
    sys.load.segment(sys.y_index(e, 0), n) += contribution.head(n);
    sys.load.segment(sys.y_index(e + 1, 0), n) += contribution.tail(n);
  }

  // Strong constraints: initial state, lateral y = 0, lateral w = f.
  Triplets constrained;
  constrained.reserve(entries.size());
  for (const auto& entry : entries) {
    if (!sys.is_constrained_row(entry.row())) constrained.push_back(entry);
  }
  sys.rhs = sys.load;
  const Vector initial = mesh.sample(problem.y0);
  for (std::size_t i = 0; i < levels; ++i) {
    for (std::size_t j = 0; j < nodes; ++j) {
      const Eigen::Index ry = sys.y_index(i, j);
      const Eigen::Index rw = sys.w_index(i, j);
      const bool lateral = j == 0 || j + 1 == nodes;
      if (lateral) {
        constrained.emplace_back(ry, ry, 1.0);
        sys.rhs(ry) = 0.0;
        constrained.emplace_back(rw, rw, 1.0);
        sys.rhs(rw) = problem.f(grid[i], mesh.node(j));
      } else if (i == 0) {
        constrained.emplace_back(ry, ry, 1.0);
        sys.rhs(ry) = initial(static_cast<Eigen::Index>(j));
      }
    }
  }
  sys.matrix.resize(dim, dim);
  sys.matrix.setFromTriplets(constrained.begin(), constrained.end());
  return sys;
}

MixedSolution::MixedSolution(ProblemSpec problem, SpaceTimeField y, SpaceTimeField w)
    : problem_(std::move(problem)), y_(std::move(y)), w_(std::move(w)) {
  if (!(y_.grid() == w_.grid()) || !(y_.mesh() == w_.mesh())) {
    throw InvalidArgument("mixed solution fields must share grid and mesh");
  }
}

Vector to_unknowns(const MixedSystem& system, const MixedSolution& solution) {
  Vector x(system.dimension());
  const auto n = static_cast<Eigen::Index>(system.mesh.n_nodes());
  for (std::size_t i = 0; i < system.grid.size(); ++i) {
    x.segment(system.y_index(i, 0), n) = solution.y().row(i);
    x.segment(system.w_index(i, 0), n) = solution.w().row(i);
  }
  return x;
}

MixedSolution solve_mixed(const ProblemSpec& problem, const TimeGrid& grid, const SpatialMesh& mesh,
                          LoadCache* cache) {
  const MixedSystem sys = assemble_mixed(problem, grid, mesh, cache);

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(sys.matrix);
  if (lu.info() != Eigen::Success) {
    throw SingularMatrixError("space-time mixed system is singular: " + lu.lastErrorMessage());
  }
  Vector x = lu.solve(sys.rhs);
  const double tolerance = 1e-9 * (1.0 + sys.rhs.lpNorm<Eigen::Infinity>());
  Vector residual = sys.rhs - sys.matrix * x;
  if (residual.lpNorm<Eigen::Infinity>() > tolerance) {
    x += lu.solve(residual);
    residual = sys.rhs - sys.matrix * x;
  }
  if (!x.allFinite() || residual.lpNorm<Eigen::Infinity>() > tolerance) {
    std::ostringstream msg;
    msg << "space-time mixed solve did not reach residual tolerance (" << residual.lpNorm<Eigen::Infinity>()
        << " > " << tolerance << ")";
    throw SingularMatrixError(msg.str());
  }

  const auto levels = static_cast<Eigen::Index>(grid.size());
  const auto n = static_cast<Eigen::Index>(mesh.n_nodes());
  Matrix y(levels, n), w(levels, n);
  for (Eigen::Index i = 0; i < levels; ++i) {
    y.row(i) = x.segment(sys.y_index(static_cast<std::size_t>(i), 0), n).transpose();
    w.row(i) = x.segment(sys.w_index(static_cast<std::size_t>(i), 0), n).transpose();
  }
  return MixedSolution(problem, SpaceTimeField(grid, mesh, std::move(y)),
                       SpaceTimeField(grid, mesh, std::move(w)));
}

void write_csv(std::ostream& out, const MixedSolution& solution) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out.imbue(std::locale::classic());
  out.precision(17);
  out << "t,x,y,w\n";
  const auto& grid = solution.grid();
  const auto& mesh = solution.mesh();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < mesh.n_nodes(); ++j) {
      out << grid[i] << ',' << mesh.node(j) << ',' << solution.y()(i, j) << ','
          << solution.w()(i, j) << '\n';
    }
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace tampc
