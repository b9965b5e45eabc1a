#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "tampc/fem1d.hpp"
#include "tampc/problems.hpp"

using namespace tampc;
constexpr double pi = std::numbers::pi;

TEST_CASE("mass matrix entries and measure") {
  const auto m = assemble_mass<double>(SpatialMesh(2));
  CHECK(m(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(m(1, 0) == doctest::Approx(1.0 / 12.0));
  for (std::size_t n : {2u, 5u, 17u}) {
    const SpatialMesh mesh(n);
    const auto mm = assemble_mass<double>(mesh);
    const Vector one = Vector::Ones(static_cast<Eigen::Index>(mesh.n_nodes()));
    CHECK(one.dot(mm * one) == doctest::Approx(1.0).epsilon(1e-14));
    const Vector rows = mm * one;
    for (Eigen::Index j = 1; j + 1 < rows.size(); ++j) CHECK(rows(j) == doctest::Approx(mesh.dx()));
  }
}

TEST_CASE("mass quadratic form of sin(pi x) converges to 1/2") {
  double previous = 1.0;
  for (std::size_t n : {4u, 8u, 16u}) {
    const SpatialMesh mesh(n);
    const Vector v = mesh.sample([](double x) { return std::sin(pi * x); });
    const double error = std::abs(v.dot(assemble_mass<double>(mesh) * v) - 0.5);
    CHECK(error < previous);
    previous = error;
  }
  CHECK(previous < 5e-3);
}

TEST_CASE("stiffness matrix") {
  const auto k = assemble_stiffness<double>(SpatialMesh(2));
  CHECK(k(1, 1) == doctest::Approx(4.0));
  CHECK(k(1, 0) == doctest::Approx(-2.0));
  const SpatialMesh mesh(10);
  const auto kk = assemble_stiffness<double>(mesh);
  const Vector kc = kk * Vector::Constant(11, 3.0);
  CHECK(kc.segment(1, 9).cwiseAbs().maxCoeff() < 1e-12);
  const SpatialMesh fine(100);
  const Vector v = fine.sample([](double x) { return x * (1 - x); });
  // interpolation error is h²/3
  CHECK(v.dot(assemble_stiffness<double>(fine) * v) == doctest::Approx(1.0 / 3.0 - 1e-4 / 3.0).epsilon(1e-10));
}

TEST_CASE("mass and stiffness symmetric, definite on random vectors") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  const SpatialMesh mesh(13);
  const auto m = assemble_mass<double>(mesh);
  const auto k = assemble_stiffness<double>(mesh);
  CHECK(m.is_symmetric());
  CHECK(k.is_symmetric());
  for (int trial = 0; trial < 20; ++trial) {
    Vector v(14);
    for (auto& x : v) x = normal(rng);
    CHECK(v.dot(m * v) > 0.0);
    CHECK(v.dot(k * v) >= -1e-12);
  }
}

TEST_CASE("solve_banded") {
  BandedMatrix<double> id(4, 1, true);
  for (Eigen::Index i = 0; i < 4; ++i) id.set(i, i, 1.0);
  Vector b(4);
  b << 1, -2, 3.5, 0;
  CHECK((solve_banded(BandedSystem<double>{id, b}) - b).norm() == 0.0);

  BandedMatrix<double> two(2, 1, true);
  two.set(0, 0, 2);
  two.set(1, 1, 2);
  two.set(0, 1, 1);
  const Vector x = solve_banded(BandedSystem<double>{two, Vector::Constant(2, 3.0)});
  CHECK(x(0) == doctest::Approx(1.0));
  CHECK(x(1) == doctest::Approx(1.0));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  BandedMatrix<double> a(50, 1, true);
  for (Eigen::Index i = 0; i < 50; ++i) {
    a.set(i, i, 4.0 + u(rng));
    if (i + 1 < 50) a.set(i, i + 1, u(rng));
  }
  Vector rhs(50);
  for (auto& r : rhs) r = u(rng);
  const Vector banded = solve_banded(BandedSystem<double>{a, rhs});
  const Vector dense = a.to_dense().partialPivLu().solve(rhs);
  CHECK((banded - dense).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((a * banded - rhs).lpNorm<Eigen::Infinity>() <= 1e-10 * (1 + rhs.lpNorm<Eigen::Infinity>()));

  BandedMatrix<double> singular(3, 1, true);
  singular.set(0, 0, 1);
  CHECK_THROWS_AS((void)solve_banded(BandedSystem<double>{singular, Vector::Ones(3)}), SingularMatrixError);
}

TEST_CASE("space-time norm") {
  const TimeGrid g = uniform_time_grid(0, 1, 7);
  const SpatialMesh mesh(9);
  const auto one = SpaceTimeField::sample(g, mesh, [](double, double) { return 1.0; });
  CHECK(l2_norm_spacetime(one) == doctest::Approx(1.0).epsilon(1e-14));
  const auto field = SpaceTimeField::sample(g, mesh, [](double t, double x) { return t * std::sin(pi * x); });
  CHECK(l2_norm_spacetime(-3.0 * field) == doctest::Approx(3.0 * l2_norm_spacetime(field)).epsilon(1e-15));

  // Independent check: trapezoid in time of the exact P1 integral per cell (3-point Gauss).
  double oracle = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vector v = field.row(i);
    double q = 0.0;
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
      const double a = v(static_cast<Eigen::Index>(c)), b = v(static_cast<Eigen::Index>(c + 1));
      for (double s : {-std::sqrt(0.6), 0.0, std::sqrt(0.6)}) {
        const double w = s == 0.0 ? 8.0 / 9.0 : 5.0 / 9.0;
        const double val = a + (b - a) * 0.5 * (s + 1);
        q += 0.5 * mesh.dx() * w * val * val;
      }
    }
    const double weight = (i > 0 ? g.step(i - 1) : 0.0) + (i + 1 < g.size() ? g.step(i) : 0.0);
    oracle += 0.5 * weight * q;
  }
  CHECK(l2_norm_spacetime_squared(field) == doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("Test 1 reference norms") {
  const ProblemSpec p = make_test1();
  const auto u = SpaceTimeField::sample(uniform_time_grid(0, 1, 101), SpatialMesh(100), *p.exact_u);
  CHECK(std::abs(l2_norm_spacetime_squared(u) - 0.25) <= 1e-3);
  const TimeGrid g = uniform_time_grid(0, 1, 201);
  const SpatialMesh mesh(200);
  const double track = l2_norm_spacetime_squared(SpaceTimeField::sample(g, mesh, *p.exact_y) -
                                                 SpaceTimeField::sample(g, mesh, p.y_d));
  CHECK(std::abs(track - 26.8197) <= 0.01 * 26.8197);
  // (pi² + pi⁴) / 4 is the continuous value
  CHECK(std::abs(track - (pi * pi + std::pow(pi, 4)) / 4) <= 0.01 * track);
}

TEST_CASE("discrete Laplacian") {
  const SpatialMesh mesh(20);
  const Vector lin = discrete_laplacian(mesh.sample([](double x) { return 3 * x - 1; }), mesh);
  CHECK(lin.segment(1, 19).cwiseAbs().maxCoeff() < 1e-9);
  const Vector constant = discrete_laplacian(Vector::Constant(21, 2.0), mesh);
  CHECK(constant.segment(1, 19).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(constant(0) == 0.0);
  CHECK(constant(20) == 0.0);

  const SpatialMesh fine(100);
  const Vector s = fine.sample([](double x) { return std::sin(pi * x); });
  const Vector ls = discrete_laplacian(s, fine);
  for (Eigen::Index j = 1; j < 100; ++j) CHECK(std::abs(ls(j) / s(j) + pi * pi) <= 1e-3 * pi * pi);

  const SpatialMesh m50(50);
  const Vector q = discrete_laplacian(m50.sample([](double x) { return x * (1 - x); }), m50);
  for (Eigen::Index j = 1; j < 50; ++j) CHECK(std::abs(q(j) + 2.0) <= 0.005 * 2.0);
}
