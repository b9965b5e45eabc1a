#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tampc/fem1d.hpp"
#include "tampc/problems.hpp"

using namespace tampc;
constexpr double pi = std::numbers::pi;

namespace {

double d_t(const SpaceTimeFunction& g, double t, double x, double h) { return (g(t + h, x) - g(t - h, x)) / (2 * h); }
double d_xx(const SpaceTimeFunction& g, double t, double x, double h) {
  return (g(t, x + h) - 2 * g(t, x) + g(t, x - h)) / (h * h);
}

/// Largest |y_t - nu y_xx - mu y - f - u| over a 20 x 20 lattice, derivatives by finite differences.
double state_residual(const ProblemSpec& p) {
  double worst = 0.0;
  for (int i = 1; i <= 20; ++i) {
    for (int j = 1; j < 20; ++j) {
      const double t = i / 20.0 - 0.013, x = j / 20.0;
      const double r = d_t(*p.exact_y, t, x, 1e-6) - p.nu * d_xx(*p.exact_y, t, x, 1e-4) - p.mu * (*p.exact_y)(t, x) -
                       p.f(t, x) - (*p.exact_u)(t, x);
      worst = std::max(worst, std::abs(r) / (1.0 + std::abs(p.f(t, x))));
    }
  }
  return worst;
}

/// Largest |-p_t - nu p_xx - mu p - (y - y_d)| with p = -alpha u.
double adjoint_residual(const ProblemSpec& p) {
  const SpaceTimeFunction adj = [&](double t, double x) { return -p.alpha * (*p.exact_u)(t, x); };
  double worst = 0.0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 1; j < 20; ++j) {
      const double t = i / 20.0 + 0.007, x = j / 20.0;
      const double r = -d_t(adj, t, x, 1e-5) - p.nu * d_xx(adj, t, x, 1e-4) - p.mu * adj(t, x) -
                       ((*p.exact_y)(t, x) - p.y_d(t, x));
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

double derivative_mismatch(const ProblemSpec& p) {
  double worst = 0.0;
  for (int i = 1; i < 20; ++i) {
    for (int j = 1; j < 20; ++j) {
      const double t = i / 20.0 + 0.003, x = j / 20.0;
      const double scale = 1.0 + std::abs(p.f_t(t, x)) + std::abs(p.f_xx(t, x));
      worst = std::max(worst, std::abs(d_t(p.f, t, x, 1e-6) - p.f_t(t, x)) / scale);
      worst = std::max(worst, std::abs(d_xx(p.f, t, x, 1e-4) - p.f_xx(t, x)) / scale);
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("Test 1 closed forms") {
  const ProblemSpec p = make_test1();
  CHECK(p.nu == 1.0);
  CHECK(p.alpha == 1.0);
  CHECK(p.mu == 0.0);
  CHECK((*p.exact_u)(0.5, 0.5) == doctest::Approx(-1.0));
  CHECK(p.y0(0.5) == doctest::Approx(-1.56880).epsilon(1e-5));
  const auto u = SpaceTimeField::sample(uniform_time_grid(0, 1, 201), SpatialMesh(200), *p.exact_u);
  CHECK(l2_norm_spacetime_squared(u) == doctest::Approx(0.25).epsilon(1e-3));
  CHECK_THROWS_AS((void)make_test1(0.0), InvalidArgument);
}

TEST_CASE("Test 1 data are consistent with the optimality system") {
  const ProblemSpec p = make_test1(0.05);  // wider layer keeps finite differences accurate
  CHECK(state_residual(p) < 1e-5);
  CHECK(adjoint_residual(p) < 1e-5);
  CHECK(derivative_mismatch(p) < 1e-6);
  const ProblemSpec sharp = make_test1();
  for (double t : {0.1, 0.4999, 0.5, 0.7}) {
    for (double x : {0.2, 0.5}) {
      const double y_t = std::sin(pi * x) * 1e-3 / (1e-6 + (t - 0.5) * (t - 0.5));
      const double r = y_t + pi * pi * (*sharp.exact_y)(t, x) - sharp.f(t, x) - (*sharp.exact_u)(t, x);
      CHECK(std::abs(r) <= 1e-10 * (1 + std::abs(y_t)));
    }
  }
}

TEST_CASE("Test 2 closed forms and consistency") {
  const ProblemSpec p = make_test2();
  CHECK((*p.exact_u)(0.5, 1.0) == 0.0);
  CHECK_FALSE(p.estimator_condition_ok());
  const auto u = SpaceTimeField::sample(uniform_time_grid(0, 1, 201), SpatialMesh(200), *p.exact_u);
  CHECK(l2_norm_spacetime_squared(u) == doctest::Approx(1.0 / 90.0).epsilon(1e-3));
  const ProblemSpec smooth = make_test2(0.1, 3.0, 0.2);
  CHECK(state_residual(smooth) < 1e-5);
  CHECK(adjoint_residual(smooth) < 1e-5);
  CHECK(derivative_mismatch(smooth) < 1e-6);
  CHECK(derivative_mismatch(p) < 1e-5);
  CHECK_THROWS_AS((void)make_test2(0.0), InvalidArgument);
  CHECK_THROWS_AS((void)make_test2(0.1, -1.0), InvalidArgument);
}

TEST_CASE("zero problem and registry") {
  const ProblemSpec z = make_zero_problem();
  CHECK(z.f(0.3, 0.4) == 0.0);
  CHECK(z.y_d(0.3, 0.4) == 0.0);
  CHECK((*z.exact_u)(0.3, 0.4) == 0.0);
  CHECK(make_problem({"test2", {{"mu", 0.5}}}).mu == 0.5);
  CHECK(make_problem({"test1", {{"t_end", 2.0}}}).t_end == 2.0);
  CHECK_THROWS_AS((void)make_problem({"test1", {{"nu", 2.0}}}), InvalidArgument);
  CHECK_THROWS_AS((void)make_problem({"heat", {}}), InvalidArgument);
  CHECK(registered_problems().size() == 3);
  const ProblemSpec s = scaled(make_test1(), 2.0);
  CHECK(s.f(0.3, 0.4) == doctest::Approx(2.0 * make_test1().f(0.3, 0.4)));
}
