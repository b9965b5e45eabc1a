#include "tampc/problems.hpp"

#include <cmath>
#include <numbers>

namespace tampc {
namespace {

using std::numbers::pi;

double parameter(const ProblemDescriptor& d, const std::string& key, double fallback) {
  const auto it = d.parameters.find(key);
  return it == d.parameters.end() ? fallback : it->second;
}

void check_known_keys(const ProblemDescriptor& d, std::initializer_list<const char*> known) {
  for (const auto& [key, value] : d.parameters) {
    bool found = false;
    for (const char* k : known) found = found || key == k;
    if (!found) throw InvalidArgument("problem '" + d.name + "' has no parameter '" + key + "'");
  }
}

}  // namespace

ProblemSpec make_test1(double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("test1: epsilon must be positive");
  const double eps = epsilon;
  ProblemSpec p;
  p.name = "test1";
  p.nu = 1.0;
  p.mu = 0.0;
  p.alpha = 1.0;
  p.t_end = 1.0;

  // Temporal factors of the separable data sin(pi x) * g(t).
  auto source = [eps](double t) {
    const double s = t - 0.5;
    return eps / (t * t - t + eps * eps + 0.25) + pi * pi * std::atan(s / eps) + std::sin(pi * t);
  };
  auto source_dt = [eps](double t) {
    const double s = t - 0.5;
    const double q = s * s + eps * eps;
    return -2.0 * eps * s / (q * q) + pi * pi * eps / q + pi * std::cos(pi * t);
  };

  p.f = [source](double t, double x) { return std::sin(pi * x) * source(t); };
  p.f_t = [source_dt](double t, double x) { return std::sin(pi * x) * source_dt(t); };
  p.f_xx = [source](double t, double x) { return -pi * pi * std::sin(pi * x) * source(t); };
  p.y_d = [eps](double t, double x) {
    return std::sin(pi * x) *
           (std::atan((t - 0.5) / eps) + pi * std::cos(pi * t) - pi * pi * std::sin(pi * t));
  };
  p.y0 = [eps](double x) { return std::sin(pi * x) * std::atan(-1.0 / (2.0 * eps)); };
  p.exact_y = [eps](double t, double x) { return std::sin(pi * x) * std::atan((t - 0.5) / eps); };
  p.exact_u = [](double t, double x) { return -std::sin(pi * x) * std::sin(pi * t); };
  return p;
}

ProblemSpec make_test2(double nu, double mu, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("test2: epsilon must be positive");
  if (!(nu > 0.0)) throw InvalidArgument("test2: nu must be positive");
  if (!(mu >= 0.0)) throw InvalidArgument("test2: mu must be non-negative");
  const double eps = epsilon;
  ProblemSpec p;
  p.name = "test2";
  p.nu = nu;
  p.mu = mu;
  p.alpha = 1.0;
  p.t_end = 1.0;

  auto state = [eps](double t, double x) {
    const double s = (t - 0.5) / eps;
    return 10.0 * std::sin(pi * x) * std::exp(-s * s);
  };
  // y_t - nu y_xx - mu y = y * rate(t) because y_xx = -pi^2 y.
  auto rate = [eps, nu, mu](double t) {
    const double s = (t - 0.5) / eps;
    return -2.0 * s / eps + nu * pi * pi - mu;
  };
  auto bubble = [](double x) { return x * (x - 1.0); };

  p.f = [=](double t, double x) { return state(t, x) * rate(t) - bubble(x) * (t - 1.0); };
  p.f_t = [=](double t, double x) {
    const double s = (t - 0.5) / eps;
    const double r = rate(t);
    return state(t, x) * (-2.0 * s / eps * r - 2.0 / (eps * eps)) - bubble(x);
  };
  p.f_xx = [=](double t, double x) { return -pi * pi * state(t, x) * rate(t) - 2.0 * (t - 1.0); };
  p.y_d = [=](double t, double x) {
    return state(t, x) - bubble(x) - 2.0 * nu * (t - 1.0) - mu * bubble(x) * (t - 1.0);
  };
  p.y0 = [eps](double x) { return 10.0 * std::sin(pi * x) * std::exp(-1.0 / (4.0 * eps * eps)); };
  p.exact_y = state;
  p.exact_u = [bubble](double t, double x) { return bubble(x) * (t - 1.0); };
  return p;
}

ProblemSpec make_zero_problem() {
  ProblemSpec p;
  p.name = "zero";
  auto zero = [](double, double) { return 0.0; };
  p.f = zero;
  p.f_t = zero;
  p.f_xx = zero;
  p.y_d = zero;
  p.y0 = [](double) { return 0.0; };
  p.exact_y = zero;
  p.exact_u = zero;
  return p;
}

ProblemSpec make_problem(const ProblemDescriptor& d) {
  ProblemSpec p;
  if (d.name == "test1") {
    check_known_keys(d, {"epsilon", "alpha", "t_end"});
    p = make_test1(parameter(d, "epsilon", 1e-3));
  } else if (d.name == "test2") {
    check_known_keys(d, {"epsilon", "nu", "mu", "alpha", "t_end"});
    p = make_test2(parameter(d, "nu", 0.1), parameter(d, "mu", 3.0), parameter(d, "epsilon", 1e-2));
  } else if (d.name == "zero") {
    check_known_keys(d, {"nu", "mu", "alpha", "t_end"});
    p = make_zero_problem();
    p.nu = parameter(d, "nu", p.nu);
    p.mu = parameter(d, "mu", p.mu);
  } else {
    throw InvalidArgument("unknown problem '" + d.name + "'");
  }
  // alpha and t_end overrides change the problem; exact solutions are only
  // valid for the published values.
  const double alpha = parameter(d, "alpha", p.alpha);
  const double t_end = parameter(d, "t_end", p.t_end);
  if (alpha != p.alpha && d.name != "zero") {
    p.exact_y.reset();
    p.exact_u.reset();
  }
  p.alpha = alpha;
  p.t_end = t_end;
  p.validate();
  return p;
}

std::vector<std::string> registered_problems() { return {"test1", "test2", "zero"}; }

ProblemSpec scaled(const ProblemSpec& problem, double c) {
  ProblemSpec p = problem;
  auto scale = [c](SpaceTimeFunction g) {
    return SpaceTimeFunction([c, g = std::move(g)](double t, double x) { return c * g(t, x); });
  };
  p.f = scale(problem.f);
  p.f_t = scale(problem.f_t);
  p.f_xx = scale(problem.f_xx);
  p.y_d = scale(problem.y_d);
  p.y0 = [c, g = problem.y0](double x) { return c * g(x); };
  if (problem.exact_y) p.exact_y = scale(*problem.exact_y);
  if (problem.exact_u) p.exact_u = scale(*problem.exact_u);
  return p;
}

ProblemSpec with_initial_state(const ProblemSpec& problem, SpaceFunction y0) {
  ProblemSpec p = problem;
  p.y0 = std::move(y0);
  return p;
}

}  // namespace tampc
