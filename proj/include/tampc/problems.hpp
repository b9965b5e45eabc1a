#pragma once

#include <map>
#include <string>
#include <vector>

#include "tampc/core.hpp"

namespace tampc {

/// Registered problem name plus parameter overrides (epsilon, nu, mu, alpha).
struct ProblemDescriptor {
  std::string name;
  std::map<std::string, double> parameters;
};

/**
 * Heat equation (nu = alpha = 1, mu = 0) whose optimal state
 * y = sin(pi x) atan((t - 1/2) / epsilon) has an interior layer at t = 1/2;
 * the optimal control is u = -sin(pi x) sin(pi t).
 */
[[nodiscard]] ProblemSpec make_test1(double epsilon = 1e-3);

/**
 * Heat equation with depletion term. Optimal pair
 * y = 10 sin(pi x) exp(-((t - 1/2) / epsilon)^2), u = x (x - 1)(t - 1);
 * the source is built from the state equation so that this pair is exact.
 */
[[nodiscard]] ProblemSpec make_test2(double nu = 0.1, double mu = 3.0, double epsilon = 1e-2);

/// All data zero; nu = alpha = 1, mu = 0, t_end = 1.
[[nodiscard]] ProblemSpec make_zero_problem();

/// Builds a registered problem ("test1", "test2", "zero"), applying overrides.
[[nodiscard]] ProblemSpec make_problem(const ProblemDescriptor& descriptor);

[[nodiscard]] std::vector<std::string> registered_problems();

/// Every data function (and exact solution) multiplied by c.
[[nodiscard]] ProblemSpec scaled(const ProblemSpec& problem, double c);

/// Same problem with y0 replaced; used to pose subproblems on a time window.
[[nodiscard]] ProblemSpec with_initial_state(const ProblemSpec& problem, SpaceFunction y0);

}  // namespace tampc
