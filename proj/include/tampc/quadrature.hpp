#pragma once

#include <functional>
#include <span>

#include "tampc/core.hpp"

namespace tampc {

struct QuadratureRule {
  std::span<const double> nodes;    // on [-1, 1]
  std::span<const double> weights;  // sum to 2
};

/// Gauss-Legendre rule with 1 to 5 points.
[[nodiscard]] QuadratureRule gauss_legendre(int points);

/**
 * Integrates a vector-valued function over [a, b] by recursive bisection of a
 * 3-point Gauss rule, accepting a panel once it agrees with the sum of its two
 * halves to `rel_tol` (relative to the running magnitude) or `abs_tol`. The
 * first `min_depth` levels are always split so narrow peaks are not skipped.
 */
[[nodiscard]] Vector integrate_adaptive(const std::function<Vector(double)>& integrand, double a,
                                        double b, double rel_tol = 1e-10, double abs_tol = 1e-13,
                                        int max_depth = 40, int min_depth = 2);

}  // namespace tampc
