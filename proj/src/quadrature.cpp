#include "tampc/quadrature.hpp"

#include <array>
#include <cmath>

namespace tampc {
namespace {

constexpr std::array<double, 1> kNodes1{0.0};
constexpr std::array<double, 1> kWeights1{2.0};
constexpr std::array<double, 2> kNodes2{-0.57735026918962576451, 0.57735026918962576451};
constexpr std::array<double, 2> kWeights2{1.0, 1.0};
constexpr std::array<double, 3> kNodes3{-0.77459666924148337704, 0.0, 0.77459666924148337704};
constexpr std::array<double, 3> kWeights3{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
constexpr std::array<double, 4> kNodes4{-0.86113631159405257522, -0.33998104358485626480,
                                        0.33998104358485626480, 0.86113631159405257522};
constexpr std::array<double, 4> kWeights4{0.34785484513745385737, 0.65214515486254614263,
                                          0.65214515486254614263, 0.34785484513745385737};
constexpr std::array<double, 5> kNodes5{-0.90617984593866399280, -0.53846931010568309104, 0.0,
                                        0.53846931010568309104, 0.90617984593866399280};
constexpr std::array<double, 5> kWeights5{0.23692688505618908751, 0.47862867049936646804,
                                          0.56888888888888888889, 0.47862867049936646804,
                                          0.23692688505618908751};

Vector gauss3(const std::function<Vector(double)>& g, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Vector sum = kWeights3[0] * g(mid + half * kNodes3[0]);
  sum += kWeights3[1] * g(mid);
  sum += kWeights3[2] * g(mid + half * kNodes3[2]);
  return half * sum;
}

Vector refine(const std::function<Vector(double)>& g, double a, double b, const Vector& whole,
              double rel_tol, double abs_tol, double scale, int depth, int forced) {
  const double mid = 0.5 * (a + b);
  Vector left = gauss3(g, a, mid);
  Vector right = gauss3(g, mid, b);
  Vector halves = left + right;
  const double diff = (halves - whole).lpNorm<Eigen::Infinity>();
  const double magnitude = std::max(scale, halves.lpNorm<Eigen::Infinity>());
  if (depth <= 0 || (forced <= 0 && diff <= std::max(abs_tol, rel_tol * magnitude))) {
    return halves;
  }
  return refine(g, a, mid, left, rel_tol, abs_tol, magnitude, depth - 1, forced - 1) +
         refine(g, mid, b, right, rel_tol, abs_tol, magnitude, depth - 1, forced - 1);
}

}  // namespace

QuadratureRule gauss_legendre(int points) {
  switch (points) {
    case 1: return {kNodes1, kWeights1};
    case 2: return {kNodes2, kWeights2};
    case 3: return {kNodes3, kWeights3};
    case 4: return {kNodes4, kWeights4};
    case 5: return {kNodes5, kWeights5};
    default: throw InvalidArgument("Gauss-Legendre rules are tabulated for 1..5 points");
  }
}

Vector integrate_adaptive(const std::function<Vector(double)>& integrand, double a, double b,
                          double rel_tol, double abs_tol, int max_depth, int min_depth) {
  Vector whole = gauss3(integrand, a, b);
  return refine(integrand, a, b, whole, rel_tol, abs_tol, whole.lpNorm<Eigen::Infinity>(),
                max_depth, min_depth);
}

}  // namespace tampc
