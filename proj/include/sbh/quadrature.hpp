#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "sbh/point.hpp"

namespace sbh {

/// Adaptive Gauss-Kronrod (15-point) integral of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-13, double* error_estimate = nullptr);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(std::size_t n);

/// Quadrature rule for the normalized surface measure of a sphere (weights
/// sum to 1). In d = 3 the rule is a Gauss-Legendre x trapezoid product
/// whose polar axis is `axis`; in d = 2 the nodes are equispaced starting at
/// the direction of `axis`; in d = 1 the two endpoints carry weight 1/2.
struct SphereRule {
  std::vector<Point> points;
  std::vector<double> weights;
};
SphereRule sphere_rule(const Point& center, double radius, std::size_t n, const Point& axis);

/// Orthonormal frame completing a unit vector e (first column = e).
std::vector<Point> orthonormal_frame(const Point& e);

}  // namespace sbh
