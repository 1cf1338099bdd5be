#pragma once

#include "sbh/ext_real.hpp"
#include "sbh/point.hpp"

namespace sbh {

/// The increasing kernel of potential theory in R^d:
///   t        for d = 1,
///   ln t     for d = 2,
///   -t^(2-d) for d > 2,
/// with the value at t = 0 taken as the limit (0 for d = 1, -inf otherwise).
/// Throws std::domain_error for t < 0.
ExtReal kernel_k(Dimension d, double t);

/// kernel_k(d, b) - kernel_k(d, a) for 0 < a, b, computed without cancellation
/// where a closed form allows it.
double kernel_increment(Dimension d, double a, double b);

/// Surface area of the unit sphere in R^d: 2 pi^(d/2) / Gamma(d/2).
double sphere_area(Dimension d);

/// max{1, d - 2}.
int dhat(Dimension d);

/// Fundamental solution of the Laplace equation with pole x, evaluated at y:
/// kernel_k(|y - x|) / (sphere_area * dhat).
ExtReal fundamental_solution(const Point& x, const Point& y);

/// Mean of kernel_k(|z - p|) over the sphere |z - c| = r (normalized surface
/// measure; the two endpoints for d = 1): kernel_k(max(r, |p - c|)).
ExtReal sphere_mean_kernel(const Point& c, double r, const Point& p);

}  // namespace sbh
