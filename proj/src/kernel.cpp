#include "sbh/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sbh {

ExtReal kernel_k(Dimension d, double t) {
  if (!(t >= 0.0)) throw std::domain_error("kernel_k: argument must be nonnegative");
  const int dd = d.value();
  if (dd == 1) return ExtReal(t);
  if (t == 0.0) return ExtReal::neg_inf();
  if (dd == 2) return ExtReal(std::log(t));
  if (std::isinf(t)) return ExtReal(0.0);
  return ExtReal(-std::pow(t, -(dd - 2)));
}

double kernel_increment(Dimension d, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("kernel_increment: arguments must be positive");
  switch (d.value()) {
    case 1:
      return b - a;
    case 2:
      return std::log(b / a);
    case 3:
      return (b - a) / (a * b);
    default:
      return std::pow(a, 2 - d.value()) - std::pow(b, 2 - d.value());
  }
}

double sphere_area(Dimension d) {
  // s_{d-1} = 2 pi / (d - 2) * s_{d-3}, seeded with s_0 = 2 and s_1 = 2 pi.
  int k = d.value();
  double s = (k % 2 == 1) ? 2.0 : 2.0 * std::numbers::pi;
  for (int m = (k % 2 == 1) ? 3 : 4; m <= k; m += 2) s *= 2.0 * std::numbers::pi / (m - 2);
  return s;
}

int dhat(Dimension d) { return d.value() > 3 ? d.value() - 2 : 1; }

ExtReal fundamental_solution(const Point& x, const Point& y) {
  require_same_dim(x, y, "fundamental_solution");
  const Dimension d = x.dimension();
  const ExtReal k = kernel_k(d, distance(x, y));
  return k / ExtReal(sphere_area(d) * dhat(d));
}

ExtReal sphere_mean_kernel(const Point& c, double r, const Point& p) {
  require_same_dim(c, p, "sphere_mean_kernel");
  return kernel_k(c.dimension(), std::max(r, distance(c, p)));
}

}  // namespace sbh
