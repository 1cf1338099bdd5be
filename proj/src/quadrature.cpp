#include "sbh/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sbh {

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 double* error_estimate) {
  if (a == b) {
    if (error_estimate) *error_estimate = 0.0;
    return 0.0;
  }
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 12, rel_tol, &err);
  if (error_estimate) *error_estimate = err;
  return v;
}

GaussLegendre gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      // p0 = P_n(z), p1 = P_{n-1}(z)
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    gl.nodes[i] = -z;
    gl.nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  return gl;
}

std::vector<Point> orthonormal_frame(const Point& e) {
  const int d = e.dim();
  std::vector<Point> frame{e};
  for (int k = 0; k < d && static_cast<int>(frame.size()) < d; ++k) {
    Point v = Point::axis(Dimension(d), k);
    for (const Point& f : frame) v -= f * dot(v, f);
    const double n = v.norm();
    if (n > 1e-8) frame.push_back(v * (1.0 / n));
  }
  return frame;
}

SphereRule sphere_rule(const Point& center, double radius, std::size_t n, const Point& axis) {
  const int d = center.dim();
  SphereRule rule;
  if (d == 1) {
    rule.points = {center - Point{radius}, center + Point{radius}};
    rule.weights = {0.5, 0.5};
    return rule;
  }
  const double an = axis.norm();
  const Point e = an > 0.0 ? axis * (1.0 / an) : Point::axis(center.dimension(), 0);
  const std::vector<Point> frame = orthonormal_frame(e);
  if (d == 2) {
    if (n < 3) n = 3;
    rule.points.reserve(n);
    rule.weights.assign(n, 1.0 / static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      rule.points.push_back(center + (frame[0] * std::cos(a) + frame[1] * std::sin(a)) * radius);
    }
    return rule;
  }
  if (d == 3) {
    const std::size_t n_theta = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(std::sqrt(n / 2.0))));
    const std::size_t n_phi = 2 * n_theta;
    const GaussLegendre gl = gauss_legendre(n_theta);
    rule.points.reserve(n_theta * n_phi);
    rule.weights.reserve(n_theta * n_phi);
    for (std::size_t i = 0; i < n_theta; ++i) {
      const double c = gl.nodes[i];
      const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (std::size_t j = 0; j < n_phi; ++j) {
        const double a = 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(n_phi);
        rule.points.push_back(center + (frame[0] * c + frame[1] * (s * std::cos(a)) + frame[2] * (s * std::sin(a))) * radius);
        rule.weights.push_back(0.5 * gl.weights[i] / static_cast<double>(n_phi));
      }
    }
    return rule;
  }
  throw std::invalid_argument("sphere_rule: supported for d <= 3");
}

}  // namespace sbh
