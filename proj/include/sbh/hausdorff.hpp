#pragma once

#include <string>
#include <vector>

#include "sbh/ext_real.hpp"
#include "sbh/point.hpp"

namespace sbh {

inline constexpr double kCoverRadiusFloor = 1e-12;

/// pi^(p/2) / Gamma(p/2 + 1).
double power_gauge_constant(double p);

/// Nondecreasing gauge h >= 0 with h(0) = 0: either B * c_p * t^p or a
/// piecewise-linear table (constant after the last node).
class Gauge {
 public:
  static Gauge power(double p, double B = 1.0);
  static Gauge tabulated(std::vector<double> t, std::vector<double> h);

  double operator()(double t) const;

  bool is_power() const { return power_; }
  double exponent() const { return p_; }
  double factor() const { return B_; }
  const std::vector<double>& nodes() const { return t_; }
  const std::vector<double>& values() const { return h_; }
  std::string describe() const;

 private:
  bool power_ = true;
  double p_ = 0.0;
  double B_ = 1.0;
  std::vector<double> t_;
  std::vector<double> h_;
};

/// dhat * integral_0^r h(s) s^(1-d) ds. Closed form for power gauges
/// (+inf when p <= d - 2); tanh-sinh quadrature for tables.
ExtReal n0h_integral(const Gauge& h, double r, Dimension d);

/// The same integral by quadrature only (for cross-checks).
ExtReal n0h_quadrature(const Gauge& h, double r, Dimension d);

struct CoverBall {
  Point center;
  double radius;
};

struct CoverEstimate {
  std::vector<CoverBall> balls;
  double total_gauge = 0.0;
  int multiplicity = 0;
  int level = 0;  // dyadic level of a cube cover (side 2^level)
};

/// Cover of S by closed balls built from the dyadic cubes of side 2^level:
/// one ball per occupied cube, centered at the cube center, radius the largest
/// distance to its points plus `resolution` (floored at kCoverRadiusFloor).
CoverEstimate cube_cover(const std::vector<Point>& S, const Gauge& h, int level, double resolution = 0.0);

/// Upper bound for the h-content of radius r of S: the smallest cube-cover
/// sum over the dyadic levels whose balls all have radius <= r. `resolution`
/// treats every point as a closed ball of that radius.
CoverEstimate content_upper_bound(const std::vector<Point>& S, const Gauge& h, double r, double resolution = 0.0);

/// Besicovitch-type subcover: repeatedly take the uncovered point with the
/// largest radius (ties: lexicographically smallest point) and add its closed
/// ball. total_gauge is left 0 (see cover_gauge_sum). Multiplicity is computed
/// exactly; exceeding 5^d throws std::logic_error.
CoverEstimate besicovitch_cover(const std::vector<Point>& points, const std::vector<double>& radii);

double cover_gauge_sum(const CoverEstimate& cover, const Gauge& h);

/// Largest number of the closed balls sharing a point, evaluated at the
/// vertices of the arrangement (interval endpoints; circle intersections and
/// centers; triple points, pair-circle centers and centers), plus `extra`.
int overlap_multiplicity(const std::vector<CoverBall>& balls, const std::vector<Point>& extra = {});

}  // namespace sbh
