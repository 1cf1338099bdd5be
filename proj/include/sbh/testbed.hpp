#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sbh/domains.hpp"
#include "sbh/ext_real.hpp"
#include "sbh/point.hpp"
#include "sbh/riesz.hpp"

namespace sbh {

enum class FunctionKind { log_poly_abs, newton_potential, convex_pl, harmonic };

std::string to_string(FunctionKind k);
FunctionKind function_kind_from_string(const std::string& s);

/// Harmonic polynomial c + b.x + x^T A x with trace A = 0 (A symmetric,
/// row-major d x d; empty when there is no quadratic part).
struct HarmonicPolynomial {
  double constant = 0.0;
  std::vector<double> linear;
  std::vector<double> quadratic;

  ExtReal operator()(const Point& x) const;
  /// Upper bound for |grad| on the ball |x| <= radius.
  double gradient_bound(double radius) const;
  void validate(int d) const;
};

/// u(x) = sum_j m_j k(|x - p_j|) + H(x) - shift, with shift chosen so that
/// u(base_point) = 0. The Riesz measure is exactly sum_j m_j delta_{p_j}.
class TestFunction {
 public:
  /// ln|P(z)| for the polynomial with the given zeros (d = 2).
  static TestFunction log_poly_abs(std::vector<Point> zeros, std::vector<double> multiplicities, Point base_point,
                                   HarmonicPolynomial harmonic = {});
  /// Sum of m_j k(|x - p_j|) plus a harmonic polynomial (d >= 3).
  static TestFunction newton_potential(std::vector<Atom> atoms, Point base_point, HarmonicPolynomial harmonic = {});
  /// Convex piecewise-linear function of one variable with slopes[i] on the
  /// i-th piece between the sorted breakpoints (slopes.size() == breakpoints.size() + 1).
  static TestFunction convex_pl(std::vector<double> breakpoints, std::vector<double> slopes, double base_point);
  static TestFunction harmonic(HarmonicPolynomial h, Point base_point);

  FunctionKind kind() const { return kind_; }
  int dim() const { return base_.dim(); }
  const Point& base_point() const { return base_; }
  double shift() const { return shift_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const HarmonicPolynomial& harmonic_part() const { return harmonic_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& slopes() const { return slopes_; }

  ExtReal operator()(const Point& x) const { return evaluate(x); }
  ExtReal evaluate(const Point& x) const;

  /// Upper bound for |grad u| on the segment-neighborhood of radius delta
  /// around y (+inf if an atom is within delta for d >= 2).
  double local_lipschitz(const Point& y, double delta) const;

 private:
  TestFunction(FunctionKind kind, std::vector<Atom> atoms, HarmonicPolynomial h, Point base);

  FunctionKind kind_;
  std::vector<Atom> atoms_;
  HarmonicPolynomial harmonic_;
  Point base_;
  double shift_ = 0.0;
  std::vector<double> breakpoints_;
  std::vector<double> slopes_;
};

ExtReal evaluate(const TestFunction& u, const Point& x);

AtomicMeasure riesz_of(const TestFunction& u);

/// sup of u over the boundary of D from a boundary sample. `lower` is the
/// sample maximum; `upper` adds the local Lipschitz bound times the covering
/// radius and is +inf when the sample is not certified.
struct BoundarySup {
  ExtReal lower{0.0};
  ExtReal upper{0.0};
  std::size_t samples = 0;
  double covering_radius = 0.0;
};

BoundarySup sup_on_boundary(const TestFunction& u, const Domain& D, std::size_t n, std::uint64_t seed);

/// Exact mean of u over the sphere of radius rho about x.
ExtReal sphere_mean(const TestFunction& u, const Point& x, double rho);

/// u(x) <= (quadrature mean over the sphere) + quadrature error, where the
/// error is estimated by the change from halving the rule.
bool submeanvalue_check(const TestFunction& u, const Point& x, double rho, std::size_t n);

}  // namespace sbh
