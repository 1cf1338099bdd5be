#include "sbh/testbed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sbh/kernel.hpp"
#include "sbh/quadrature.hpp"

namespace sbh {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// k'(t), +inf at t = 0 for d >= 2.
double kernel_derivative(int d, double t) {
  if (d == 1) return 1.0;
  if (t <= 0.0) return kInf;
  if (d == 2) return 1.0 / t;
  return (d - 2) * std::pow(t, 1 - d);
}

}  // namespace

std::string to_string(FunctionKind k) {
  switch (k) {
    case FunctionKind::log_poly_abs: return "log_poly_abs";
    case FunctionKind::newton_potential: return "newton_potential";
    case FunctionKind::convex_pl: return "convex_pl";
    case FunctionKind::harmonic: return "harmonic";
  }
  return "?";
}

FunctionKind function_kind_from_string(const std::string& s) {
  if (s == "log_poly_abs") return FunctionKind::log_poly_abs;
  if (s == "newton_potential") return FunctionKind::newton_potential;
  if (s == "convex_pl") return FunctionKind::convex_pl;
  if (s == "harmonic") return FunctionKind::harmonic;
  throw std::invalid_argument("unknown function kind '" + s + "'");
}

ExtReal HarmonicPolynomial::operator()(const Point& x) const {
  const int d = x.dim();
  double v = constant;
  if (!linear.empty()) {
    for (int i = 0; i < d; ++i) v += linear[i] * x[i];
  }
  if (!quadratic.empty()) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) v += quadratic[i * d + j] * x[i] * x[j];
  }
  return v;
}

double HarmonicPolynomial::gradient_bound(double radius) const {
  double b = 0.0;
  for (double c : linear) b += c * c;
  double a = 0.0;
  for (double c : quadratic) a += c * c;
  return std::sqrt(b) + 2.0 * std::sqrt(a) * radius;
}

void HarmonicPolynomial::validate(int d) const {
  if (!std::isfinite(constant)) throw std::invalid_argument("harmonic term: constant must be finite");
  if (!linear.empty() && static_cast<int>(linear.size()) != d) {
    throw std::invalid_argument("harmonic term: linear part needs d coefficients");
  }
  if (quadratic.empty()) return;
  if (static_cast<int>(quadratic.size()) != d * d) {
    throw std::invalid_argument("harmonic term: quadratic part needs d*d coefficients");
  }
  double trace = 0.0;
  double scale = 0.0;
  for (int i = 0; i < d; ++i) {
    trace += quadratic[i * d + i];
    for (int j = 0; j < d; ++j) {
      scale = std::max(scale, std::abs(quadratic[i * d + j]));
      if (quadratic[i * d + j] != quadratic[j * d + i]) {
        throw std::invalid_argument("harmonic term: quadratic part must be symmetric");
      }
    }
  }
  if (std::abs(trace) > 1e-12 * std::max(1.0, scale)) {
    throw std::invalid_argument("harmonic term: quadratic part must be trace-free");
  }
}

TestFunction::TestFunction(FunctionKind kind, std::vector<Atom> atoms, HarmonicPolynomial h, Point base)
    : kind_(kind), atoms_(std::move(atoms)), harmonic_(std::move(h)), base_(base) {
  const int d = base_.dim();
  harmonic_.validate(d);
  for (const Atom& a : atoms_) {
    if (a.loc.dim() != d) throw std::invalid_argument("test function: atom dimension mismatch");
    if (!(a.mass > 0.0) || !std::isfinite(a.mass)) throw std::invalid_argument("test function: masses must be positive");
  }
  const ExtReal raw = evaluate(base_);
  if (!raw.is_finite()) throw std::invalid_argument("test function: u is -inf at the base point");
  shift_ = raw.value();
}

TestFunction TestFunction::log_poly_abs(std::vector<Point> zeros, std::vector<double> multiplicities, Point base_point,
                                        HarmonicPolynomial harmonic) {
  if (base_point.dim() != 2) throw std::invalid_argument("log_poly_abs is two-dimensional");
  if (multiplicities.empty()) multiplicities.assign(zeros.size(), 1.0);
  if (multiplicities.size() != zeros.size()) throw std::invalid_argument("log_poly_abs: one multiplicity per zero");
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < zeros.size(); ++i) atoms.push_back({zeros[i], multiplicities[i]});
  return TestFunction(FunctionKind::log_poly_abs, std::move(atoms), std::move(harmonic), base_point);
}

TestFunction TestFunction::newton_potential(std::vector<Atom> atoms, Point base_point, HarmonicPolynomial harmonic) {
  if (base_point.dim() < 3) throw std::invalid_argument("newton_potential needs d >= 3");
  return TestFunction(FunctionKind::newton_potential, std::move(atoms), std::move(harmonic), base_point);
}

TestFunction TestFunction::convex_pl(std::vector<double> breakpoints, std::vector<double> slopes, double base_point) {
  if (slopes.size() != breakpoints.size() + 1) throw std::invalid_argument("convex_pl: need one more slope than breakpoints");
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > breakpoints[i - 1])) throw std::invalid_argument("convex_pl: breakpoints must increase");
  }
  for (std::size_t i = 1; i < slopes.size(); ++i) {
    if (!(slopes[i] >= slopes[i - 1])) throw std::invalid_argument("convex_pl: slopes must be nondecreasing");
  }
  // u(t) = b t + sum (jump_j / 2) |t - t_j| with b the mean of the end slopes.
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const double jump = slopes[i + 1] - slopes[i];
    if (jump > 0.0) atoms.push_back({Point{breakpoints[i]}, jump / 2.0});
  }
  HarmonicPolynomial h;
  h.linear = {(slopes.front() + slopes.back()) / 2.0};
  TestFunction u(FunctionKind::convex_pl, std::move(atoms), std::move(h), Point{base_point});
  u.breakpoints_ = std::move(breakpoints);
  u.slopes_ = std::move(slopes);
  return u;
}

TestFunction TestFunction::harmonic(HarmonicPolynomial h, Point base_point) {
  return TestFunction(FunctionKind::harmonic, {}, std::move(h), base_point);
}

ExtReal TestFunction::evaluate(const Point& x) const {
  require_same_dim(x, base_, "evaluate");
  const Dimension d = base_.dimension();
  ExtReal v = harmonic_(x);
  for (const Atom& a : atoms_) v += a.mass * kernel_k(d, distance(x, a.loc));
  return v - ExtReal(shift_);
}

double TestFunction::local_lipschitz(const Point& y, double delta) const {
  const int d = base_.dim();
  double L = harmonic_.gradient_bound(y.norm() + delta);
  for (const Atom& a : atoms_) {
    const double g = kernel_derivative(d, distance(y, a.loc) - delta);
    if (g == kInf) return kInf;
    L += a.mass * g;
  }
  return L;
}

ExtReal evaluate(const TestFunction& u, const Point& x) { return u.evaluate(x); }

AtomicMeasure riesz_of(const TestFunction& u) { return AtomicMeasure(u.atoms()); }

BoundarySup sup_on_boundary(const TestFunction& u, const Domain& D, std::size_t n, std::uint64_t seed) {
  const BoundarySample s = boundary_sample(D, n, seed);
  BoundarySup out;
  out.samples = s.points.size();
  out.covering_radius = s.covering_radius;
  ExtReal lo = ExtReal::neg_inf();
  ExtReal hi = ExtReal::neg_inf();
  for (const Point& y : s.points) {
    const ExtReal v = u.evaluate(y);
    lo = std::max(lo, v);
    if (!s.certified()) continue;
    if (s.covering_radius == 0.0) {
      hi = std::max(hi, v);
      continue;
    }
    const double L = u.local_lipschitz(y, s.covering_radius);
    if (L == kInf) {
      hi = ExtReal::pos_inf();
    } else if (v.is_finite()) {
      hi = std::max(hi, v + ExtReal(L * s.covering_radius));
    }
  }
  out.lower = lo;
  out.upper = s.certified() ? hi : ExtReal::pos_inf();
  return out;
}

ExtReal sphere_mean(const TestFunction& u, const Point& x, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("sphere_mean: rho must be > 0");
  ExtReal v = u.harmonic_part()(x);
  for (const Atom& a : u.atoms()) v += a.mass * sphere_mean_kernel(x, rho, a.loc);
  return v - ExtReal(u.shift());
}

bool submeanvalue_check(const TestFunction& u, const Point& x, double rho, std::size_t n) {
  const ExtReal ux = u.evaluate(x);
  if (ux.is_neg_inf()) return true;
  const Point axis = Point::axis(x.dimension(), 0);
  const auto mean = [&](std::size_t m) {
    const SphereRule rule = sphere_rule(x, rho, m, axis);
    ExtReal s{0.0};
    for (std::size_t i = 0; i < rule.points.size(); ++i) s += rule.weights[i] * u.evaluate(rule.points[i]);
    return s;
  };
  const ExtReal fine = mean(n);
  const ExtReal coarse = mean(std::max<std::size_t>(n / 2, 2));
  if (!fine.is_finite() || !coarse.is_finite()) {
    // A node landed on an atom; compare with the closed-form mean instead.
    return ux <= sphere_mean(u, x, rho) + ExtReal(1e-12 * (1.0 + std::abs(ux.value())));
  }
  const double err = std::abs(fine.value() - coarse.value()) + 1e-12 * (1.0 + std::abs(fine.value()));
  return ux.value() <= fine.value() + err;
}

}  // namespace sbh
