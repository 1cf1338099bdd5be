#include "sbh/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "sbh/kernel.hpp"
#include "sbh/parallel.hpp"
#include "sbh/quadrature.hpp"
#include "sbh/random.hpp"

namespace sbh {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_ball_center(const Domain& D, const Point& x) {
  const Ball* b = D.as_ball();
  return b && b->center == x;
}

HarmonicMeasureSample interval_measure(double a, double b, double x) {
  HarmonicMeasureSample s;
  s.exit_points = {Point{a}, Point{b}};
  s.weights = {(b - x) / (b - a), (x - a) / (b - a)};
  return s;
}

HarmonicMeasureSample ball_measure(const Ball& B, const Point& x, std::size_t n) {
  const int d = B.dim();
  if (d == 1) return interval_measure(B.center[0] - B.radius, B.center[0] + B.radius, x[0]);
  const SphereRule rule = sphere_rule(B.center, B.radius, n, x - B.center);
  HarmonicMeasureSample s;
  s.exit_points = rule.points;
  s.weights.resize(rule.points.size());
  const double r = B.radius;
  const double num = (r * r - distance(x, B.center) * distance(x, B.center)) * std::pow(r, d - 2);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    s.weights[i] = rule.weights[i] * num / std::pow(distance(x, rule.points[i]), d);
    total += s.weights[i];
  }
  for (double& w : s.weights) w /= total;
  return s;
}

std::string trace_string(const std::vector<std::pair<Point, double>>& trace) {
  std::string out;
  for (const auto& [p, r] : trace) {
    out += "(";
    for (int i = 0; i < p.dim(); ++i) out += fmt::format("{}{:.6g}", i ? ", " : "", p[i]);
    out += fmt::format(") r={:.3g}; ", r);
  }
  return out;
}

HarmonicMeasureSample walk_on_spheres(const Domain& D, const Point& x, std::size_t n, std::uint64_t seed,
                                      const WosOptions& opts) {
  if (n == 0) throw std::invalid_argument("walk-on-spheres: n must be positive");
  const double eps = opts.eps_shell > 0.0 ? opts.eps_shell : opts.shell_fraction * diameter(D).lower;
  const std::size_t batch = std::max<std::size_t>(1, opts.batch_size);
  const std::size_t nb = (n + batch - 1) / batch;
  const Dimension d = D.dimension();

  HarmonicMeasureSample s;
  s.exit_points.assign(n, Point(d));
  s.weights.assign(n, 1.0 / static_cast<double>(n));
  s.seed = seed;
  s.eps_shell = eps;
  s.monte_carlo = true;
  std::vector<std::size_t> steps(nb, 0);

  parallel_for(nb, opts.threads, [&](std::size_t b) {
    Rng rng(derive_seed(seed, b));
    const std::size_t lo = b * batch;
    const std::size_t hi = std::min(n, lo + batch);
    for (std::size_t k = lo; k < hi; ++k) {
      Point p = x;
      bool exited = false;
      std::vector<std::pair<Point, double>> trace;
      for (std::size_t step = 0; step < opts.max_steps; ++step) {
        const double r = D.interior_distance(p);
        if (trace.size() == 8) trace.erase(trace.begin());
        trace.emplace_back(p, r);
        if (r <= eps) {
          s.exit_points[k] = D.closest_boundary_point(p);
          steps[b] += step;
          exited = true;
          break;
        }
        p += rng.unit_direction(d) * r;
      }
      if (!exited) {
        throw WalkError(fmt::format("walk-on-spheres: walk {} (seed {}) did not reach the shell {:.3g} within {} steps; last: {}",
                                    k, seed, eps, opts.max_steps, trace_string(trace)));
      }
    }
  });
  std::size_t total = 0;
  for (std::size_t v : steps) total += v;
  s.mean_steps = static_cast<double>(total) / static_cast<double>(n);
  return s;
}

// Mean and standard error of per-point values under the sample weights.
Estimate weighted_stats(const HarmonicMeasureSample& s, const std::vector<double>& v) {
  double mean = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == -kInf) return {-kInf, 0.0, s.monte_carlo ? Side::estimate : Side::exact};
    mean += s.weights[i] * v[i];
  }
  if (!s.monte_carlo) return {mean, 0.0, Side::exact};
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double n = static_cast<double>(v.size());
  var /= std::max(1.0, n - 1.0);
  return {mean, std::sqrt(var / n), Side::estimate};
}

}  // namespace

double HarmonicMeasureSample::total_weight() const {
  double t = 0.0;
  for (double w : weights) t += w;
  return t;
}

GreenEstimate green_ball_center(double r, const Point& x, const Point& y) {
  if (!(r > 0.0)) throw std::invalid_argument("green_ball_center: r must be positive");
  require_same_dim(x, y, "green_ball_center");
  const Dimension d = x.dimension();
  const double t = distance(x, y);
  if (t >= r) return {ExtReal(0.0), 0.0, 0.0, true};
  if (t == 0.0 && d.value() >= 2) return {ExtReal::pos_inf(), 0.0, 0.0, true};
  return {ExtReal(t == 0.0 ? r : kernel_increment(d, t, r)), 0.0, 0.0, true};
}

HarmonicMeasureSample harmonic_measure(const Domain& D, const Point& x, std::size_t n, std::uint64_t seed,
                                       const WosOptions& opts) {
  require_same_dim(Point(D.dimension()), x, "harmonic_measure");
  if (!D.contains(x)) throw GeometryError("harmonic_measure: point is not inside the domain");
  if (const Interval* i = D.as_interval()) return interval_measure(i->a, i->b, x[0]);
  if (const Ball* b = D.as_ball()) return ball_measure(*b, x, n);
  return walk_on_spheres(D, x, n, seed, opts);
}

Estimate harmonic_average(const HarmonicMeasureSample& s, const ScalarField& f) {
  std::vector<double> v(s.exit_points.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(s.exit_points[i]).value();
  return weighted_stats(s, v);
}

Estimate best_harmonic_majorant(const ScalarField& f, const Domain& D, const Point& x, std::size_t n, std::uint64_t seed,
                                const WosOptions& opts) {
  const HarmonicMeasureSample s = harmonic_measure(D, x, n, seed, opts);
  Estimate e = harmonic_average(s, f);
  if (!s.monte_carlo && D.as_ball() && D.dim() >= 2) {
    const Estimate coarse = harmonic_average(harmonic_measure(D, x, std::max<std::size_t>(n / 2, 4), seed, opts), f);
    if (std::isfinite(e.value) && std::isfinite(coarse.value)) e.half_width = std::abs(e.value - coarse.value);
    e.side = Side::estimate;
  }
  return e;
}

GreenEstimate green_from_sample(const HarmonicMeasureSample& s, const Point& x, const Point& y) {
  const Dimension d = x.dimension();
  const double rxy = distance(x, y);
  if (rxy == 0.0 && d.value() >= 2) return {ExtReal::pos_inf(), 0.0, 0.0, false};
  std::vector<double> v(s.exit_points.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = kernel_k(d, distance(y, s.exit_points[i])).value();
  const Estimate m = weighted_stats(s, v);
  GreenEstimate g;
  g.exact = false;
  g.half_width = m.half_width;
  const double raw = m.value - kernel_k(d, rxy).value();
  if (raw < 0.0 || std::isnan(raw)) {
    g.clamped = std::isnan(raw) ? 0.0 : -raw;
    g.value = ExtReal(0.0);
  } else {
    g.value = ExtReal(raw);
  }
  return g;
}

GreenEstimate green_general(const Domain& D, const Point& x, const Point& y, std::size_t n, std::uint64_t seed,
                            const WosOptions& opts) {
  if (is_ball_center(D, x)) return green_ball_center(D.as_ball()->radius, x, y);
  return green_from_sample(harmonic_measure(D, x, n, seed, opts), x, y);
}

GreenEstimate green_potential(const Domain& D, const Point& x, const AtomicMeasure& mu, std::size_t n,
                              std::uint64_t seed, const WosOptions& opts) {
  std::vector<Atom> inside;
  for (const Atom& a : mu.atoms())
    if (D.contains(a.loc)) inside.push_back(a);
  GreenEstimate total{ExtReal(0.0), 0.0, 0.0, true};
  if (inside.empty()) return total;
  const Dimension d = x.dimension();
  for (const Atom& a : inside)
    if (a.loc == x && d.value() >= 2) return {ExtReal::pos_inf(), 0.0, 0.0, is_ball_center(D, x)};
  if (is_ball_center(D, x)) {
    double s = 0.0;
    for (const Atom& a : inside) s += a.mass * green_ball_center(D.as_ball()->radius, x, a.loc).value.value();
    total.value = ExtReal(s);
    return total;
  }
  const HarmonicMeasureSample hm = harmonic_measure(D, x, n, seed, opts);
  double s = 0.0;
  for (const Atom& a : inside) {
    const GreenEstimate g = green_from_sample(hm, x, a.loc);
    s += a.mass * g.value.value();
    total.clamped += a.mass * g.clamped;
  }
  total.value = ExtReal(s);
  total.exact = false;
  if (hm.monte_carlo) {
    std::vector<double> v(hm.exit_points.size(), 0.0);
    for (std::size_t k = 0; k < v.size(); ++k)
      for (const Atom& a : inside) v[k] += a.mass * kernel_k(d, distance(a.loc, hm.exit_points[k])).value();
    total.half_width = weighted_stats(hm, v).half_width;
  }
  return total;
}

ExtReal green_upper_bound(const Domain& D, const Point& x, const Point& y) {
  const Dimension d = x.dimension();
  const double diam = diameter(D).upper;
  const double t = distance(x, y);
  if (t == 0.0) return d.value() >= 2 ? ExtReal::pos_inf() : ExtReal(diam);
  return ExtReal(kernel_increment(d, t, diam));
}

GreenLowerBound green_lower_bound_via_harnack(const NestedPair& pair, const HarnackValue& harnack_sup) {
  if (harnack_sup.kind == HarnackKind::oracle_estimate)
    throw std::invalid_argument("green_lower_bound_via_harnack: needs an exact or upper-bound Harnack value");
  GreenLowerBound out;
  out.R = inradius_at(pair.inner, pair.base).lower;
  out.gap = gap(pair).lower;
  if (!(out.gap > 0.0) || !std::isfinite(harnack_sup.value)) {
    out.degenerate = true;
    return out;
  }
  out.value = kernel_increment(pair.base.dimension(), out.R, out.R + out.gap) / harnack_sup.value;
  return out;
}

Estimate poisson_jensen_residual(const ScalarField& u, const AtomicMeasure& mu, const Domain& D, const Point& x,
                                 std::size_t n, std::uint64_t seed, const WosOptions& opts) {
  const Dimension d = x.dimension();
  std::vector<Atom> inside;
  for (const Atom& a : mu.atoms())
    if (D.contains(a.loc)) inside.push_back(a);
  for (const Atom& a : inside)
    if (a.loc == x) throw std::invalid_argument("poisson_jensen_residual: x is an atom of the measure");
  const HarmonicMeasureSample hm = harmonic_measure(D, x, n, seed, opts);
  // u minus the local potential is harmonic in D; its boundary average is
  // H_u(x) minus the boundary part of the Green representation.
  std::vector<double> v(hm.exit_points.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    double w = u(hm.exit_points[k]).value();
    for (const Atom& a : inside) w -= a.mass * kernel_k(d, distance(a.loc, hm.exit_points[k])).value();
    v[k] = w;
  }
  const Estimate m = weighted_stats(hm, v);
  double local = 0.0;
  for (const Atom& a : inside) local += a.mass * kernel_k(d, distance(a.loc, x)).value();
  return {u(x).value() - m.value - local, m.half_width, hm.monte_carlo ? Side::estimate : Side::exact};
}

}  // namespace sbh
