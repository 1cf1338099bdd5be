#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "sbh/kernel.hpp"
#include "sbh/random.hpp"
#include "sbh/riesz.hpp"

using namespace sbh;

namespace {

// dhat * int_0^r mu(B(x, t)) t^(1-d) dt, integrating the step function piece
// by piece with tanh-sinh; the mass on each piece is counted by brute force.
double counting_oracle(const std::vector<Atom>& atoms, const Point& x, double r) {
  const int d = x.dim();
  std::vector<double> cuts{0.0, r};
  for (const Atom& a : atoms) {
    const double t = distance(a.loc, x);
    if (t < r) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  boost::math::quadrature::tanh_sinh<double> ts;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    if (hi <= lo) continue;
    const double mid = 0.5 * (lo + hi);
    double mass = 0.0;
    for (const Atom& a : atoms)
      if (distance(a.loc, x) <= mid) mass += a.mass;
    if (mass == 0.0) continue;
    total += mass * ts.integrate([d](double t) { return std::pow(t, 1 - d); }, lo, hi);
  }
  return std::max(1, d - 2) * total;
}

AtomicMeasure random_measure(Rng& rng, int d, int n, double spread) {
  std::vector<Atom> atoms;
  for (int i = 0; i < n; ++i) {
    Point p(Dimension{d});
    for (int k = 0; k < d; ++k) p[k] = spread * (2.0 * rng.uniform() - 1.0);
    atoms.push_back({p, 0.1 + 2.0 * rng.uniform()});
  }
  return AtomicMeasure(atoms);
}

}  // namespace

TEST_CASE("radial counting examples") {
  const Point x{0.0, 0.0};
  const AtomicMeasure one({{Point{0.5, 0.0}, 1.0}});
  CHECK(radial_counting(one, x, 0.4) == 0.0);
  CHECK(radial_counting(one, x, 0.5) == 1.0);
  const AtomicMeasure two({{Point{0.1, 0.0}, 2.0}, {Point{0.0, 0.9}, 3.0}});
  CHECK(radial_counting(two, x, 0.5) == 2.0);
  const RadialProfile prof = radial_profile(two, x);
  CHECK(prof(0.5) == 2.0);
  CHECK(prof(0.9) == 5.0);
  CHECK(prof(0.0999) == 0.0);
}

TEST_CASE("integrated counting examples") {
  const AtomicMeasure m({{Point{0.3, 0.4}, 1.0}});
  CHECK(integrated_counting(m, Point{0.0, 0.0}, 2.0).value() == doctest::Approx(std::log(2.0 / 0.5)));
  CHECK(integrated_counting(m, Point{0.0, 0.0}, 0.4).value() == 0.0);
  CHECK(integrated_counting(AtomicMeasure({{Point{0.0, 0.0}, 1.0}}), Point{0.0, 0.0}, 1.0).is_pos_inf());
  const AtomicMeasure line({{Point{0.0}, 2.5}});
  CHECK(integrated_counting(line, Point{0.0}, 0.8).value() == doctest::Approx(2.0));
  CHECK(counting_identity_residual(line, Point{0.0}, 0.8) < 1e-14);
  CHECK(counting_identity_residual(AtomicMeasure(), Point{0.0, 0.0, 0.0}, 1.0) == 0.0);
}

TEST_CASE("integrated counting agrees with the quadrature oracle") {
  for (int d = 1; d <= 4; ++d) {
    Rng rng(derive_seed(99, d));
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 1 + static_cast<int>(rng.uniform() * 20);
      const AtomicMeasure mu = random_measure(rng, d, n, 1.0);
      const Point x(Dimension{d});
      const double r = 0.2 + 1.5 * rng.uniform();
      const double closed = integrated_counting(mu, x, r).value();
      const double oracle = counting_oracle(mu.atoms(), x, r);
      CHECK(std::abs(closed - oracle) <= 1e-9 * (1.0 + std::abs(oracle)));
      CHECK(counting_identity_residual(mu, x, r) <= 1e-8 * (1.0 + closed));
    }
  }
}

TEST_CASE("integrated counting is nondecreasing and continuous at the jumps") {
  Rng rng(5);
  for (int d = 1; d <= 3; ++d) {
    const AtomicMeasure mu = random_measure(rng, d, 12, 1.0);
    const Point x(Dimension{d});
    const RadialProfile prof = radial_profile(mu, x);
    for (double a : prof.jump_radii) {
      const double below = integrated_counting(mu, x, a * (1.0 - 1e-9)).value();
      const double at = integrated_counting(mu, x, a).value();
      const double above = integrated_counting(mu, x, a * (1.0 + 1e-9)).value();
      CHECK(below <= at);
      CHECK(at <= above);
      CHECK(above - below < 1e-6);
    }
  }
}

TEST_CASE("restriction to the closure") {
  const Ball unit(Point{0.0, 0.0}, 1.0);
  const AtomicMeasure mu({{Point{0.5, 0.0}, 1.0}, {Point{1.5, 0.0}, 1.0}, {Point{0.0, 1.0}, 2.0}});
  const AtomicMeasure r = restrict(mu, unit);
  REQUIRE(r.size() == 2);
  CHECK(r.total_mass() == 3.0);
}

TEST_CASE("measures reject non-positive masses") {
  CHECK_THROWS(AtomicMeasure({{Point{0.0}, 0.0}}));
  CHECK_THROWS(AtomicMeasure({{Point{0.0}, 1.0}, {Point{0.0, 1.0}, 1.0}}));
}
