#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sbh/quadrature.hpp"
#include "sbh/random.hpp"
#include "sbh/testbed.hpp"

using namespace sbh;

namespace {

// Dense product-rule mean of u over the sphere, independent of the closed form.
double dense_mean(const TestFunction& u, const Point& x, double rho, std::size_t n) {
  const SphereRule rule = sphere_rule(x, rho, n, Point::axis(x.dimension(), x.dim() - 1));
  double s = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i) s += rule.weights[i] * u(rule.points[i]).value();
  return s;
}

Point random_point(Rng& rng, int d, double scale) {
  Point p(Dimension{d});
  for (int a = 0; a < d; ++a) p[a] = scale * (2.0 * rng.uniform() - 1.0);
  return p;
}

TestFunction random_function(Rng& rng, int kind) {
  HarmonicPolynomial h;
  switch (kind) {
    case 0: {
      std::vector<Point> zeros;
      std::vector<double> mult;
      for (int i = 0; i < 3; ++i) {
        zeros.push_back(random_point(rng, 2, 1.5));
        mult.push_back(1.0 + std::floor(3 * rng.uniform()));
      }
      h.linear = {0.3, -0.2};
      return TestFunction::log_poly_abs(zeros, mult, Point{0.05, -0.03}, h);
    }
    case 1: {
      std::vector<Atom> atoms;
      for (int i = 0; i < 3; ++i) atoms.push_back({random_point(rng, 3, 1.5), 0.2 + rng.uniform()});
      h.quadratic = {0.1, 0.0, 0.0, 0.0, 0.2, 0.05, 0.0, 0.05, -0.3};
      return TestFunction::newton_potential(atoms, Point{0.01, 0.02, -0.02}, h);
    }
    case 2: {
      std::vector<double> br{-0.7, 0.1, 0.4};
      std::vector<double> sl{-1.0, -0.5 + rng.uniform(), 1.0, 2.5};
      return TestFunction::convex_pl(br, sl, 0.0);
    }
    default:
      h.linear = {0.5, 1.0};
      h.quadratic = {1.0, 0.3, 0.3, -1.0};
      return TestFunction::harmonic(h, Point{0.0, 0.0});
  }
}

}  // namespace

TEST_CASE("evaluate examples") {
  const Point z0{0.4, 0.3};
  const TestFunction lp = TestFunction::log_poly_abs({z0}, {}, Point{0.0, 0.0});
  CHECK(lp(z0).is_neg_inf());
  CHECK(lp(Point{0.0, 0.0}).value() == 0.0);
  CHECK(lp(Point{1.4, 0.3}).value() == doctest::Approx(std::log(1.0) - std::log(0.5)));

  const TestFunction pl = TestFunction::convex_pl({0.0}, {-1.0, 1.0}, 0.5);
  CHECK(pl(Point{0.5}).value() == 0.0);
  CHECK(pl(Point{-2.0}).value() == doctest::Approx(1.5));

  // shift s = k(|o - p|) = -1, so u(x) = -1/2 - s.
  const TestFunction np = TestFunction::newton_potential({{Point{0.0, 0.0, 0.0}, 1.0}}, Point{1.0, 0.0, 0.0});
  CHECK(np.shift() == doctest::Approx(-1.0));
  CHECK(np(Point{0.0, 2.0, 0.0}).value() == doctest::Approx(-0.5 - np.shift()));
  CHECK(np(Point{0.0, 0.0, 0.0}).is_neg_inf());

  CHECK_THROWS(TestFunction::log_poly_abs({z0}, {}, z0));
  HarmonicPolynomial bad;
  bad.quadratic = {1.0, 0.0, 0.0, 1.0};
  CHECK_THROWS(TestFunction::harmonic(bad, Point{0.0, 0.0}));
  CHECK_THROWS(TestFunction::convex_pl({0.0}, {1.0, -1.0}, 0.0));
}

TEST_CASE("riesz measures") {
  const TestFunction abs = TestFunction::convex_pl({0.0}, {-1.0, 1.0}, 0.3);
  const AtomicMeasure mu = riesz_of(abs);
  REQUIRE(mu.size() == 1);
  CHECK(mu.atoms()[0].mass == 1.0);
  CHECK(riesz_of(TestFunction::harmonic({}, Point{0.0, 0.0, 0.0})).empty());
  // Slope jumps from finite differences.
  const TestFunction pl = TestFunction::convex_pl({-0.5, 0.25, 1.0}, {-2.0, -0.5, 0.0, 3.0}, 0.0);
  const AtomicMeasure m2 = riesz_of(pl);
  REQUIRE(m2.size() == 3);
  const double h = 1e-4;
  for (const Atom& a : m2.atoms()) {
    const double t = a.loc[0];
    const double left = (pl(Point{t}).value() - pl(Point{t - h}).value()) / h;
    const double right = (pl(Point{t + h}).value() - pl(Point{t}).value()) / h;
    CHECK(a.mass == doctest::Approx((right - left) / 2.0).epsilon(1e-9));
  }
}

TEST_CASE("jensen bridge in the plane") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point> zeros;
    std::vector<double> mult;
    for (int i = 0; i < 4; ++i) {
      zeros.push_back(random_point(rng, 2, 2.0));
      mult.push_back(1.0 + std::floor(2 * rng.uniform()));
    }
    const Point o{0.0, 0.0};
    bool close = false;
    for (const Point& z : zeros) close = close || z.norm() < 0.05;
    if (close) continue;
    const TestFunction u = TestFunction::log_poly_abs(zeros, mult, o);
    for (double r : {0.3, 0.8, 1.6}) {
      bool near = false;
      for (const Point& z : zeros) near = near || std::abs(z.norm() - r) < 0.05;
      if (near) continue;
      const double mean = dense_mean(u, o, r, 1 << 14);
      CHECK(std::abs(mean - integrated_counting(riesz_of(u), o, r).value()) <= 1e-6);
    }
  }
}

TEST_CASE("sphere means match the counting integral in every kind") {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const TestFunction u = random_function(rng, trial % 4);
    const int d = u.dim();
    const Point x = random_point(rng, d, 0.8);
    const double rho = 0.2 + 0.8 * rng.uniform();
    double clearance = 1.0;
    for (const Atom& a : u.atoms()) clearance = std::min(clearance, std::abs(distance(a.loc, x) - rho));
    if (!u(x).is_finite() || clearance < 0.1) continue;
    const double exact = sphere_mean(u, x, rho).value();
    CHECK(exact == doctest::Approx(u(x).value() + integrated_counting(riesz_of(u), x, rho).value()).epsilon(1e-10));
    if (d >= 2) CHECK(std::abs(dense_mean(u, x, rho, 40000) - exact) <= 1e-6);
    CHECK(submeanvalue_check(u, x, rho, 2048));
  }
  const TestFunction lnz = TestFunction::log_poly_abs({Point{0.0, 0.0}}, {}, Point{1.0, 0.0});
  CHECK(submeanvalue_check(lnz, Point{0.0, 0.0}, 0.5, 64));
  CHECK(submeanvalue_check(lnz, Point{0.3, 0.1}, 0.2, 256));
  CHECK(sphere_mean(lnz, Point{0.3, 0.1}, 0.2) > lnz(Point{0.3, 0.1}) - 1e-15);
}

TEST_CASE("boundary suprema") {
  HarmonicPolynomial c;
  c.constant = 2.0;
  const TestFunction cst = TestFunction::harmonic(c, Point{0.0, 0.0});
  const BoundarySup s0 = sup_on_boundary(cst, Ball(Point{0.0, 0.0}, 1.0), 64, 1);
  CHECK(s0.lower.value() == 0.0);
  CHECK(s0.upper.value() == 0.0);

  const TestFunction lnz = TestFunction::log_poly_abs({Point{0.0, 0.0}}, {}, Point{1.0, 0.0});
  const BoundarySup s1 = sup_on_boundary(lnz, Ball(Point{0.0, 0.0}, 0.5), 128, 2);
  CHECK(s1.lower.value() == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(s1.upper >= s1.lower);

  const TestFunction off = TestFunction::log_poly_abs({Point{3.0, 0.0}}, {}, Point{0.0, 0.0});
  for (std::size_t n : {64, 256, 1024}) {
    const BoundarySup s = sup_on_boundary(off, Ball(Point{0.0, 0.0}, 1.0), n, 3);
    const double truth = std::log(4.0) - std::log(3.0);
    CHECK(s.lower.value() <= truth + 1e-15);
    CHECK(s.upper.value() >= truth);
    CHECK(s.upper.value() - s.lower.value() <= 4.0 * std::numbers::pi / n);
  }

  Rng rng(5);
  for (int trial = 0; trial < 12; ++trial) {
    const TestFunction u = random_function(rng, trial % 4);
    const int d = u.dim();
    const Domain D = d == 1 ? Domain(Interval(-1.2, 0.9)) : Domain(Ball(Point(Dimension{d}), 1.1));
    const BoundarySup s = sup_on_boundary(u, D, 512, 7);
    CHECK(s.lower <= s.upper);
    Rng probe(trial);
    for (int k = 0; k < 5000; ++k) {
      const Point z = d == 1 ? Point{k % 2 == 0 ? -1.2 : 0.9} : probe.unit_direction(Dimension(d)) * 1.1;
      CHECK(u(z) <= s.upper);
    }
  }
}
