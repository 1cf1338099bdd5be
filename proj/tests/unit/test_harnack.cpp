#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sbh/harnack.hpp"
#include "sbh/random.hpp"

using namespace sbh;

namespace {

// Largest Poisson-kernel ratio over random points of the whole sphere; a lower
// estimate of the exact two-point distance.
double sphere_sampling_oracle(const Ball& B, const Point& x, const Point& y, int n, std::uint64_t seed) {
  Rng rng(seed);
  const int d = B.dim();
  const double r = B.radius;
  const Point xc = x - B.center;
  const Point yc = y - B.center;
  double best = 1.0;
  for (int i = 0; i < n; ++i) {
    const Point z = rng.unit_direction(Dimension(d)) * r;
    const double q = distance(z, yc) / distance(z, xc);
    const double ratio = (r * r - xc.norm2()) / (r * r - yc.norm2()) * std::pow(q, d);
    best = std::max({best, ratio, 1.0 / ratio});
  }
  return best;
}

// Extremal ratio over positive affine functions lam (t - a) + (1 - lam) (b - t).
double affine_oracle(double a, double b, double x, double y) {
  double best = 1.0;
  for (int k = 0; k <= 2000; ++k) {
    const double lam = k / 2000.0;
    const double hx = lam * (x - a) + (1 - lam) * (b - x);
    const double hy = lam * (y - a) + (1 - lam) * (b - y);
    best = std::max({best, hx / hy, hy / hx});
  }
  return best;
}

Point random_in_ball(Rng& rng, const Ball& B, double max_frac) {
  const int d = B.dim();
  Point dir = rng.unit_direction(Dimension(d));
  return B.center + dir * (B.radius * max_frac * rng.uniform());
}

}  // namespace

TEST_CASE("center distance values") {
  const Ball b2(Point{0.0, 0.0}, 1.0);
  const Ball b3(Point{0.0, 0.0, 0.0}, 1.0);
  CHECK(ball_center_distance(b2, Point{0.0, 0.0}).value == 1.0);
  CHECK(ball_center_distance(b2, Point{0.5, 0.0}).value == doctest::Approx(3.0));
  CHECK(ball_center_distance(b3, Point{0.0, 0.5, 0.0}).value == doctest::Approx(6.0));
  // d = 1: r / (r - rho)
  CHECK(center_distance_formula(Dimension(1), 1.0, 0.5) == doctest::Approx(2.0));
  CHECK_THROWS_AS(ball_center_distance(b2, Point{1.0, 0.0}), GeometryError);
}

TEST_CASE("center distance increases with the offset") {
  for (int d = 1; d <= 4; ++d) {
    double prev = 1.0;
    for (int k = 1; k < 100; ++k) {
      const double v = center_distance_formula(Dimension(d), 1.0, k / 100.0);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("oracle matches the center formula") {
  for (int d = 2; d <= 3; ++d) {
    const Point c(Dimension{d});
    const Ball B(c, 1.3);
    for (int k = 1; k <= 9; ++k) {
      const Point x = Point::axis(Dimension(d), d - 1, 1.3 * k / 10.0);
      const double exact = ball_center_distance(B, x).value;
      const double oracle = ball_pair_oracle(B, x, c, 100000).value;
      CHECK(oracle <= exact * (1 + 1e-12));
      CHECK(std::abs(oracle - exact) <= 1e-6 * exact);
    }
  }
}

TEST_CASE("two-point ball distance") {
  Rng rng(77);
  for (int d = 2; d <= 3; ++d) {
    const Point c = d == 2 ? Point{0.3, -0.1} : Point{0.1, 0.2, -0.3};
    const Ball B(c, 0.9);
    for (int i = 0; i < 60; ++i) {
      const Point x = random_in_ball(rng, B, 0.95);
      const Point y = random_in_ball(rng, B, 0.95);
      const double exact = ball_pair_distance(B, x, y).value;
      const double fine = ball_pair_oracle(B, x, y, 1 << 16).value;
      CHECK(fine <= exact * (1 + 1e-10));
      CHECK(fine >= exact * (1 - 1e-5));
      CHECK(sphere_sampling_oracle(B, x, y, 4000, derive_seed(1, i)) <= exact * (1 + 1e-10));
      CHECK(ball_pair_distance(B, y, x).value == doctest::Approx(exact).epsilon(1e-12));
    }
    CHECK(ball_pair_distance(B, c + Point::axis(Dimension(d), 0, 0.45), c).value ==
          doctest::Approx(ball_center_distance(B, c + Point::axis(Dimension(d), 0, 0.45)).value));
  }
}

TEST_CASE("oracle converges from below along nested samples") {
  const Ball B(Point{0.0, 0.0, 0.0}, 1.0);
  const Point x{0.3, 0.5, 0.1};
  const Point y{-0.6, 0.2, 0.0};
  double prev = 1.0;
  for (std::size_t n = 1 << 6; n <= (1 << 16); n <<= 2) {
    const double v = ball_pair_oracle(B, x, y, n).value;
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(ball_pair_oracle(B, x, -x, 1000).value == ball_pair_oracle(B, -x, x, 1000).value);
  CHECK(ball_pair_oracle(B, x, x, 1000).value == 1.0);
}

TEST_CASE("interval distance") {
  const Interval I(0.0, 1.0);
  CHECK(interval_distance(I, 0.25, 0.5).value == doctest::Approx(2.0));
  CHECK(interval_distance(I, 0.5, 0.25).value == doctest::Approx(2.0));
  CHECK(interval_distance(I, 0.3, 0.3).value == 1.0);
  CHECK_THROWS_AS(interval_distance(I, 0.0, 0.5), GeometryError);
  Rng rng(4);
  for (int i = 0; i < 9; ++i) {
    const double x = 0.02 + 0.96 * rng.uniform();
    const double y = 0.02 + 0.96 * rng.uniform();
    CHECK(interval_distance(Interval(-1.0, 2.0), x, y).value == doctest::Approx(affine_oracle(-1.0, 2.0, x, y)).epsilon(1e-9));
  }
  // The one-dimensional ball reduces to the interval form.
  CHECK(ball_center_distance(Ball(Point{0.0}, 1.0), Point{0.5}).value == doctest::Approx(2.0));
}

TEST_CASE("multiplicative triangle inequality and subordination") {
  Rng rng(8);
  for (int d = 2; d <= 3; ++d) {
    const Point c(Dimension{d});
    const Ball small(c, 1.0);
    const Ball big(c, 1.7);
    for (int i = 0; i < 200; ++i) {
      const Point x = random_in_ball(rng, small, 0.97);
      const Point y = random_in_ball(rng, small, 0.97);
      const Point z = random_in_ball(rng, small, 0.97);
      const double xy = ball_pair_distance(small, x, y).value;
      CHECK(xy <= ball_pair_distance(small, x, z).value * ball_pair_distance(small, z, y).value * (1 + 1e-12));
      CHECK(ball_pair_distance(big, x, y).value <= xy * (1 + 1e-12));
      CHECK(ball_center_distance(big, x).value <= ball_center_distance(small, x).value);
    }
  }
  const Interval I1(0.0, 1.0);
  const Interval I2(-0.5, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double x = 0.01 + 0.98 * rng.uniform();
    const double y = 0.01 + 0.98 * rng.uniform();
    const double z = 0.01 + 0.98 * rng.uniform();
    CHECK(interval_distance(I2, x, y).value <= interval_distance(I1, x, y).value);
    CHECK(interval_distance(I1, x, y).value <=
          interval_distance(I1, x, z).value * interval_distance(I1, z, y).value * (1 + 1e-12));
  }
}

TEST_CASE("chain bound on a disc") {
  const Ball B(Point{0.0, 0.0}, 1.0);
  const Point x{0.5, 0.0};
  const Point o{0.0, 0.0};
  double prev = std::numeric_limits<double>::infinity();
  for (double mesh : {0.2, 0.1, 0.05, 0.025}) {
    const HarnackValue hv = chain_upper_bound(B, x, o, mesh);
    CHECK(hv.kind == HarnackKind::upper_bound);
    CHECK(hv.value >= 3.0);
    CHECK(hv.value <= prev);
    prev = hv.value;
  }
  CHECK(prev < 3.0 * 1.5);
  CHECK(chain_upper_bound(B, x, x, 0.1).value == 1.0);
}

TEST_CASE("chain bound dominates exact values") {
  Rng rng(31);
  const Ball B(Point{0.0, 0.0, 0.0}, 1.0);
  for (int i = 0; i < 5; ++i) {
    const Point x = random_in_ball(rng, B, 0.8);
    const Point y = random_in_ball(rng, B, 0.8);
    CHECK(chain_upper_bound(B, x, y, 0.2).value >= ball_pair_distance(B, x, y).value);
  }
  const Interval I(0.0, 1.0);
  CHECK(chain_upper_bound(I, Point{0.2}, Point{0.7}, 0.01).value >= interval_distance(I, 0.2, 0.7).value);
}

TEST_CASE("punctured supremum") {
  SUBCASE("inscribed ball is D itself") {
    const NestedPair p{Ball(Point{0.0, 0.0}, 1.5), Ball(Point{0.0, 0.0}, 2.0), Point{0.0, 0.0}};
    CHECK(punctured_sup_distance(p, 1.5, 0.1, 64).value == 1.0);
  }
  SUBCASE("line") {
    const NestedPair p{Interval(-1.0, 1.0), Interval(-2.0, 2.0), Point{0.0}};
    CHECK(punctured_sup_distance(p, 1.0, 0.1, 2).value == 1.0);
    const NestedPair q{Interval(-1.0, 1.5), Interval(-2.0, 2.0), Point{0.0}};
    // x = 1.5 versus y = 1 in (0, 2): max(1.5, 2)
    CHECK(punctured_sup_distance(q, 1.0, 0.1, 2).value == doctest::Approx(2.0));
  }
  SUBCASE("offset disc, refinement") {
    const NestedPair p{Ball(Point{0.2, 0.0}, 1.0), Ball(Point{0.0, 0.0}, 2.0), Point{0.0, 0.0}};
    double prev = std::numeric_limits<double>::infinity();
    for (double mesh : {0.2, 0.1, 0.05}) {
      const HarnackValue hv = punctured_sup_distance(p, 0.8, mesh, 128);
      CHECK(std::isfinite(hv.value));
      CHECK(hv.value >= 1.0);
      CHECK(hv.value <= prev);
      prev = hv.value;
    }
  }
}
