#include <cmath>
#include <memory>
#include <numbers>

#include "doctest.h"
#include "sbh/domains.hpp"
#include "sbh/random.hpp"

using namespace sbh;

namespace {

Domain unit_square() {
  return SdfDomain{std::make_shared<BoxShape>(Point{0.5, 0.5}, Point{0.5, 0.5})};
}

double nearest(const BoundarySample& s, const Point& p) {
  double m = 1e300;
  for (const Point& q : s.points) m = std::min(m, distance(p, q));
  return m;
}

}  // namespace

TEST_CASE("diameter") {
  CHECK(diameter(Ball(Point{0.0, 0.0}, 1.0)).lower == 2.0);
  CHECK(diameter(Interval(0.0, 3.0)).upper == 3.0);
  const Bracket sq = diameter(unit_square());
  CHECK(sq.lower <= std::numbers::sqrt2 + 1e-12);
  CHECK(sq.upper >= std::numbers::sqrt2 - 1e-12);
  CHECK(sq.lower == doctest::Approx(std::numbers::sqrt2).epsilon(1e-3));
}

TEST_CASE("inradius") {
  CHECK(inradius_at(Ball(Point{0.0, 0.0}, 1.0), Point{0.0, 0.0}).lower == 1.0);
  CHECK(inradius_at(Interval(0.0, 1.0), Point{0.25}).lower == 0.25);
  CHECK(inradius_at(unit_square(), Point{0.5, 0.3}).lower == doctest::Approx(0.3));
  CHECK_THROWS_AS(inradius_at(Ball(Point{0.0, 0.0}, 1.0), Point{1.5, 0.0}), GeometryError);
}

TEST_CASE("gap") {
  CHECK(gap({Ball(Point{0.0, 0.0}, 1.0), Ball(Point{0.0, 0.0}, 2.0), Point{0.0, 0.0}}).lower == 1.0);
  CHECK(gap({Interval(-1.0, 1.0), Interval(-2.0, 3.0), Point{0.0}}).lower == 1.0);
  CHECK(gap({Ball(Point{0.5, 0.0}, 1.0), Ball(Point{0.0, 0.0}, 2.0), Point{0.5, 0.0}}).lower == doctest::Approx(0.5));

  // Box inside a disc: sampled bracket contains the exact value 2 - sqrt(2)/2.
  const NestedPair p{unit_square(), Ball(Point{0.5, 0.5}, 2.0), Point{0.5, 0.5}};
  const Bracket g = gap(p);
  const double exact = 2.0 - std::numbers::sqrt2 / 2.0;
  CHECK(g.lower <= exact);
  CHECK(g.upper >= exact - 1e-12);
  CHECK(g.upper - g.lower < 1e-2);
}

TEST_CASE("nesting violations are detected") {
  const NestedPair bad{Ball(Point{0.0, 0.0}, 1.0), Ball(Point{0.5, 0.0}, 1.2), Point{0.0, 0.0}};
  CHECK_THROWS_AS(bad.validate(), NestingError);
  const NestedPair bad_base{Ball(Point{0.0, 0.0}, 1.0), Ball(Point{0.0, 0.0}, 2.0), Point{1.0, 0.0}};
  CHECK_THROWS_AS(bad_base.validate(), GeometryError);
  const NestedPair box_bad{unit_square(), Ball(Point{0.5, 0.5}, 0.6), Point{0.5, 0.5}};
  CHECK_THROWS_AS(box_bad.validate(), NestingError);
}

TEST_CASE("boundary samples") {
  const BoundarySample iv = boundary_sample(Interval(0.0, 1.0), 2, 0);
  REQUIRE(iv.points.size() == 2);
  CHECK(iv.points[0][0] == 0.0);
  CHECK(iv.points[1][0] == 1.0);

  const BoundarySample ball = boundary_sample(Ball(Point{0.0, 0.0}, 1.0), 4, 7);
  for (const Point& p : ball.points) CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-15));

  const Domain sq = unit_square();
  const BoundarySample s = boundary_sample(sq, 100, 0);
  for (const Point& p : s.points) CHECK(std::abs(sq.signed_distance(p)) <= sq.eps_geo());

  const BoundarySample again = boundary_sample(Ball(Point{0.0, 0.0}, 1.0), 4, 7);
  CHECK(again.points == ball.points);
}

TEST_CASE("covering radii are honest") {
  Rng rng(3);
  SUBCASE("disc") {
    const BoundarySample s = boundary_sample(Ball(Point{1.0, -2.0}, 1.5), 64, 9);
    for (int i = 0; i < 2000; ++i) {
      const double t = 2.0 * std::numbers::pi * rng.uniform();
      CHECK(nearest(s, Point{1.0 + 1.5 * std::cos(t), -2.0 + 1.5 * std::sin(t)}) <= s.covering_radius);
    }
  }
  SUBCASE("sphere") {
    const BoundarySample s = boundary_sample(Ball(Point{0.0, 0.0, 0.0}, 2.0), 300, 0);
    for (int i = 0; i < 2000; ++i)
      CHECK(nearest(s, rng.unit_direction(Dimension(3)) * 2.0) <= s.covering_radius);
  }
  SUBCASE("ellipse") {
    const EllipseShape e(Point{0.0, 0.0}, 2.0, 0.5);
    const BoundarySample s = e.boundary_sample(200, 4);
    for (int i = 0; i < 2000; ++i) {
      const double t = 2.0 * std::numbers::pi * rng.uniform();
      CHECK(nearest(s, Point{2.0 * std::cos(t), 0.5 * std::sin(t)}) <= s.covering_radius);
    }
  }
  SUBCASE("cube") {
    const BoxShape b(Point{0.0, 0.0, 0.0}, Point{1.0, 0.5, 0.25});
    const BoundarySample s = b.boundary_sample(500, 0);
    for (int i = 0; i < 2000; ++i) {
      const Point q = b.closest_boundary_point(Point{2.0 * rng.uniform() - 1.0, rng.uniform() - 0.5, 0.5 * rng.uniform() - 0.25});
      CHECK(std::abs(b.signed_distance(q)) < 1e-12);
      CHECK(nearest(s, q) <= s.covering_radius);
    }
  }
  SUBCASE("two overlapping discs") {
    const BallUnionShape u({Ball(Point{0.0, 0.0}, 1.0), Ball(Point{1.2, 0.0}, 0.8)});
    const BoundarySample s = u.boundary_sample(400, 0);
    for (const Point& p : s.points) CHECK(std::abs(u.signed_distance(p)) < 1e-12);
    int checked = 0;
    for (int i = 0; i < 4000; ++i) {
      const bool first = rng.uniform() < 0.5;
      const double t = 2.0 * std::numbers::pi * rng.uniform();
      const Point q = first ? Point{std::cos(t), std::sin(t)} : Point{1.2 + 0.8 * std::cos(t), 0.8 * std::sin(t)};
      if (u.signed_distance(q) < -1e-12) continue;
      ++checked;
      CHECK(nearest(s, q) <= s.covering_radius);
    }
    CHECK(checked > 1000);
  }
}

TEST_CASE("ellipse distance agrees with a dense parametric search") {
  const EllipseShape e(Point{0.3, -0.2}, 1.0, 2.5);
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const Point p{0.3 + 6.0 * rng.uniform() - 3.0, -0.2 + 8.0 * rng.uniform() - 4.0};
    double brute = 1e300;
    constexpr int kN = 20000;
    for (int k = 0; k < kN; ++k) {
      const double t = 2.0 * std::numbers::pi * k / kN;
      brute = std::min(brute, distance(p, Point{0.3 + std::cos(t), -0.2 + 2.5 * std::sin(t)}));
    }
    const double sd = e.signed_distance(p);
    CHECK(std::abs(sd) <= brute + 1e-12);
    CHECK(std::abs(sd) >= brute - 1e-6);
  }
}

TEST_CASE("polygon signed distance") {
  const PolygonShape tri({Point{0.0, 0.0}, Point{2.0, 0.0}, Point{0.0, 2.0}});
  CHECK(tri.signed_distance(Point{0.5, 0.5}) == doctest::Approx(-0.5));
  CHECK(tri.signed_distance(Point{-1.0, 0.5}) == doctest::Approx(1.0));
  CHECK(tri.signed_distance(Point{2.0, 2.0}) == doctest::Approx(std::numbers::sqrt2));
}

TEST_CASE("inradius never exceeds the diameter") {
  Rng rng(23);
  const Domain sq = unit_square();
  const double diam = diameter(sq).upper;
  for (int i = 0; i < 200; ++i) {
    const Point o{0.01 + 0.98 * rng.uniform(), 0.01 + 0.98 * rng.uniform()};
    CHECK(inradius_at(sq, o).upper <= diam);
  }
}

TEST_CASE("generic projection") {
  const FunctionShape f([](const Point& p) { return p.norm() - 1.0; }, Box{Point{-1.0, -1.0}, Point{1.0, 1.0}}, true);
  const Point q = f.closest_boundary_point(Point{0.3, 0.4});
  CHECK(q.norm() == doctest::Approx(1.0).epsilon(1e-9));
  const BoundarySample s = f.boundary_sample(20, 1);
  CHECK(s.points.size() == 20);
  CHECK_FALSE(s.certified());
}
