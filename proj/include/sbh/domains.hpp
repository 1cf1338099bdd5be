#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sbh/bound.hpp"
#include "sbh/point.hpp"

namespace sbh {

inline constexpr double kGeoEpsAnalytic = 1e-9;
inline constexpr double kGeoEpsSdf = 1e-6;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NestingError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// Open interval (a, b) of the real line.
struct Interval {
  double a;
  double b;

  Interval(double a_, double b_) : a(a_), b(b_) {
    if (!(a < b)) throw std::invalid_argument("Interval requires a < b");
  }
};

/// Open ball B_center(radius).
struct Ball {
  Point center;
  double radius;

  Ball(Point c, double r) : center(c), radius(r) {
    if (!(r > 0.0)) throw std::invalid_argument("Ball requires a positive radius");
  }
  int dim() const { return center.dim(); }
};

/// Points on a boundary together with a covering radius: every boundary point
/// lies within covering_radius of some sample. An infinite covering radius
/// means the sample is not certified.
struct BoundarySample {
  std::vector<Point> points;
  double covering_radius = std::numeric_limits<double>::infinity();

  bool certified() const { return covering_radius < std::numeric_limits<double>::infinity(); }
};

/// Bounded domain described by a signed distance function: negative inside,
/// positive outside, zero on the boundary.
class SdfShape {
 public:
  virtual ~SdfShape() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual double signed_distance(const Point& p) const = 0;
  virtual Box bounding_box() const = 0;

  /// Whether |signed_distance| equals the Euclidean distance to the boundary.
  /// When false it is only a lower bound for interior points.
  virtual bool exact_distance() const { return true; }

  /// Nearest boundary point (generic version: gradient projection onto the
  /// zero level set; throws GeometryError naming the point on failure).
  virtual Point closest_boundary_point(const Point& p) const;

  /// Boundary sample of roughly n points. The generic version projects a
  /// deterministic point cloud and is not certified.
  virtual BoundarySample boundary_sample(std::size_t n, std::uint64_t seed) const;
};

/// Axis-aligned box, d = 2 or 3.
class BoxShape final : public SdfShape {
 public:
  BoxShape(Point center, Point half_extents);
  std::string name() const override { return "box"; }
  int dim() const override { return center_.dim(); }
  double signed_distance(const Point& p) const override;
  Box bounding_box() const override;
  Point closest_boundary_point(const Point& p) const override;
  BoundarySample boundary_sample(std::size_t n, std::uint64_t seed) const override;

  const Point& center() const { return center_; }
  const Point& half_extents() const { return half_; }

 private:
  Point center_;
  Point half_;
};

/// Axis-aligned ellipse in the plane; exact distance by bisection on the
/// Lagrange multiplier of the nearest-point problem.
class EllipseShape final : public SdfShape {
 public:
  EllipseShape(Point center, double semi_x, double semi_y);
  std::string name() const override { return "ellipse"; }
  int dim() const override { return 2; }
  double signed_distance(const Point& p) const override;
  Box bounding_box() const override;
  Point closest_boundary_point(const Point& p) const override;
  BoundarySample boundary_sample(std::size_t n, std::uint64_t seed) const override;

  const Point& center() const { return center_; }
  double semi_x() const { return ax_; }
  double semi_y() const { return ay_; }

 private:
  Point center_;
  double ax_;
  double ay_;
};

/// Union of balls, d = 2 or 3. The signed distance min_i(|p - c_i| - r_i) is
/// exact outside and a lower bound on the interior depth.
class BallUnionShape final : public SdfShape {
 public:
  explicit BallUnionShape(std::vector<Ball> balls);
  std::string name() const override { return "union_of_balls"; }
  int dim() const override { return balls_.front().dim(); }
  double signed_distance(const Point& p) const override;
  Box bounding_box() const override;
  bool exact_distance() const override { return balls_.size() == 1; }
  Point closest_boundary_point(const Point& p) const override;
  BoundarySample boundary_sample(std::size_t n, std::uint64_t seed) const override;

  const std::vector<Ball>& balls() const { return balls_; }

 private:
  std::vector<Ball> balls_;
};

/// Simple polygon in the plane (vertices in order, either orientation).
class PolygonShape final : public SdfShape {
 public:
  explicit PolygonShape(std::vector<Point> vertices);
  std::string name() const override { return "polygon"; }
  int dim() const override { return 2; }
  double signed_distance(const Point& p) const override;
  Box bounding_box() const override;
  Point closest_boundary_point(const Point& p) const override;
  BoundarySample boundary_sample(std::size_t n, std::uint64_t seed) const override;

  const std::vector<Point>& vertices() const { return vertices_; }

 private:
  std::vector<Point> vertices_;
};

/// User-supplied signed distance function (uncertified sampling).
class FunctionShape final : public SdfShape {
 public:
  FunctionShape(std::function<double(const Point&)> sdf, Box bbox, bool exact = false)
      : sdf_(std::move(sdf)), bbox_(std::move(bbox)), exact_(exact) {}
  std::string name() const override { return "function"; }
  int dim() const override { return bbox_.dim(); }
  double signed_distance(const Point& p) const override { return sdf_(p); }
  Box bounding_box() const override { return bbox_; }
  bool exact_distance() const override { return exact_; }

 private:
  std::function<double(const Point&)> sdf_;
  Box bbox_;
  bool exact_;
};

struct SdfDomain {
  std::shared_ptr<const SdfShape> shape;
  double eps_geo = kGeoEpsSdf;
};

/// A bounded domain: an interval, a ball, or a signed-distance domain.
class Domain {
 public:
  Domain(Interval i) : v_(i) {}  // NOLINT(google-explicit-constructor)
  Domain(Ball b) : v_(std::move(b)) {}  // NOLINT(google-explicit-constructor)
  Domain(SdfDomain s);  // NOLINT(google-explicit-constructor)

  int dim() const;
  Dimension dimension() const { return Dimension(dim()); }

  double signed_distance(const Point& p) const;
  /// Lower bound on dist(p, boundary) for p inside (exact when exact_distance()).
  double interior_distance(const Point& p) const { return -signed_distance(p); }
  bool exact_distance() const;

  bool contains(const Point& p) const { return signed_distance(p) < 0.0; }
  bool closure_contains(const Point& p) const { return signed_distance(p) <= eps_geo(); }

  double eps_geo() const;
  Box bounding_box() const;
  Point closest_boundary_point(const Point& p) const;

  const Interval* as_interval() const { return std::get_if<Interval>(&v_); }
  const Ball* as_ball() const { return std::get_if<Ball>(&v_); }
  const SdfDomain* as_sdf() const { return std::get_if<SdfDomain>(&v_); }

  std::string describe() const;

 private:
  std::variant<Interval, Ball, SdfDomain> v_;
};

/// D with base point o inside a larger domain G: o in D, closure(D) in G.
struct NestedPair {
  Domain inner;
  Domain outer;
  Point base;

  /// Throws GeometryError if o is not in D, NestingError if closure(D) is
  /// not contained in G.
  void validate() const;
};

/// Euclidean diameter; exact for balls and intervals. For signed-distance
/// domains: lower = diameter of a dense boundary sample, upper = lower plus
/// twice the covering radius, capped by the bounding-box diagonal.
Bracket diameter(const Domain& D);

/// dist(o, boundary of D). Throws GeometryError if o is not in D.
Bracket inradius_at(const Domain& D, const Point& o);

/// dist(D, complement of G). Throws NestingError when it is not positive.
Bracket gap(const NestedPair& pair);

/// n points on the boundary of D, deterministic for a fixed seed. Intervals
/// always return their two endpoints.
BoundarySample boundary_sample(const Domain& D, std::size_t n, std::uint64_t seed);

}  // namespace sbh
