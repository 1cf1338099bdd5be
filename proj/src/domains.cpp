#include "sbh/domains.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <fmt/format.h>

#include "sbh/random.hpp"

namespace sbh {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_point(const Point& p) {
  std::string s = "(";
  for (int i = 0; i < p.dim(); ++i) s += fmt::format("{}{:.17g}", i ? ", " : "", p[i]);
  return s + ")";
}

double phase_of(std::uint64_t seed, std::uint64_t stream) {
  if (seed == 0) return 0.0;
  Rng rng(derive_seed(seed, stream));
  return rng.uniform();
}

// Samples the segment [a, b] with spacing at most h, including a but not b.
void sample_segment(const Point& a, const Point& b, double h, std::vector<Point>& out) {
  const double len = distance(a, b);
  const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / h)));
  for (std::size_t i = 0; i < k; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(k);
    out.push_back(a + (b - a) * t);
  }
}

Point segment_closest(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double l2 = ab.norm2();
  double t = l2 > 0.0 ? dot(p - a, ab) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return a + ab * t;
}

Point numeric_gradient(const SdfShape& s, const Point& p, double h) {
  Point g(p.dimension());
  for (int i = 0; i < p.dim(); ++i) {
    Point a = p;
    Point b = p;
    a[i] += h;
    b[i] -= h;
    g[i] = (s.signed_distance(a) - s.signed_distance(b)) / (2.0 * h);
  }
  return g;
}

}  // namespace

// ---- generic SdfShape ------------------------------------------------------

Point SdfShape::closest_boundary_point(const Point& p) const {
  const double scale = std::max(1.0, bounding_box().diagonal());
  const double h = 1e-7 * scale;
  Point q = p;
  for (int iter = 0; iter < 64; ++iter) {
    const double s = signed_distance(q);
    if (std::abs(s) <= 1e-12 * scale) return q;
    const Point g = numeric_gradient(*this, q, h);
    const double g2 = g.norm2();
    if (g2 < 1e-24) break;
    q -= g * (s / g2);
  }
  if (std::abs(signed_distance(q)) <= kGeoEpsSdf * scale) return q;
  throw GeometryError(fmt::format("{}: projection onto the boundary failed from {}", name(), fmt_point(p)));
}

BoundarySample SdfShape::boundary_sample(std::size_t n, std::uint64_t seed) const {
  const Box bb = bounding_box();
  const Dimension d(dim());
  Rng rng(derive_seed(seed, 0xB0));
  BoundarySample out;
  out.points.reserve(n);
  std::size_t attempts = 0;
  while (out.points.size() < n && attempts < 20 * n + 100) {
    ++attempts;
    Point p(d);
    for (int i = 0; i < d; ++i) p[i] = bb.lo[i] + (bb.hi[i] - bb.lo[i]) * rng.uniform();
    try {
      out.points.push_back(closest_boundary_point(p));
    } catch (const GeometryError&) {
    }
  }
  out.covering_radius = kInf;
  return out;
}

// ---- box ---------------------------------------------------------------------

BoxShape::BoxShape(Point center, Point half_extents) : center_(center), half_(half_extents) {
  require_same_dim(center, half_extents, "BoxShape");
  if (center.dim() < 2 || center.dim() > 3) throw std::invalid_argument("BoxShape: d must be 2 or 3");
  for (int i = 0; i < center.dim(); ++i)
    if (!(half_[i] > 0.0)) throw std::invalid_argument("BoxShape: half extents must be positive");
}

double BoxShape::signed_distance(const Point& p) const {
  double outside2 = 0.0;
  double inside = -kInf;
  for (int i = 0; i < dim(); ++i) {
    const double q = std::abs(p[i] - center_[i]) - half_[i];
    if (q > 0.0) outside2 += q * q;
    inside = std::max(inside, q);
  }
  return std::sqrt(outside2) + std::min(inside, 0.0);
}

Box BoxShape::bounding_box() const { return {center_ - half_, center_ + half_}; }

Point BoxShape::closest_boundary_point(const Point& p) const {
  Point q = p;
  if (signed_distance(p) > 0.0) {
    for (int i = 0; i < dim(); ++i) q[i] = std::clamp(p[i], center_[i] - half_[i], center_[i] + half_[i]);
    return q;
  }
  int best = 0;
  double slack = kInf;
  for (int i = 0; i < dim(); ++i) {
    const double s = half_[i] - std::abs(p[i] - center_[i]);
    if (s < slack) {
      slack = s;
      best = i;
    }
  }
  q[best] = center_[best] + (p[best] >= center_[best] ? half_[best] : -half_[best]);
  return q;
}

BoundarySample BoxShape::boundary_sample(std::size_t n, std::uint64_t /*seed*/) const {
  BoundarySample out;
  const Point lo = center_ - half_;
  const Point hi = center_ + half_;
  if (dim() == 2) {
    const double perimeter = 4.0 * (half_[0] + half_[1]);
    const double h = perimeter / static_cast<double>(std::max<std::size_t>(n, 4));
    const Point c[4] = {lo, Point{hi[0], lo[1]}, hi, Point{lo[0], hi[1]}};
    for (int k = 0; k < 4; ++k) sample_segment(c[k], c[(k + 1) % 4], h, out.points);
    out.covering_radius = h / 2.0;
    return out;
  }
  const double area = 8.0 * (half_[0] * half_[1] + half_[1] * half_[2] + half_[0] * half_[2]);
  const double h = std::sqrt(area / static_cast<double>(std::max<std::size_t>(n, 6)));
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    const auto nu = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2.0 * half_[u] / h)));
    const auto nv = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2.0 * half_[v] / h)));
    for (double side : {lo[axis], hi[axis]}) {
      for (std::size_t i = 0; i <= nu; ++i) {
        for (std::size_t j = 0; j <= nv; ++j) {
          Point p(Dimension(3));
          p[axis] = side;
          p[u] = lo[u] + 2.0 * half_[u] * static_cast<double>(i) / static_cast<double>(nu);
          p[v] = lo[v] + 2.0 * half_[v] * static_cast<double>(j) / static_cast<double>(nv);
          out.points.push_back(p);
        }
      }
    }
  }
  // Each face cell has sides <= h, so its points are within h/sqrt(2) of a corner.
  out.covering_radius = h / std::numbers::sqrt2;
  return out;
}

// ---- ellipse -------------------------------------------------------------------

EllipseShape::EllipseShape(Point center, double semi_x, double semi_y)
    : center_(center), ax_(semi_x), ay_(semi_y) {
  if (center.dim() != 2) throw std::invalid_argument("EllipseShape: d must be 2");
  if (!(ax_ > 0.0 && ay_ > 0.0)) throw std::invalid_argument("EllipseShape: semi-axes must be positive");
}

namespace {

// Nearest point on the ellipse (x/e0)^2 + (y/e1)^2 = 1 (e0 >= e1) to (y0, y1)
// with y0, y1 >= 0.
std::pair<double, double> ellipse_nearest_quadrant(double e0, double e1, double y0, double y1) {
  if (y1 > 0.0) {
    if (y0 > 0.0) {
      auto F = [&](double t) {
        const double a = e0 * y0 / (t + e0 * e0);
        const double b = e1 * y1 / (t + e1 * e1);
        return a * a + b * b - 1.0;
      };
      double lo = -e1 * e1 + e1 * y1;
      double hi = -e1 * e1 + std::hypot(e0 * y0, e1 * y1);
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (F(mid) > 0.0)
          lo = mid;
        else
          hi = mid;
      }
      const double t = 0.5 * (lo + hi);
      return {e0 * e0 * y0 / (t + e0 * e0), e1 * e1 * y1 / (t + e1 * e1)};
    }
    return {0.0, e1};
  }
  const double num = e0 * e0 - e1 * e1;
  if (y0 < num / e0) {
    const double x0 = e0 * e0 * y0 / num;
    const double r = x0 / e0;
    return {x0, e1 * std::sqrt(std::max(0.0, 1.0 - r * r))};
  }
  return {e0, 0.0};
}

}  // namespace

Point EllipseShape::closest_boundary_point(const Point& p) const {
  const bool swap = ax_ < ay_;
  const double e0 = swap ? ay_ : ax_;
  const double e1 = swap ? ax_ : ay_;
  double y0 = p[0] - center_[0];
  double y1 = p[1] - center_[1];
  if (swap) std::swap(y0, y1);
  auto [x0, x1] = ellipse_nearest_quadrant(e0, e1, std::abs(y0), std::abs(y1));
  x0 = std::copysign(x0, y0);
  x1 = std::copysign(x1, y1);
  if (swap) std::swap(x0, x1);
  return Point{center_[0] + x0, center_[1] + x1};
}

double EllipseShape::signed_distance(const Point& p) const {
  const double dx = (p[0] - center_[0]) / ax_;
  const double dy = (p[1] - center_[1]) / ay_;
  const double dist = distance(p, closest_boundary_point(p));
  return dx * dx + dy * dy < 1.0 ? -dist : dist;
}

Box EllipseShape::bounding_box() const {
  return {center_ - Point{ax_, ay_}, center_ + Point{ax_, ay_}};
}

BoundarySample EllipseShape::boundary_sample(std::size_t n, std::uint64_t seed) const {
  n = std::max<std::size_t>(n, 8);
  BoundarySample out;
  out.points.reserve(n);
  const double step = 2.0 * kPi / static_cast<double>(n);
  const double phase = phase_of(seed, 1) * step;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = phase + step * static_cast<double>(k);
    out.points.push_back(Point{center_[0] + ax_ * std::cos(t), center_[1] + ay_ * std::sin(t)});
  }
  // |d/dt (a cos t, b sin t)| <= max(a, b); half a parameter step reaches any point.
  out.covering_radius = std::max(ax_, ay_) * step / 2.0;
  return out;
}

// ---- union of balls -------------------------------------------------------------------

BallUnionShape::BallUnionShape(std::vector<Ball> balls) : balls_(std::move(balls)) {
  if (balls_.empty()) throw std::invalid_argument("BallUnionShape: at least one ball required");
  const int d = balls_.front().dim();
  if (d < 2 || d > 3) throw std::invalid_argument("BallUnionShape: d must be 2 or 3");
  for (const Ball& b : balls_)
    if (b.dim() != d) throw std::invalid_argument("BallUnionShape: dimension mismatch");
}

double BallUnionShape::signed_distance(const Point& p) const {
  double s = kInf;
  for (const Ball& b : balls_) s = std::min(s, distance(p, b.center) - b.radius);
  return s;
}

Box BallUnionShape::bounding_box() const {
  Point lo = balls_.front().center;
  Point hi = lo;
  for (const Ball& b : balls_) {
    for (int i = 0; i < b.dim(); ++i) {
      lo[i] = std::min(lo[i], b.center[i] - b.radius);
      hi[i] = std::max(hi[i], b.center[i] + b.radius);
    }
  }
  return {lo, hi};
}

Point BallUnionShape::closest_boundary_point(const Point& p) const {
  if (signed_distance(p) >= 0.0 || balls_.size() == 1) {
    std::size_t best = 0;
    double s = kInf;
    for (std::size_t i = 0; i < balls_.size(); ++i) {
      const double v = distance(p, balls_[i].center) - balls_[i].radius;
      if (v < s) {
        s = v;
        best = i;
      }
    }
    const Ball& b = balls_[best];
    Point dir = p - b.center;
    const double n = dir.norm();
    if (n == 0.0) return b.center + Point::axis(p.dimension(), 0, b.radius);
    return b.center + dir * (b.radius / n);
  }
  // Interior point: the nearest boundary point lies on the radial projection
  // onto some sphere that is not covered by another ball.
  Point best_q = p;
  double best = kInf;
  for (const Ball& b : balls_) {
    Point dir = p - b.center;
    const double n = dir.norm();
    const Point q = n == 0.0 ? b.center + Point::axis(p.dimension(), 0, b.radius) : b.center + dir * (b.radius / n);
    if (signed_distance(q) < -1e-12) continue;
    const double dq = distance(p, q);
    if (dq < best) {
      best = dq;
      best_q = q;
    }
  }
  if (best < kInf) return best_q;
  return SdfShape::closest_boundary_point(p);
}

BoundarySample BallUnionShape::boundary_sample(std::size_t n, std::uint64_t seed) const {
  BoundarySample out;
  const int d = dim();
  if (d == 2) {
    // Exposed arcs of each circle: split at intersection angles, keep pieces
    // whose midpoint is outside every other disc.
    struct Arc {
      std::size_t ball;
      double t0;
      double t1;
    };
    std::vector<Arc> arcs;
    double total = 0.0;
    for (std::size_t i = 0; i < balls_.size(); ++i) {
      const Ball& bi = balls_[i];
      std::vector<double> cuts{0.0, 2.0 * kPi};
      for (std::size_t j = 0; j < balls_.size(); ++j) {
        if (j == i) continue;
        const Ball& bj = balls_[j];
        const Point dc = bj.center - bi.center;
        const double L = dc.norm();
        if (L == 0.0 || L >= bi.radius + bj.radius || L <= std::abs(bi.radius - bj.radius)) continue;
        const double base = std::atan2(dc[1], dc[0]);
        const double c = (bi.radius * bi.radius + L * L - bj.radius * bj.radius) / (2.0 * bi.radius * L);
        const double w = std::acos(std::clamp(c, -1.0, 1.0));
        for (double t : {base - w, base + w}) {
          double u = std::fmod(t, 2.0 * kPi);
          if (u < 0.0) u += 2.0 * kPi;
          cuts.push_back(u);
        }
      }
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double t0 = cuts[k];
        const double t1 = cuts[k + 1];
        if (t1 - t0 <= 0.0) continue;
        const double tm = 0.5 * (t0 + t1);
        const Point m = bi.center + Point{std::cos(tm), std::sin(tm)} * bi.radius;
        bool covered = false;
        for (std::size_t j = 0; j < balls_.size() && !covered; ++j)
          if (j != i && distance(m, balls_[j].center) < balls_[j].radius) covered = true;
        if (covered) continue;
        arcs.push_back({i, t0, t1});
        total += bi.radius * (t1 - t0);
      }
    }
    const double h = total / static_cast<double>(std::max<std::size_t>(n, 8));
    for (const Arc& a : arcs) {
      const Ball& b = balls_[a.ball];
      const double len = b.radius * (a.t1 - a.t0);
      const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / h)));
      for (std::size_t s = 0; s <= k; ++s) {
        const double t = a.t0 + (a.t1 - a.t0) * static_cast<double>(s) / static_cast<double>(k);
        out.points.push_back(b.center + Point{std::cos(t), std::sin(t)} * b.radius);
      }
    }
    out.covering_radius = h / 2.0;
    return out;
  }

  // d = 3: latitude rings on each sphere. Certified only when the spheres do
  // not overlap (then every sphere is fully exposed).
  bool disjoint = true;
  for (std::size_t i = 0; i < balls_.size(); ++i)
    for (std::size_t j = i + 1; j < balls_.size(); ++j)
      if (distance(balls_[i].center, balls_[j].center) < balls_[i].radius + balls_[j].radius) disjoint = false;
  const std::size_t per = std::max<std::size_t>(n / balls_.size(), 16);
  double cover = 0.0;
  for (std::size_t i = 0; i < balls_.size(); ++i) {
    const BoundarySample s = sbh::boundary_sample(Domain(balls_[i]), per, seed == 0 ? 0 : derive_seed(seed, i));
    cover = std::max(cover, s.covering_radius);
    for (const Point& p : s.points) {
      if (!disjoint && signed_distance(p) < -1e-12) continue;
      out.points.push_back(p);
    }
  }
  out.covering_radius = disjoint ? cover : kInf;
  return out;
}

// ---- polygon -------------------------------------------------------------------------

PolygonShape::PolygonShape(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw std::invalid_argument("PolygonShape: at least three vertices required");
  for (const Point& v : vertices_)
    if (v.dim() != 2) throw std::invalid_argument("PolygonShape: vertices must be 2-D");
}

double PolygonShape::signed_distance(const Point& p) const {
  double dist = kInf;
  bool inside = false;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = vertices_[j];
    const Point& b = vertices_[i];
    dist = std::min(dist, distance(p, segment_closest(p, a, b)));
    if ((b[1] > p[1]) != (a[1] > p[1])) {
      const double x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
      if (p[0] < x) inside = !inside;
    }
  }
  return inside ? -dist : dist;
}

Box PolygonShape::bounding_box() const {
  Point lo = vertices_.front();
  Point hi = lo;
  for (const Point& v : vertices_) {
    lo[0] = std::min(lo[0], v[0]);
    lo[1] = std::min(lo[1], v[1]);
    hi[0] = std::max(hi[0], v[0]);
    hi[1] = std::max(hi[1], v[1]);
  }
  return {lo, hi};
}

Point PolygonShape::closest_boundary_point(const Point& p) const {
  Point best = vertices_.front();
  double bd = kInf;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point q = segment_closest(p, vertices_[j], vertices_[i]);
    const double dq = distance(p, q);
    if (dq < bd) {
      bd = dq;
      best = q;
    }
  }
  return best;
}

BoundarySample PolygonShape::boundary_sample(std::size_t n, std::uint64_t /*seed*/) const {
  double perimeter = 0.0;
  const std::size_t m = vertices_.size();
  for (std::size_t i = 0; i < m; ++i) perimeter += distance(vertices_[i], vertices_[(i + 1) % m]);
  const double h = perimeter / static_cast<double>(std::max(n, m));
  BoundarySample out;
  for (std::size_t i = 0; i < m; ++i) sample_segment(vertices_[i], vertices_[(i + 1) % m], h, out.points);
  out.covering_radius = h / 2.0;
  return out;
}

// ---- Domain -----------------------------------------------------------------------------

Domain::Domain(SdfDomain s) : v_(std::move(s)) {
  if (!std::get<SdfDomain>(v_).shape) throw std::invalid_argument("SdfDomain: null shape");
}

int Domain::dim() const {
  if (as_interval()) return 1;
  if (const Ball* b = as_ball()) return b->dim();
  return as_sdf()->shape->dim();
}

double Domain::signed_distance(const Point& p) const {
  if (const Interval* i = as_interval()) return std::max(i->a - p[0], p[0] - i->b);
  if (const Ball* b = as_ball()) return distance(p, b->center) - b->radius;
  return as_sdf()->shape->signed_distance(p);
}

bool Domain::exact_distance() const {
  if (const SdfDomain* s = as_sdf()) return s->shape->exact_distance();
  return true;
}

double Domain::eps_geo() const {
  if (const SdfDomain* s = as_sdf()) return s->eps_geo;
  return kGeoEpsAnalytic;
}

Box Domain::bounding_box() const {
  if (const Interval* i = as_interval()) return {Point{i->a}, Point{i->b}};
  if (const Ball* b = as_ball()) {
    Point r(b->center.dimension());
    for (int k = 0; k < r.dim(); ++k) r[k] = b->radius;
    return {b->center - r, b->center + r};
  }
  return as_sdf()->shape->bounding_box();
}

Point Domain::closest_boundary_point(const Point& p) const {
  if (const Interval* i = as_interval()) return Point{p[0] - i->a <= i->b - p[0] ? i->a : i->b};
  if (const Ball* b = as_ball()) {
    const Point dir = p - b->center;
    const double n = dir.norm();
    if (n == 0.0) return b->center + Point::axis(p.dimension(), 0, b->radius);
    return b->center + dir * (b->radius / n);
  }
  return as_sdf()->shape->closest_boundary_point(p);
}

std::string Domain::describe() const {
  if (const Interval* i = as_interval()) return fmt::format("interval({:.17g}, {:.17g})", i->a, i->b);
  if (const Ball* b = as_ball()) return fmt::format("ball(center={}, radius={:.17g})", fmt_point(b->center), b->radius);
  return fmt::format("sdf({})", as_sdf()->shape->name());
}

// ---- geometric quantities ---------------------------------------------------------------

namespace {

std::size_t default_diameter_sample(int d) { return d == 2 ? 4096 : 2048; }

// Certified gap of D = ball inside an arbitrary G.
std::optional<Bracket> ball_gap(const Ball& b, const Domain& G) {
  if (const Ball* g = G.as_ball()) {
    const double v = g->radius - distance(b.center, g->center) - b.radius;
    return Bracket::exact(v);
  }
  if (G.exact_distance()) {
    const double v = G.interior_distance(b.center) - b.radius;
    return Bracket::exact(v);
  }
  return std::nullopt;
}

}  // namespace

void NestedPair::validate() const {
  if (inner.dim() != outer.dim() || inner.dim() != base.dim())
    throw GeometryError("nested pair: dimension mismatch");
  if (!inner.contains(base)) throw GeometryError(fmt::format("base point {} is not inside D", fmt_point(base)));
  const Bracket g = gap(*this);
  if (!(g.upper > 0.0)) throw NestingError("closure of D is not contained in G");
}

Bracket diameter(const Domain& D) {
  if (const Interval* i = D.as_interval()) return Bracket::exact(i->b - i->a);
  if (const Ball* b = D.as_ball()) return Bracket::exact(2.0 * b->radius);
  const BoundarySample s = boundary_sample(D, default_diameter_sample(D.dim()), 0);
  double L = 0.0;
  for (std::size_t i = 0; i < s.points.size(); ++i)
    for (std::size_t j = i + 1; j < s.points.size(); ++j) L = std::max(L, distance(s.points[i], s.points[j]));
  const double cap = D.bounding_box().diagonal();
  return {L, std::min(L + 2.0 * s.covering_radius, cap)};
}

Bracket inradius_at(const Domain& D, const Point& o) {
  if (!D.contains(o)) throw GeometryError(fmt::format("point {} is not inside {}", fmt_point(o), D.describe()));
  const double lower = D.interior_distance(o);
  if (D.exact_distance()) return Bracket::exact(lower);
  const BoundarySample s = boundary_sample(D, 4096, 0);
  double upper = kInf;
  for (const Point& p : s.points) upper = std::min(upper, distance(o, p));
  return {lower, std::max(lower, upper)};
}

Bracket gap(const NestedPair& pair) {
  const Domain& D = pair.inner;
  const Domain& G = pair.outer;
  if (const Interval* i = D.as_interval()) {
    const double v = std::min(i->a - G.bounding_box().lo[0], G.bounding_box().hi[0] - i->b);
    if (G.as_interval() || G.as_ball()) return Bracket::exact(v);
  }
  if (const Ball* b = D.as_ball()) {
    if (b->dim() == 1) {
      const Box g = G.bounding_box();
      return Bracket::exact(std::min(b->center[0] - b->radius - g.lo[0], g.hi[0] - b->center[0] - b->radius));
    }
    if (auto v = ball_gap(*b, G)) return *v;
  }
  const BoundarySample s = boundary_sample(D, default_diameter_sample(D.dim()), 0);
  double m = kInf;
  for (const Point& p : s.points) {
    const double v = G.interior_distance(p);
    if (!(v > 0.0)) throw NestingError(fmt::format("boundary point {} of D is not inside G", fmt_point(p)));
    m = std::min(m, v);
  }
  // interior_distance is a lower bound on dist(p, boundary of G); each such
  // lower bound minus the covering radius bounds the gap from below.
  const double lower = m - s.covering_radius;
  if (G.exact_distance()) return {lower, m};
  return Bracket::unbounded_above(lower);
}

BoundarySample boundary_sample(const Domain& D, std::size_t n, std::uint64_t seed) {
  BoundarySample out;
  if (const Interval* i = D.as_interval()) {
    out.points = {Point{i->a}, Point{i->b}};
    out.covering_radius = 0.0;
    return out;
  }
  if (const Ball* b = D.as_ball()) {
    const int d = b->dim();
    if (d == 1) {
      out.points = {b->center - Point{b->radius}, b->center + Point{b->radius}};
      out.covering_radius = 0.0;
      return out;
    }
    if (d == 2) {
      n = std::max<std::size_t>(n, 8);
      const double step = 2.0 * kPi / static_cast<double>(n);
      const double phase = phase_of(seed, 2) * step;
      out.points.reserve(n);
      for (std::size_t k = 0; k < n; ++k) {
        const double t = phase + step * static_cast<double>(k);
        out.points.push_back(b->center + Point{std::cos(t), std::sin(t)} * b->radius);
      }
      out.covering_radius = 2.0 * b->radius * std::sin(step / 4.0);
      return out;
    }
    if (d == 3) {
      // Latitude rings at theta_i = (i + 1/2) pi / m with ring sizes
      // proportional to sin(theta_i).
      n = std::max<std::size_t>(n, 16);
      const auto m = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(std::sqrt(kPi * static_cast<double>(n) / 4.0))));
      std::vector<double> th(m);
      double ssum = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        th[i] = (static_cast<double>(i) + 0.5) * kPi / static_cast<double>(m);
        ssum += std::sin(th[i]);
      }
      double arc = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const auto ni = std::max<std::size_t>(3, static_cast<std::size_t>(std::lround(static_cast<double>(n) * std::sin(th[i]) / ssum)));
        const double step = 2.0 * kPi / static_cast<double>(ni);
        const double phase = (seed == 0 ? 0.5 : phase_of(seed, 100 + i)) * step;
        for (std::size_t k = 0; k < ni; ++k) {
          const double ph = phase + step * static_cast<double>(k);
          out.points.push_back(b->center + Point{std::sin(th[i]) * std::cos(ph), std::sin(th[i]) * std::sin(ph), std::cos(th[i])} * b->radius);
        }
        arc = std::max(arc, kPi / (2.0 * static_cast<double>(m)) + std::sin(th[i]) * step / 2.0);
      }
      // Meridian move to the nearest ring, then along it; chord <= arc.
      out.covering_radius = b->radius * arc;
      return out;
    }
    throw std::invalid_argument("boundary_sample: balls supported for d <= 3");
  }
  return D.as_sdf()->shape->boundary_sample(n, seed);
}

}  // namespace sbh
