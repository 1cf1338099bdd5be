#include "sbh/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace sbh {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PlaneFrame {
  Point e1;
  Point e2;
};

// Orthonormal pair spanning a plane through the center containing x and y.
PlaneFrame plane_through(const Point& x, const Point& y) {
  const Dimension d = x.dimension();
  Point e1 = x.norm() >= y.norm() ? x : y;
  if (e1.norm() == 0.0) e1 = Point::axis(d, 0);
  e1 *= 1.0 / e1.norm();
  const Point other = x.norm() >= y.norm() ? y : x;
  Point e2 = other - e1 * dot(other, e1);
  if (e2.norm() < 1e-12 * std::max(1.0, other.norm())) {
    for (int k = 0; k < d; ++k) {
      e2 = Point::axis(d, k) - e1 * e1[k];
      if (e2.norm() > 0.5) break;
    }
  }
  e2 *= 1.0 / e2.norm();
  return {e1, e2};
}

// R(zeta) = P(x, zeta) / P(y, zeta) for the ball of radius r at the origin.
double poisson_ratio(int d, double r, const Point& x, const Point& y, const Point& zeta) {
  const double q = distance(zeta, y) / distance(zeta, x);
  return (r * r - x.norm2()) / (r * r - y.norm2()) * std::pow(q, d);
}

// Max over the circle of (A - B cos(t - al)) / (C - D cos(t - be)), using the
// stationarity condition P sin t + Q cos t + K = 0.
double max_circle_ratio(double A, double B, double al, double C, double D, double be) {
  auto f = [&](double t) { return (A - B * std::cos(t - al)) / (C - D * std::cos(t - be)); };
  const double P = B * C * std::cos(al) - A * D * std::cos(be);
  const double Q = -B * C * std::sin(al) + A * D * std::sin(be);
  const double K = B * D * std::sin(al - be);
  double best = std::max({f(al + std::numbers::pi), f(be), f(al), f(be + std::numbers::pi)});
  const double M = std::hypot(P, Q);
  if (M > 0.0) {
    const double phi = std::atan2(Q, P);
    const double s = std::clamp(-K / M, -1.0, 1.0);
    const double a = std::asin(s);
    best = std::max({best, f(a - phi), f(std::numbers::pi - a - phi)});
  }
  return best;
}

void require_in_ball(const Ball& B, const Point& x, const char* what) {
  require_same_dim(B.center, x, what);
  if (!(distance(x, B.center) < B.radius))
    throw GeometryError(fmt::format("{}: point is not inside the ball", what));
}

}  // namespace

std::string_view to_string(HarnackKind k) {
  switch (k) {
    case HarnackKind::exact:
      return "exact";
    case HarnackKind::upper_bound:
      return "upper_bound";
    case HarnackKind::oracle_estimate:
      return "oracle_estimate";
  }
  return "exact";
}

double center_distance_formula(Dimension d, double r, double rho) {
  if (!(rho >= 0.0)) throw std::domain_error("center_distance_formula: negative distance");
  if (rho >= r) return kInf;
  if (rho == 0.0) return 1.0;
  const int dd = d.value();
  const double a = (r + rho) * std::pow(r, dd - 2) / std::pow(r - rho, dd - 1);
  const double b = std::pow(r + rho, dd - 1) / ((r - rho) * std::pow(r, dd - 2));
  return std::max(a, b);
}

HarnackValue ball_center_distance(const Ball& B, const Point& x) {
  require_in_ball(B, x, "ball_center_distance");
  return {center_distance_formula(B.center.dimension(), B.radius, distance(x, B.center)), HarnackKind::exact, {}};
}

HarnackValue ball_pair_distance(const Ball& B, const Point& x, const Point& y) {
  require_in_ball(B, x, "ball_pair_distance");
  require_in_ball(B, y, "ball_pair_distance");
  const int d = B.dim();
  if (d == 1) {
    const Interval I(B.center[0] - B.radius, B.center[0] + B.radius);
    return interval_distance(I, x[0], y[0]);
  }
  if (x == y) return {1.0, HarnackKind::exact, {}};
  const Point xc = x - B.center;
  const Point yc = y - B.center;
  if (yc.norm() == 0.0) return ball_center_distance(B, x);
  if (xc.norm() == 0.0) return ball_center_distance(B, y);
  const double r = B.radius;
  const PlaneFrame fr = plane_through(xc, yc);
  const double al = std::atan2(dot(yc, fr.e2), dot(yc, fr.e1));
  const double be = std::atan2(dot(xc, fr.e2), dot(xc, fr.e1));
  const double nx = xc.norm();
  const double ny = yc.norm();
  // |zeta - y|^2 / |zeta - x|^2 on the circle and its reciprocal.
  const double f_xy = max_circle_ratio(r * r + ny * ny, 2 * r * ny, al, r * r + nx * nx, 2 * r * nx, be);
  const double f_yx = max_circle_ratio(r * r + nx * nx, 2 * r * nx, be, r * r + ny * ny, 2 * r * ny, al);
  const double px = r * r - nx * nx;
  const double py = r * r - ny * ny;
  const double r1 = px / py * std::pow(f_xy, d / 2.0);
  const double r2 = py / px * std::pow(f_yx, d / 2.0);
  return {std::max({1.0, r1, r2}), HarnackKind::exact, {}};
}

HarnackValue ball_pair_oracle(const Ball& B, const Point& x, const Point& y, std::size_t n_boundary) {
  require_in_ball(B, x, "ball_pair_oracle");
  require_in_ball(B, y, "ball_pair_oracle");
  const int d = B.dim();
  const Point xc = x - B.center;
  const Point yc = y - B.center;
  const double r = B.radius;
  double best = 1.0;
  if (d == 1) {
    for (double s : {-r, r}) {
      const Point z{s};
      best = std::max({best, poisson_ratio(1, r, xc, yc, z), poisson_ratio(1, r, yc, xc, z)});
    }
    return {best, HarnackKind::oracle_estimate, {}};
  }
  const PlaneFrame fr = plane_through(xc, yc);
  n_boundary = std::max<std::size_t>(n_boundary, 4);
  for (std::size_t k = 0; k < n_boundary; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_boundary);
    const Point z = (fr.e1 * std::cos(t) + fr.e2 * std::sin(t)) * r;
    best = std::max({best, poisson_ratio(d, r, xc, yc, z), poisson_ratio(d, r, yc, xc, z)});
  }
  return {best, HarnackKind::oracle_estimate, {}};
}

HarnackValue interval_distance(const Interval& I, double x, double y) {
  if (!(x > I.a && x < I.b && y > I.a && y < I.b))
    throw GeometryError("interval_distance: points must lie strictly inside the interval");
  const double v = std::max({(x - I.a) / (y - I.a), (y - I.a) / (x - I.a), (I.b - x) / (I.b - y), (I.b - y) / (I.b - x)});
  return {v, HarnackKind::exact, {}};
}

// ---- chains -------------------------------------------------------------------------

ChainGraph build_chain_graph(const std::function<double(const Point&)>& rho, const Box& bbox, double mesh,
                             const std::vector<Point>& specials, std::vector<std::size_t>* special_index,
                             std::size_t max_nodes) {
  if (!(mesh > 0.0)) throw std::invalid_argument("chain graph: mesh must be positive");
  const int d = bbox.dim();
  for (int i = 0; i < d; ++i)
    if (!std::isfinite(bbox.lo[i]) || !std::isfinite(bbox.hi[i])) throw std::invalid_argument("chain graph: unbounded box");
  std::vector<long> counts(d);
  double total = 1.0;
  for (int i = 0; i < d; ++i) {
    counts[i] = static_cast<long>(std::floor((bbox.hi[i] - bbox.lo[i]) / mesh)) + 1;
    total *= static_cast<double>(counts[i]);
  }
  if (total > static_cast<double>(max_nodes) * 4.0)
    throw std::invalid_argument(fmt::format("chain graph: mesh {} gives {:.0f} grid points (limit {})", mesh, total, max_nodes));

  struct Node {
    Point p;
    double rho;
    long special;
  };
  std::vector<Node> nodes;
  std::vector<long> idx(d, 0);
  for (;;) {
    Point p(Dimension{d});
    for (int i = 0; i < d; ++i) p[i] = bbox.lo[i] + static_cast<double>(idx[i]) * mesh;
    const double r = rho(p);
    if (r > 0.0) nodes.push_back({p, r, -1});
    int k = 0;
    while (k < d && ++idx[k] == counts[k]) idx[k++] = 0;
    if (k == d) break;
  }
  for (std::size_t s = 0; s < specials.size(); ++s) {
    const double r = rho(specials[s]);
    if (!(r > 0.0)) throw GeometryError("chain graph: special point is not inside the domain");
    nodes.push_back({specials[s], r, static_cast<long>(s)});
  }
  if (nodes.size() > max_nodes)
    throw std::invalid_argument(fmt::format("chain graph: {} nodes exceed the limit {}", nodes.size(), max_nodes));
  std::stable_sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return lex_less(a.p, b.p); });

  ChainGraph g;
  g.dim = Dimension(d);
  g.mesh = mesh;
  g.nodes.reserve(nodes.size());
  g.rho.reserve(nodes.size());
  if (special_index) special_index->assign(specials.size(), 0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    g.nodes.push_back(nodes[i].p);
    g.rho.push_back(nodes[i].rho);
    if (nodes[i].special >= 0 && special_index) (*special_index)[static_cast<std::size_t>(nodes[i].special)] = i;
  }
  return g;
}

std::vector<double> ChainGraph::shortest_log_distances(const std::vector<std::size_t>& sources) const {
  const std::size_t n = nodes.size();
  std::vector<double> dist(n, kInf);
  std::vector<char> done(n, 0);
  for (std::size_t s : sources) dist.at(s) = 0.0;
  for (;;) {
    std::size_t u = n;
    double best = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i] && dist[i] < best) {
        best = dist[i];
        u = i;
      }
    }
    if (u == n) break;
    done[u] = 1;
    const Point& pu = nodes[u];
    for (std::size_t v = 0; v < n; ++v) {
      if (done[v]) continue;
      const double s = distance(pu, nodes[v]);
      const double r = std::max(rho[u], rho[v]);
      if (!(s < r)) continue;
      const double w = (1.0 + kChainEps) * std::log(center_distance_formula(dim, r, s));
      if (best + w < dist[v]) dist[v] = best + w;
    }
  }
  return dist;
}

namespace {

double chain_value(double log_dist) {
  if (!std::isfinite(log_dist)) return kInf;
  // Slack for the rounding in exp.
  return std::exp(log_dist) * (1.0 + 1e-12);
}

}  // namespace

HarnackValue chain_upper_bound(const Domain& Dm, const Point& x, const Point& y, double mesh) {
  if (x == y) return {1.0, HarnackKind::upper_bound, {}};
  auto rho = [&](const Point& p) { return Dm.interior_distance(p); };
  std::vector<std::size_t> sidx;
  const ChainGraph g = build_chain_graph(rho, Dm.bounding_box(), mesh, {x, y}, &sidx);
  const std::vector<double> dist = g.shortest_log_distances({sidx[0]});
  HarnackValue hv{chain_value(dist[sidx[1]]), HarnackKind::upper_bound, {}};
  if (!std::isfinite(hv.value)) hv.diagnostic = "no chain of inscribed balls connects the two points";
  return hv;
}

std::vector<HarnackValue> chain_upper_bounds(const Domain& Dm, const Point& x, const std::vector<Point>& ys, double mesh) {
  auto rho = [&](const Point& p) { return Dm.interior_distance(p); };
  std::vector<Point> specials{x};
  specials.insert(specials.end(), ys.begin(), ys.end());
  std::vector<std::size_t> sidx;
  const ChainGraph g = build_chain_graph(rho, Dm.bounding_box(), mesh, specials, &sidx);
  const std::vector<double> dist = g.shortest_log_distances({sidx[0]});
  std::vector<HarnackValue> out;
  out.reserve(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (ys[i] == x) {
      out.push_back({1.0, HarnackKind::upper_bound, {}});
      continue;
    }
    HarnackValue hv{chain_value(dist[sidx[i + 1]]), HarnackKind::upper_bound, {}};
    if (!std::isfinite(hv.value)) hv.diagnostic = "no chain of inscribed balls connects the two points";
    out.push_back(std::move(hv));
  }
  return out;
}

HarnackValue punctured_sup_distance(const NestedPair& pair, double R, double mesh, std::size_t n_boundary) {
  const Domain& D = pair.inner;
  const Domain& G = pair.outer;
  const Point& o = pair.base;
  if (!(R > 0.0)) throw std::invalid_argument("punctured_sup_distance: R must be positive");
  const int d = D.dim();

  if (d == 1) {
    // G minus o splits into two intervals; x and its comparison point lie in
    // the same piece.
    const Box gb = G.bounding_box();
    const Box db = D.bounding_box();
    double worst = 1.0;
    for (double x : {db.lo[0], db.hi[0]}) {
      if (x == o[0]) return {kInf, HarnackKind::exact, "boundary point coincides with the puncture"};
      const bool right = x > o[0];
      const Interval piece = right ? Interval(o[0], gb.hi[0]) : Interval(gb.lo[0], o[0]);
      const double y = right ? o[0] + R : o[0] - R;
      worst = std::max(worst, interval_distance(piece, x, y).value);
    }
    return {worst, HarnackKind::exact, {}};
  }

  if (const Ball* b = D.as_ball(); b && b->center == o && R == b->radius) {
    return {1.0, HarnackKind::exact, {}};
  }

  auto rho = [&](const Point& p) { return std::min(G.interior_distance(p), distance(p, o)); };
  const BoundarySample xs = boundary_sample(D, n_boundary, 0);
  if (!xs.certified()) return {kInf, HarnackKind::upper_bound, "boundary sample of D has no certified covering radius"};
  const BoundarySample ys = boundary_sample(Ball(o, R), n_boundary, 0);
  std::vector<Point> specials = xs.points;
  specials.insert(specials.end(), ys.points.begin(), ys.points.end());
  std::vector<std::size_t> sidx;
  const ChainGraph g = build_chain_graph(rho, G.bounding_box(), mesh, specials, &sidx);
  const std::vector<std::size_t> sources(sidx.begin() + static_cast<long>(xs.points.size()), sidx.end());
  const std::vector<double> dist = g.shortest_log_distances(sources);

  double worst = 1.0;
  for (std::size_t i = 0; i < xs.points.size(); ++i) {
    const std::size_t node = sidx[i];
    const double local = center_distance_formula(Dimension(d), g.rho[node], xs.covering_radius);
    const double v = chain_value(dist[node]) * local;
    if (!std::isfinite(v)) {
      return {kInf, HarnackKind::upper_bound,
              fmt::format("no certified chain from boundary sample {} (rho {:.3g}, covering radius {:.3g})", i, g.rho[node],
                          xs.covering_radius)};
    }
    worst = std::max(worst, v);
  }
  return {worst, HarnackKind::upper_bound, {}};
}

}  // namespace sbh
