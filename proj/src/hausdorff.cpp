#include "sbh/hausdorff.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fmt/format.h>

#include "sbh/kernel.hpp"
#include "sbh/quadrature.hpp"

namespace sbh {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double tanh_sinh_integral(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, a, b, 1e-12);
}

// ---- smallest enclosing ball (Welzl, loop form) ----

struct Sphere {
  Point c;
  double r2 = -1.0;  // empty ball
};

bool inside(const Sphere& s, const Point& p) {
  if (s.r2 < 0.0) return false;
  return (p - s.c).norm2() <= s.r2 * (1.0 + 1e-12) + 1e-300;
}

// Smallest ball with all of R on its boundary, inside the affine hull of R.
Sphere circumsphere(const std::vector<Point>& R) {
  if (R.empty()) return {};
  const Point& p0 = R[0];
  const int k = static_cast<int>(R.size()) - 1;
  if (k == 0) return {p0, 0.0};
  // Gram system 2 (p_i - p0).(p_j - p0) lam_j = |p_i - p0|^2.
  std::vector<Point> v;
  for (int i = 1; i <= k; ++i) v.push_back(R[i] - p0);
  std::vector<double> A(k * k), b(k);
  for (int i = 0; i < k; ++i) {
    b[i] = v[i].norm2();
    for (int j = 0; j < k; ++j) A[i * k + j] = 2.0 * dot(v[i], v[j]);
  }
  double scale = 0.0;
  for (double a : A) scale = std::max(scale, std::abs(a));
  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < k; ++col) {
    int piv = col;
    for (int row = col + 1; row < k; ++row)
      if (std::abs(A[row * k + col]) > std::abs(A[piv * k + col])) piv = row;
    if (std::abs(A[piv * k + col]) <= 1e-14 * scale) {
      // Degenerate (affinely dependent) boundary set: fall back to the
      // diametral ball of its farthest pair.
      Sphere best{p0, 0.0};
      for (std::size_t i = 0; i < R.size(); ++i)
        for (std::size_t j = i + 1; j < R.size(); ++j) {
          const double r2 = (R[i] - R[j]).norm2() / 4.0;
          if (r2 > best.r2) best = {(R[i] + R[j]) * 0.5, r2};
        }
      return best;
    }
    if (piv != col) {
      for (int j = 0; j < k; ++j) std::swap(A[piv * k + j], A[col * k + j]);
      std::swap(b[piv], b[col]);
    }
    for (int row = col + 1; row < k; ++row) {
      const double f = A[row * k + col] / A[col * k + col];
      for (int j = col; j < k; ++j) A[row * k + j] -= f * A[col * k + j];
      b[row] -= f * b[col];
    }
  }
  std::vector<double> lam(k);
  for (int i = k - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < k; ++j) s -= A[i * k + j] * lam[j];
    lam[i] = s / A[i * k + i];
  }
  Point c = p0;
  for (int i = 0; i < k; ++i) c += v[i] * lam[i];
  return {c, (c - p0).norm2()};
}

Sphere welzl(const std::vector<Point>& P, std::size_t n, std::vector<Point>& R, int d) {
  Sphere s = circumsphere(R);
  if (static_cast<int>(R.size()) == d + 1) return s;
  for (std::size_t i = 0; i < n; ++i) {
    if (inside(s, P[i])) continue;
    R.push_back(P[i]);
    s = welzl(P, i, R, d);
    R.pop_back();
  }
  return s;
}

// Enclosing ball of S: center from Welzl on a deterministic shuffle, radius
// recomputed as the largest distance so that coverage is exact.
CoverBall enclosing_ball(const std::vector<Point>& S) {
  std::vector<Point> P = S;
  std::uint64_t state = 0x5bd1e995u;
  for (std::size_t i = P.size(); i > 1; --i) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    std::swap(P[i - 1], P[(state >> 33) % i]);
  }
  std::vector<Point> R;
  const Sphere s = welzl(P, P.size(), R, S.front().dim());
  double r = 0.0;
  for (const Point& p : S) r = std::max(r, distance(p, s.c));
  return {s.c, r};
}

// ---- overlap counting ----

class BallIndex {
 public:
  explicit BallIndex(const std::vector<CoverBall>& balls) : balls_(balls), order_(balls.size()) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::sort(order_.begin(), order_.end(),
              [&](std::size_t a, std::size_t b) { return balls_[a].center[0] < balls_[b].center[0]; });
    for (std::size_t i : order_) {
      keys_.push_back(balls_[i].center[0]);
      rmax_ = std::max(rmax_, balls_[i].radius);
    }
  }

  template <class F>
  void for_each_near(double x0, double reach, F&& f) const {
    auto lo = std::lower_bound(keys_.begin(), keys_.end(), x0 - reach - rmax_);
    for (auto it = lo; it != keys_.end() && *it <= x0 + reach + rmax_; ++it) {
      f(order_[static_cast<std::size_t>(it - keys_.begin())]);
    }
  }

  int count(const Point& z) const {
    int n = 0;
    for_each_near(z[0], 0.0, [&](std::size_t j) {
      const CoverBall& b = balls_[j];
      const double tol = 1e-9 * b.radius + 1e-15;
      if (distance(z, b.center) <= b.radius + tol) ++n;
    });
    return n;
  }

 private:
  const std::vector<CoverBall>& balls_;
  std::vector<std::size_t> order_;
  std::vector<double> keys_;
  double rmax_ = 0.0;
};

bool spheres_meet(const CoverBall& a, const CoverBall& b) {
  const double dist = distance(a.center, b.center);
  return dist <= a.radius + b.radius && dist >= std::abs(a.radius - b.radius) && dist > 0.0;
}

struct PairCircle {
  Point center;
  Point normal;
  double radius;
};

// Intersection of two spheres (d >= 2): in the plane normal to the center
// line at the radical distance.
PairCircle pair_circle(const CoverBall& a, const CoverBall& b) {
  const Point diff = b.center - a.center;
  const double dist = diff.norm();
  const Point n = diff * (1.0 / dist);
  const double t = (dist * dist + a.radius * a.radius - b.radius * b.radius) / (2.0 * dist);
  const double rho2 = a.radius * a.radius - t * t;
  return {a.center + n * t, n, std::sqrt(std::max(0.0, rho2))};
}

}  // namespace

double power_gauge_constant(double p) {
  if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("gauge exponent must be a finite p >= 0");
  return std::pow(std::numbers::pi, p / 2.0) / std::tgamma(p / 2.0 + 1.0);
}

Gauge Gauge::power(double p, double B) {
  if (!(B >= 0.0) || !std::isfinite(B)) throw std::invalid_argument("gauge factor must be finite and >= 0");
  (void)power_gauge_constant(p);  // validates p
  Gauge g;
  g.power_ = true;
  g.p_ = p;
  g.B_ = B;
  return g;
}

Gauge Gauge::tabulated(std::vector<double> t, std::vector<double> h) {
  if (t.size() != h.size() || t.size() < 2) throw std::invalid_argument("gauge table needs >= 2 matching nodes");
  if (t[0] != 0.0 || h[0] != 0.0) throw std::invalid_argument("gauge table must start at (0, 0)");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1]) || !std::isfinite(t[i])) throw std::invalid_argument("gauge nodes must increase");
    if (!(h[i] >= h[i - 1]) || !std::isfinite(h[i])) throw std::invalid_argument("gauge values must be nondecreasing");
  }
  Gauge g;
  g.power_ = false;
  g.t_ = std::move(t);
  g.h_ = std::move(h);
  return g;
}

double Gauge::operator()(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("gauge argument must be >= 0");
  if (power_) {
    if (B_ == 0.0) return 0.0;
    return B_ * power_gauge_constant(p_) * std::pow(t, p_);
  }
  if (t >= t_.back()) return h_.back();
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
  const double w = (t - t_[i]) / (t_[i + 1] - t_[i]);
  return h_[i] + w * (h_[i + 1] - h_[i]);
}

std::string Gauge::describe() const {
  if (power_) return fmt::format("power(p={}, B={})", p_, B_);
  return fmt::format("tabulated({} nodes, t_max={})", t_.size(), t_.back());
}

ExtReal n0h_integral(const Gauge& h, double r, Dimension d) {
  if (!(r > 0.0)) throw std::invalid_argument("n0h_integral: r must be > 0");
  if (h.is_power()) {
    if (h.factor() == 0.0) return 0.0;
    const double q = h.exponent() - (d - 2);
    if (q <= 0.0) return ExtReal::pos_inf();
    return h.factor() * power_gauge_constant(h.exponent()) * dhat(d) * std::pow(r, q) / q;
  }
  return n0h_quadrature(h, r, d);
}

ExtReal n0h_quadrature(const Gauge& h, double r, Dimension d) {
  if (!(r > 0.0)) throw std::invalid_argument("n0h_integral: r must be > 0");
  const int dd = d;
  const auto integrand = [&](double s) {
    // Abscissas that underflow onto s = 0 carry no weight.
    const double v = s > 0.0 ? h(s) : 0.0;
    return v == 0.0 ? 0.0 : v * std::pow(s, 1 - dd);
  };
  if (h.is_power()) {
    if (h.factor() == 0.0) return 0.0;
    if (h.exponent() - (dd - 2) <= 0.0) return ExtReal::pos_inf();
    const double c = h.factor() * power_gauge_constant(h.exponent());
    const double e = h.exponent() + 1 - dd;
    return dhat(d) * tanh_sinh_integral([&](double s) { return s > 0.0 ? c * std::pow(s, e) : 0.0; }, 0.0, r);
  }
  // Piecewise linear: integrate from the last node where h vanishes. Near 0
  // h grows linearly, so the integral diverges for d >= 3 unless h vanishes
  // on the first segment.
  const std::vector<double>& t = h.nodes();
  const std::vector<double>& v = h.values();
  std::size_t first = 0;
  while (first + 1 < t.size() && v[first + 1] == 0.0) ++first;
  if (first + 1 == t.size() || t[first] >= r) return 0.0;
  if (first == 0 && dd >= 3) return ExtReal::pos_inf();
  double total = 0.0;
  for (std::size_t i = first; i + 1 < t.size() && t[i] < r; ++i) {
    total += tanh_sinh_integral(integrand, t[i], std::min(r, t[i + 1]));
  }
  if (r > t.back()) total += tanh_sinh_integral(integrand, t.back(), r);
  return dhat(d) * total;
}

double cover_gauge_sum(const CoverEstimate& cover, const Gauge& h) {
  double s = 0.0;
  for (const CoverBall& b : cover.balls) s += h(b.radius);
  return s;
}

int overlap_multiplicity(const std::vector<CoverBall>& balls, const std::vector<Point>& extra) {
  if (balls.empty()) return 0;
  const int d = balls.front().center.dim();
  const BallIndex index(balls);
  int best = 0;
  const auto probe = [&](const Point& z) { best = std::max(best, index.count(z)); };
  for (const Point& p : extra) probe(p);
  for (const CoverBall& b : balls) probe(b.center);
  if (d == 1) {
    for (const CoverBall& b : balls) {
      probe(b.center - Point{b.radius});
      probe(b.center + Point{b.radius});
    }
    return best;
  }
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const CoverBall& a = balls[i];
    std::vector<std::size_t> nbrs;
    index.for_each_near(a.center[0], a.radius, [&](std::size_t j) {
      if (j > i && spheres_meet(a, balls[j])) nbrs.push_back(j);
    });
    for (std::size_t jj = 0; jj < nbrs.size(); ++jj) {
      const CoverBall& b = balls[nbrs[jj]];
      const PairCircle pc = pair_circle(a, b);
      const std::vector<Point> frame = orthonormal_frame(pc.normal);
      if (d == 2) {
        probe(pc.center + frame[1] * pc.radius);
        probe(pc.center - frame[1] * pc.radius);
        continue;
      }
      probe(pc.center);
      if (d != 3) continue;  // higher dimensions: centers and pair circles only
      for (std::size_t kk = jj + 1; kk < nbrs.size(); ++kk) {
        const CoverBall& c = balls[nbrs[kk]];
        if (!spheres_meet(b, c)) continue;
        // Points q + rho (cos th e1 + sin th e2) at distance r_c from c.
        const Point w = c.center - pc.center;
        const double A = 2.0 * pc.radius * dot(w, frame[1]);
        const double B = 2.0 * pc.radius * dot(w, frame[2]);
        const double C = w.norm2() + pc.radius * pc.radius - c.radius * c.radius;
        const double amp = std::hypot(A, B);
        if (amp == 0.0 || std::abs(C) > amp) continue;
        const double phase = std::atan2(B, A);
        const double delta = std::acos(std::clamp(C / amp, -1.0, 1.0));
        for (double th : {phase + delta, phase - delta}) {
          probe(pc.center + (frame[1] * std::cos(th) + frame[2] * std::sin(th)) * pc.radius);
        }
      }
    }
  }
  return best;
}

CoverEstimate cube_cover(const std::vector<Point>& S, const Gauge& h, int level, double resolution) {
  CoverEstimate out;
  out.level = level;
  if (S.empty()) return out;
  const int d = S.front().dim();
  const double L = std::ldexp(1.0, level);
  using Key = std::array<std::int64_t, kMaxDim>;
  std::vector<std::pair<Key, std::size_t>> keyed;
  keyed.reserve(S.size());
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (S[i].dim() != d) throw std::invalid_argument("cube_cover: mixed dimensions");
    Key k{};
    for (int a = 0; a < d; ++a) k[a] = static_cast<std::int64_t>(std::floor(S[i][a] / L));
    keyed.emplace_back(k, i);
  }
  std::sort(keyed.begin(), keyed.end());
  for (std::size_t lo = 0; lo < keyed.size();) {
    std::size_t hi = lo;
    while (hi < keyed.size() && keyed[hi].first == keyed[lo].first) ++hi;
    Point c(Dimension{d});
    for (int a = 0; a < d; ++a) c[a] = (static_cast<double>(keyed[lo].first[a]) + 0.5) * L;
    double rad = 0.0;
    for (std::size_t m = lo; m < hi; ++m) rad = std::max(rad, distance(c, S[keyed[m].second]));
    out.balls.push_back({c, std::max(rad + resolution, kCoverRadiusFloor)});
    lo = hi;
  }
  out.total_gauge = cover_gauge_sum(out, h);
  return out;
}

CoverEstimate content_upper_bound(const std::vector<Point>& S, const Gauge& h, double r, double resolution) {
  if (!(r > 0.0)) throw std::invalid_argument("content_upper_bound: r must be > 0");
  if (!(resolution >= 0.0)) throw std::invalid_argument("content_upper_bound: resolution must be >= 0");
  CoverEstimate best;
  if (S.empty()) return best;
  const int d = S.front().dim();
  const double reach = r - resolution;
  if (!(reach > 0.0)) {
    best.total_gauge = kInf;
    return best;
  }
  best.total_gauge = kInf;
  // A single enclosing ball is always a candidate.
  CoverBall whole = enclosing_ball(S);
  whole.radius = std::max(whole.radius + resolution, kCoverRadiusFloor);
  if (whole.radius <= r) {
    best.balls = {whole};
    best.total_gauge = h(whole.radius);
    best.level = std::numeric_limits<int>::max();
  }
  const double half_diag = std::sqrt(static_cast<double>(d)) / 2.0;
  int k = static_cast<int>(std::floor(std::log2(reach / half_diag)));
  while (std::ldexp(half_diag, k) > reach) --k;
  for (int steps = 0; steps < 64; ++steps, --k) {
    CoverEstimate c = cube_cover(S, h, k, resolution);
    if (c.total_gauge < best.total_gauge) best = std::move(c);
    if (std::ldexp(half_diag, k) <= kCoverRadiusFloor) break;
  }
  best.multiplicity = overlap_multiplicity(best.balls, S);
  return best;
}

CoverEstimate besicovitch_cover(const std::vector<Point>& points, const std::vector<double>& radii) {
  if (points.size() != radii.size()) throw std::invalid_argument("besicovitch_cover: one radius per point");
  CoverEstimate out;
  if (points.empty()) return out;
  const int d = points.front().dim();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].dim() != d) throw std::invalid_argument("besicovitch_cover: mixed dimensions");
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) throw std::invalid_argument("besicovitch_cover: radii must be positive");
  }
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (radii[a] != radii[b]) return radii[a] > radii[b];
    return lex_less(points[a], points[b]);
  });
  std::vector<char> covered(points.size(), 0);
  for (std::size_t i : order) {
    if (covered[i]) continue;
    const CoverBall ball{points[i], radii[i]};
    out.balls.push_back(ball);
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (!covered[j] && distance(points[j], ball.center) <= ball.radius) covered[j] = 1;
    }
  }
  out.multiplicity = overlap_multiplicity(out.balls, points);
  const double limit = std::pow(5.0, d);
  if (out.multiplicity > limit) {
    throw std::logic_error(fmt::format("internal error: cover multiplicity {} exceeds 5^{}", out.multiplicity, d));
  }
  return out;
}

}  // namespace sbh
