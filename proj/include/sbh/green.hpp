#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sbh/bound.hpp"
#include "sbh/domains.hpp"
#include "sbh/ext_real.hpp"
#include "sbh/harnack.hpp"
#include "sbh/riesz.hpp"

namespace sbh {

/// Scalar field on R^d with values in [-inf, +inf).
using ScalarField = std::function<ExtReal(const Point&)>;

class WalkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WosOptions {
  double shell_fraction = 1e-4;  // shell thickness relative to the diameter of D
  double eps_shell = 0.0;         // absolute shell thickness; 0 = shell_fraction * diameter
  std::size_t max_steps = 10000;
  std::size_t batch_size = 1024;
  unsigned threads = 1;
};

/// Weighted points on the boundary representing the harmonic measure of D at x.
/// Exact rules (balls, intervals) carry quadrature weights; walk-on-spheres
/// samples carry equal weights 1/n.
struct HarmonicMeasureSample {
  std::vector<Point> exit_points;
  std::vector<double> weights;
  std::uint64_t seed = 0;
  double eps_shell = 0.0;
  bool monte_carlo = false;
  double mean_steps = 0.0;

  double total_weight() const;
};

/// Value with a 1-sigma half-width; `clamped` records how far a negative raw
/// estimate was lifted to 0.
struct GreenEstimate {
  ExtReal value{0.0};
  double half_width = 0.0;
  double clamped = 0.0;
  bool exact = true;
};

/// (k(r) - k(|y - x|))^+: Green function of the ball B_x(r) with pole at its center.
GreenEstimate green_ball_center(double r, const Point& x, const Point& y);

/// Harmonic measure of D at x. Balls: Poisson-weighted sphere rule with about n
/// nodes. Intervals: the two endpoint atoms. Signed-distance domains: n
/// walk-on-spheres exit points, deterministic per (seed, batch layout).
/// Throws GeometryError if x is not in D and WalkError when a walk exceeds
/// max_steps.
HarmonicMeasureSample harmonic_measure(const Domain& D, const Point& x, std::size_t n, std::uint64_t seed,
                                       const WosOptions& opts = {});

/// Weighted average of f over the sample. Monte Carlo samples report the
/// standard error; exact rules report half_width 0.
Estimate harmonic_average(const HarmonicMeasureSample& s, const ScalarField& f);

/// H_f^D(x) = integral of f against the harmonic measure. For quadrature rules
/// the half-width is the change from halving the rule.
Estimate best_harmonic_majorant(const ScalarField& f, const Domain& D, const Point& x, std::size_t n, std::uint64_t seed,
                                const WosOptions& opts = {});

/// g_x^D(y) by the representation integral k(|y - z|) d(harmonic measure)(z) - k(|y - x|),
/// using an existing harmonic-measure sample of D at x.
GreenEstimate green_from_sample(const HarmonicMeasureSample& s, const Point& x, const Point& y);

/// g_x^D(y). Uses the closed form when D is a ball and x its center.
GreenEstimate green_general(const Domain& D, const Point& x, const Point& y, std::size_t n, std::uint64_t seed,
                            const WosOptions& opts = {});

/// Sum over atoms strictly inside D of m_j g_x^D(loc_j).
GreenEstimate green_potential(const Domain& D, const Point& x, const AtomicMeasure& mu, std::size_t n,
                              std::uint64_t seed, const WosOptions& opts = {});

/// k(diam D) - k(|y - x|) with the certified upper diameter; an upper bound for g_x^D(y).
ExtReal green_upper_bound(const Domain& D, const Point& x, const Point& y);

struct GreenLowerBound {
  double value = 0.0;
  bool degenerate = false;
  double R = 0.0;
  double gap = 0.0;
};

/// (k(R + gap) - k(R)) / harnack_sup with the certified lower sides of
/// R = dist(o, boundary of D) and gap = dist(D, complement of G). harnack_sup
/// must be exact or an upper bound computed with the same R. Infinite
/// harnack_sup gives 0 with the degeneracy flag set.
GreenLowerBound green_lower_bound_via_harnack(const NestedPair& pair, const HarnackValue& harnack_sup);

/// u(x) - (H_u^D(x) - integral over closure(D) of g_x^D d mu), where mu is the
/// Riesz measure of u. Monte Carlo estimates share one sample, so the
/// half-width is the standard error of the combined integrand.
Estimate poisson_jensen_residual(const ScalarField& u, const AtomicMeasure& mu, const Domain& D, const Point& x,
                                 std::size_t n, std::uint64_t seed, const WosOptions& opts = {});

}  // namespace sbh
