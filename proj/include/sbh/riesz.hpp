#pragma once

#include <vector>

#include "sbh/domains.hpp"
#include "sbh/ext_real.hpp"
#include "sbh/point.hpp"

namespace sbh {

struct Atom {
  Point loc;
  double mass;
};

/// Finite positive combination of point masses.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  explicit AtomicMeasure(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  bool empty() const { return atoms_.empty(); }
  std::size_t size() const { return atoms_.size(); }
  double total_mass() const;

 private:
  std::vector<Atom> atoms_;
};

/// Right-continuous step function t -> mu(closed ball of radius t about center).
struct RadialProfile {
  Point center;
  std::vector<double> jump_radii;
  std::vector<double> cumulative_masses;

  double operator()(double t) const;
};

RadialProfile radial_profile(const AtomicMeasure& mu, const Point& x);

/// mu of the closed ball of radius t about x.
double radial_counting(const AtomicMeasure& mu, const Point& x, double t);

/// dhat * integral_0^r mu_rad(t) t^(1-d) dt, in closed form
/// sum_{a_j <= r} m_j (k(r) - k(a_j)). +inf when r > 0 and an atom sits at x
/// with d >= 2.
ExtReal integrated_counting(const AtomicMeasure& mu, const Point& x, double r);

/// |closed form - piecewise adaptive quadrature of the defining integral|.
/// Zero when both sides are infinite.
double counting_identity_residual(const AtomicMeasure& mu, const Point& x, double r);

/// Atoms in the closure of D (signed distance <= eps_geo).
AtomicMeasure restrict(const AtomicMeasure& mu, const Domain& D);

}  // namespace sbh
