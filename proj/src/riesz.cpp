#include "sbh/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sbh/kernel.hpp"
#include "sbh/quadrature.hpp"

namespace sbh {

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  for (const Atom& a : atoms_) {
    if (!(a.mass > 0.0) || !std::isfinite(a.mass)) throw std::invalid_argument("AtomicMeasure: masses must be positive and finite");
    if (a.loc.dim() != atoms_.front().loc.dim()) throw std::invalid_argument("AtomicMeasure: dimension mismatch");
  }
}

double AtomicMeasure::total_mass() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += a.mass;
  return s;
}

double RadialProfile::operator()(double t) const {
  const auto it = std::upper_bound(jump_radii.begin(), jump_radii.end(), t);
  if (it == jump_radii.begin()) return 0.0;
  return cumulative_masses[static_cast<std::size_t>(it - jump_radii.begin()) - 1];
}

RadialProfile radial_profile(const AtomicMeasure& mu, const Point& x) {
  std::vector<std::pair<double, double>> rm;
  rm.reserve(mu.size());
  for (const Atom& a : mu.atoms()) rm.emplace_back(distance(a.loc, x), a.mass);
  std::sort(rm.begin(), rm.end());
  RadialProfile p{x, {}, {}};
  double acc = 0.0;
  for (const auto& [r, m] : rm) {
    acc += m;
    if (!p.jump_radii.empty() && p.jump_radii.back() == r) {
      p.cumulative_masses.back() = acc;
    } else {
      p.jump_radii.push_back(r);
      p.cumulative_masses.push_back(acc);
    }
  }
  return p;
}

double radial_counting(const AtomicMeasure& mu, const Point& x, double t) {
  double s = 0.0;
  for (const Atom& a : mu.atoms())
    if (distance(a.loc, x) <= t) s += a.mass;
  return s;
}

ExtReal integrated_counting(const AtomicMeasure& mu, const Point& x, double r) {
  if (r < 0.0) throw std::domain_error("integrated_counting: r must be nonnegative");
  if (r == 0.0) return ExtReal(0.0);
  const Dimension d = x.dimension();
  double s = 0.0;
  for (const Atom& a : mu.atoms()) {
    const double aj = distance(a.loc, x);
    if (aj > r) continue;
    if (aj == 0.0) {
      if (d.value() >= 2) return ExtReal::pos_inf();
      s += a.mass * r;
      continue;
    }
    s += a.mass * kernel_increment(d, aj, r);
  }
  return ExtReal(s);
}

double counting_identity_residual(const AtomicMeasure& mu, const Point& x, double r) {
  const ExtReal closed = integrated_counting(mu, x, r);
  const RadialProfile prof = radial_profile(mu, x);
  const Dimension d = x.dimension();
  if (closed.is_pos_inf()) {
    // Defining integral diverges at 0 as well (mu_rad(0) > 0, d >= 2).
    return prof(0.0) > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  const int dd = d.value();
  double quad = 0.0;
  double left = 0.0;
  for (std::size_t k = 0; k <= prof.jump_radii.size(); ++k) {
    const double right = k < prof.jump_radii.size() ? std::min(prof.jump_radii[k], r) : r;
    if (right > left) {
      const double level = prof(left);
      if (level > 0.0) {
        quad += level * dhat(d) * integrate([dd](double t) { return std::pow(t, 1 - dd); }, left, right, 1e-13);
      }
      left = right;
    }
    if (left >= r) break;
  }
  return std::abs(closed.value() - quad);
}

AtomicMeasure restrict(const AtomicMeasure& mu, const Domain& D) {
  std::vector<Atom> kept;
  for (const Atom& a : mu.atoms())
    if (D.closure_contains(a.loc)) kept.push_back(a);
  return AtomicMeasure(std::move(kept));
}

}  // namespace sbh
