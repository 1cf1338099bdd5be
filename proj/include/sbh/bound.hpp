#pragma once

#include <limits>
#include <string_view>

namespace sbh {

/// Which side of the true value a computed quantity is known to lie on.
enum class Side {
  exact,     // closed form (floating point only)
  lower,     // certified: value <= truth
  upper,     // certified: value >= truth
  estimate,  // Monte Carlo or quadrature point estimate with a half-width
};

std::string_view to_string(Side s);
Side side_from_string(std::string_view s);

/// True when a value with side `provided` may be used where `required`
/// (lower or upper) is needed.
constexpr bool side_satisfies(Side provided, Side required) {
  return provided == Side::exact || provided == required;
}

/// A pair lower <= truth <= upper. Exact quantities have lower == upper.
struct Bracket {
  double lower = 0.0;
  double upper = 0.0;

  static Bracket exact(double v) { return {v, v}; }
  static Bracket unbounded_above(double lo) {
    return {lo, std::numeric_limits<double>::infinity()};
  }

  bool is_exact() const { return lower == upper; }
  Side side_of_lower() const { return is_exact() ? Side::exact : Side::lower; }
  Side side_of_upper() const { return is_exact() ? Side::exact : Side::upper; }
};

/// Point estimate with a 1-sigma half-width (0 for exact values).
struct Estimate {
  double value = 0.0;
  double half_width = 0.0;
  Side side = Side::exact;
};

}  // namespace sbh
