#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <stdexcept>
#include <string>

namespace sbh {

/// Extended real number: R together with -inf and +inf. NaN is never
/// representable; operations with no extended-real meaning (inf - inf) throw.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  constexpr ExtReal(double v) : v_(v) {  // NOLINT(google-explicit-constructor)
    if (v != v) throw std::domain_error("ExtReal: NaN is not an extended real");
  }

  static constexpr ExtReal pos_inf() { return ExtReal(std::numeric_limits<double>::infinity()); }
  static constexpr ExtReal neg_inf() { return ExtReal(-std::numeric_limits<double>::infinity()); }

  constexpr double value() const { return v_; }
  constexpr bool is_finite() const { return v_ > -kInf && v_ < kInf; }
  constexpr bool is_pos_inf() const { return v_ == kInf; }
  constexpr bool is_neg_inf() const { return v_ == -kInf; }

  /// Finite value; throws if infinite.
  double finite() const {
    if (!is_finite()) throw std::domain_error("ExtReal: value is infinite");
    return v_;
  }

  friend constexpr ExtReal operator-(ExtReal a) { return ExtReal(-a.v_); }

  friend ExtReal operator+(ExtReal a, ExtReal b) {
    if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf())) {
      throw std::domain_error("ExtReal: (+inf) + (-inf) is undefined");
    }
    return ExtReal(a.v_ + b.v_);
  }
  friend ExtReal operator-(ExtReal a, ExtReal b) { return a + (-b); }

  /// Measure-theoretic convention 0 * (+-inf) = 0.
  friend ExtReal operator*(ExtReal a, ExtReal b) {
    if (a.v_ == 0.0 || b.v_ == 0.0) return ExtReal(0.0);
    return ExtReal(a.v_ * b.v_);
  }

  friend ExtReal operator/(ExtReal a, ExtReal b) {
    if (!b.is_finite()) {
      if (!a.is_finite()) throw std::domain_error("ExtReal: inf / inf is undefined");
      return ExtReal(0.0);
    }
    if (b.v_ == 0.0) throw std::domain_error("ExtReal: division by zero");
    return ExtReal(a.v_ / b.v_);
  }

  ExtReal& operator+=(ExtReal o) { return *this = *this + o; }
  ExtReal& operator-=(ExtReal o) { return *this = *this - o; }

  friend constexpr bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
  friend constexpr std::strong_ordering operator<=>(ExtReal a, ExtReal b) {
    if (a.v_ < b.v_) return std::strong_ordering::less;
    if (a.v_ > b.v_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend ExtReal max(ExtReal a, ExtReal b) { return a < b ? b : a; }
  friend ExtReal min(ExtReal a, ExtReal b) { return b < a ? b : a; }

  std::string to_string() const;

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  double v_ = 0.0;
};

/// Positive part x^+ = max(0, x).
inline ExtReal positive_part(ExtReal x) { return x.value() > 0.0 ? x : ExtReal(0.0); }

}  // namespace sbh
