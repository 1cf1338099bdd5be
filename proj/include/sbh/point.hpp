#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>

namespace sbh {

/// Largest ambient dimension a Point can hold. Formulas are dimension-generic,
/// estimators are exercised for d <= 3.
inline constexpr int kMaxDim = 8;

/// Ambient dimension d >= 1.
class Dimension {
 public:
  constexpr explicit Dimension(int d) : d_(d) {
    if (d < 1 || d > kMaxDim) {
      throw std::invalid_argument("dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    }
  }
  constexpr int value() const { return d_; }
  constexpr operator int() const { return d_; }

 private:
  int d_;
};

/// A point of R^d stored inline (no allocation).
class Point {
 public:
  Point() = default;

  explicit Point(Dimension d) : dim_(d.value()) {}

  Point(std::initializer_list<double> coords) {
    if (coords.size() == 0 || coords.size() > static_cast<std::size_t>(kMaxDim)) {
      throw std::invalid_argument("point must have between 1 and kMaxDim coordinates");
    }
    dim_ = static_cast<int>(coords.size());
    int i = 0;
    for (double c : coords) c_[i++] = c;
  }

  static Point from_span(std::span<const double> coords) {
    if (coords.empty() || coords.size() > static_cast<std::size_t>(kMaxDim)) {
      throw std::invalid_argument("point must have between 1 and kMaxDim coordinates");
    }
    Point p;
    p.dim_ = static_cast<int>(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) p.c_[i] = coords[i];
    return p;
  }

  /// e_axis scaled by `length` in dimension d.
  static Point axis(Dimension d, int axis, double length = 1.0) {
    Point p(d);
    p.c_[axis] = length;
    return p;
  }

  int dim() const { return dim_; }
  Dimension dimension() const { return Dimension(dim_); }

  double operator[](int i) const { return c_[i]; }
  double& operator[](int i) { return c_[i]; }

  std::span<const double> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

  Point& operator+=(const Point& o) {
    for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Point& operator-=(const Point& o) {
    for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Point& operator*=(double s) {
    for (int i = 0; i < dim_; ++i) c_[i] *= s;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend Point operator*(double s, Point a) { return a *= s; }
  friend Point operator-(Point a) { return a *= -1.0; }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

  /// Lexicographic order on coordinates (used for deterministic tie-breaking).
  friend bool lex_less(const Point& a, const Point& b) {
    for (int i = 0; i < a.dim_; ++i) {
      if (a.c_[i] < b.c_[i]) return true;
      if (a.c_[i] > b.c_[i]) return false;
    }
    return false;
  }

  friend double dot(const Point& a, const Point& b) {
    double s = 0.0;
    for (int i = 0; i < a.dim_; ++i) s += a.c_[i] * b.c_[i];
    return s;
  }

  double norm2() const { return dot(*this, *this); }
  double norm() const { return std::sqrt(norm2()); }

  friend double distance(const Point& a, const Point& b) { return (a - b).norm(); }

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

inline void require_same_dim(const Point& a, const Point& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

/// Axis-aligned box [lo, hi].
struct Box {
  Point lo;
  Point hi;

  int dim() const { return lo.dim(); }
  double diagonal() const { return distance(lo, hi); }
  bool contains(const Point& p) const {
    for (int i = 0; i < lo.dim(); ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }
};

}  // namespace sbh
