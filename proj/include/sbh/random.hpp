#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "sbh/point.hpp"

namespace sbh {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

/// Random source with platform-independent variates (std::mt19937_64 is fully
/// specified; distributions are hand-rolled so results are bit-identical
/// across standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform direction on the unit sphere S^{d-1}.
  Point unit_direction(Dimension d) {
    Point p(d);
    switch (d.value()) {
      case 1:
        p[0] = uniform() < 0.5 ? -1.0 : 1.0;
        return p;
      case 2: {
        const double a = 2.0 * std::numbers::pi * uniform();
        p[0] = std::cos(a);
        p[1] = std::sin(a);
        return p;
      }
      case 3: {
        const double z = 2.0 * uniform() - 1.0;
        const double a = 2.0 * std::numbers::pi * uniform();
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        p[0] = s * std::cos(a);
        p[1] = s * std::sin(a);
        p[2] = z;
        return p;
      }
      default: {
        double n2 = 0.0;
        do {
          for (int i = 0; i < d.value(); i += 2) {
            // Box-Muller pair
            const double u1 = 1.0 - uniform();
            const double u2 = uniform();
            const double r = std::sqrt(-2.0 * std::log(u1));
            p[i] = r * std::cos(2.0 * std::numbers::pi * u2);
            if (i + 1 < d.value()) p[i + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
          }
          n2 = p.norm2();
        } while (n2 == 0.0);
        return p * (1.0 / std::sqrt(n2));
      }
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sbh
