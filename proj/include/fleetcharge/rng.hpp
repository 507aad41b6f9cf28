#pragma once

#include <cstdint>
#include <random>

#include "fleetcharge/common.hpp"

namespace fleetcharge {

/// Deterministic random source. std::mt19937_64 output is pinned by the
/// standard; the distribution mappings below are hand-rolled because the
/// std::*_distribution algorithms are implementation-defined and would break
/// the byte-identical-across-platforms contract.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53-bit resolution.
  double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) {
    if (lo > hi) throw ConfigError("uniform bounds inverted: lo > hi");
    return lo + (hi - lo) * u01();
  }

  /// Standard normal via Box-Muller (fresh pair each call, second value
  /// discarded to keep the draw sequence position-independent).
  double gauss() {
    double u1 = u01();
    while (u1 <= 0.0) u1 = u01();
    const double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Stable stream derivation so that (seed, alpha index, sample index) maps to
/// an independent generator regardless of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace fleetcharge
