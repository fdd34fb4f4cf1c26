#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace atsmc {

// Deterministic random number plumbing for the simulation engine.
//
// Reproducibility contract: every Monte Carlo trace draws from its own
// SplitMix64 stream whose initial state is derived from the master seed and
// the trace index alone.  The constants below and the derivation in
// trace_seed() are frozen; golden trace fixtures depend on them.

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Initial SplitMix64 state for trace `index` under `master` seed.
constexpr std::uint64_t trace_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ (kGoldenGamma * (index + 1)));
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t state) : state_(state) {}

  constexpr std::uint64_t next() {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  /// Uniform double in the open interval (0, 1).
  double next_unit_open() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1p-53;
  }

 private:
  std::uint64_t state_;
};

/// Exponential delay by inverse transform; lambda == 0 never fires.
inline double sample_exponential(SplitMix64& gen, double lambda) {
  if (lambda <= 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(gen.next_unit_open()) / lambda;
}

}  // namespace atsmc
