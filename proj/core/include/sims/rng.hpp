#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

#include "sims/types.hpp"

namespace sims {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used for seeding and key mixing.
std::uint64_t splitmix64(std::uint64_t& state);

/// xoshiro256** (Blackman & Vigna, 2018) with portable uniform and Gaussian draws.
///
/// Every draw is defined by integer arithmetic plus IEEE log/sqrt/sin/cos,
/// so identical seeds give identical streams on any conforming platform.
/// Keyed construction derives independent streams from a tuple such as
/// (master_seed, snr_index, trial_index, purpose).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  static Rng keyed(std::initializer_list<std::uint64_t> key);

  std::uint64_t next_u64();

  /// Uniform integer in [0, bound), exact (rejection sampling). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal via Box-Muller. Caches the second variate.
  double normal();

  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  cd complex_normal(double variance);

  /// Uniform point on the unit circle.
  cd unit_phase();

 private:
  std::array<std::uint64_t, 4> s_{};
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace sims
