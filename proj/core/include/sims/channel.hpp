#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sims/rng.hpp"
#include "sims/types.hpp"

namespace sims {

enum class ChannelModel { AWGN, RayleighFlat, TwoTap };

std::string to_string(ChannelModel m);
/// Accepts awgn | rayleigh | two-tap.
ChannelModel channel_model_from_string(const std::string& s);

struct ChannelSpec {
  ChannelModel model = ChannelModel::AWGN;
  /// Es/N0 per block in dB. +inf disables noise.
  double es_n0_db = std::numeric_limits<double>::infinity();
  double rho = 0.0;      // TwoTap power in the delayed path
  bool fading = false;   // TwoTap: independent CN(0,1) factor on each tap
  std::uint64_t seed = 0;

  void validate() const;
  bool noiseless() const { return es_n0_db == std::numeric_limits<double>::infinity(); }
  /// Linear Es/N0.
  double gamma() const;
};

struct ChannelRealization {
  CVec taps;
  double noise_variance = 0.0;  // per complex sample
  std::size_t applied_offset = 0;
};

struct ChannelOutput {
  CVec y;
  ChannelRealization realization;
};

/// [sqrt(1 - rho), sqrt(rho)].
CVec two_tap_response(double rho);

/// sigma^2 = es / Gamma, or 0 when noise is disabled.
double noise_variance(const ChannelSpec& spec, double es);

/// Taps for one block: {1} (AWGN), {h ~ CN(0,1)} (RayleighFlat), or the two-tap
/// response, optionally with per-tap CN(0,1) factors.
CVec draw_taps(const ChannelSpec& spec, Rng& rng);

/// Full linear convolution, length x.size() + taps.size() - 1.
CVec propagate(std::span<const cd> x, std::span<const cd> taps);

/// Adds i.i.d. CN(0, variance) samples in place.
void add_noise(std::span<cd> y, double variance, Rng& rng);

/// Taps are drawn from `fading`, noise from `noise`.
ChannelOutput apply(const ChannelSpec& spec, std::span<const cd> x, Rng& fading, Rng& noise);
/// One stream for both taps and noise.
ChannelOutput apply(const ChannelSpec& spec, std::span<const cd> x, Rng& rng);
/// Stream seeded from spec.seed.
ChannelOutput apply(const ChannelSpec& spec, std::span<const cd> x);

/// Zero-padded delayed sum; length max(offset + length). Noise is not added.
CVec superpose_async(std::span<const CVec> waveforms, std::span<const std::size_t> offsets);

enum class OffsetMode { Synchronous, UniformChip };

std::string to_string(OffsetMode m);
/// Accepts sync | uniform.
OffsetMode offset_mode_from_string(const std::string& s);

/// Synchronous: zeros. UniformChip: i.i.d. uniform integers in [0, max_offset].
std::vector<std::size_t> draw_offsets(std::size_t m, OffsetMode mode, std::size_t max_offset,
                                      Rng& rng);
std::vector<std::size_t> draw_offsets(std::size_t m, OffsetMode mode, std::size_t max_offset,
                                      std::uint64_t seed);

}  // namespace sims
