#include "sims/channel.hpp"

#include <algorithm>
#include <cmath>

namespace sims {

std::string to_string(ChannelModel m) {
  switch (m) {
    case ChannelModel::AWGN:
      return "awgn";
    case ChannelModel::RayleighFlat:
      return "rayleigh";
    case ChannelModel::TwoTap:
      return "two-tap";
  }
  return "unknown";
}

ChannelModel channel_model_from_string(const std::string& s) {
  if (s == "awgn") return ChannelModel::AWGN;
  if (s == "rayleigh") return ChannelModel::RayleighFlat;
  if (s == "two-tap") return ChannelModel::TwoTap;
  throw InvalidArgument("unknown channel '" + s + "' (expected awgn|rayleigh|two-tap)");
}

void ChannelSpec::validate() const {
  if (!(rho >= 0.0 && rho < 1.0)) throw InvalidArgument("rho must be in [0, 1)");
  if (std::isnan(es_n0_db) || es_n0_db == -std::numeric_limits<double>::infinity()) {
    throw InvalidArgument("Es/N0 must be a number or +inf");
  }
}

double ChannelSpec::gamma() const { return std::pow(10.0, es_n0_db / 10.0); }

CVec two_tap_response(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw InvalidArgument("rho must be in [0, 1)");
  return {cd{std::sqrt(1.0 - rho), 0.0}, cd{std::sqrt(rho), 0.0}};
}

double noise_variance(const ChannelSpec& spec, double es) {
  if (spec.noiseless()) return 0.0;
  return es / spec.gamma();
}

CVec draw_taps(const ChannelSpec& spec, Rng& rng) {
  switch (spec.model) {
    case ChannelModel::AWGN:
      return {cd{1.0, 0.0}};
    case ChannelModel::RayleighFlat:
      return {rng.complex_normal(1.0)};
    case ChannelModel::TwoTap: {
      auto h = two_tap_response(spec.rho);
      if (spec.fading) {
        for (auto& t : h) t *= rng.complex_normal(1.0);
      }
      return h;
    }
  }
  throw InvalidArgument("unknown channel model");
}

CVec propagate(std::span<const cd> x, std::span<const cd> taps) {
  if (x.empty() || taps.empty()) throw InvalidArgument("propagate: empty input");
  CVec y(x.size() + taps.size() - 1, cd{});
  for (std::size_t t = 0; t < taps.size(); ++t) {
    if (taps[t] == cd{}) continue;
    for (std::size_t i = 0; i < x.size(); ++i) y[i + t] += taps[t] * x[i];
  }
  return y;
}

void add_noise(std::span<cd> y, double variance, Rng& rng) {
  if (variance < 0.0) throw InvalidArgument("noise variance must be non-negative");
  if (variance == 0.0) return;
  for (auto& v : y) v += rng.complex_normal(variance);
}

ChannelOutput apply(const ChannelSpec& spec, std::span<const cd> x, Rng& fading, Rng& noise) {
  if (x.empty()) throw InvalidArgument("channel input is empty");
  spec.validate();
  const double es = energy(x);
  if (!(es > 0.0)) throw InvalidArgument("channel input has zero energy");
  ChannelOutput out;
  out.realization.taps = draw_taps(spec, fading);
  out.realization.noise_variance = noise_variance(spec, es);
  if (out.realization.taps.size() == 1) {
    const cd h = out.realization.taps[0];
    out.y.assign(x.begin(), x.end());
    if (h != cd{1.0, 0.0}) {
      for (auto& v : out.y) v *= h;
    }
  } else {
    out.y = propagate(x, out.realization.taps);
  }
  add_noise(out.y, out.realization.noise_variance, noise);
  return out;
}

ChannelOutput apply(const ChannelSpec& spec, std::span<const cd> x, Rng& rng) {
  return apply(spec, x, rng, rng);
}

ChannelOutput apply(const ChannelSpec& spec, std::span<const cd> x) {
  Rng rng(spec.seed);
  return apply(spec, x, rng, rng);
}

CVec superpose_async(std::span<const CVec> waveforms, std::span<const std::size_t> offsets) {
  if (waveforms.size() != offsets.size()) {
    throw InvalidArgument("superpose_async: " + std::to_string(waveforms.size()) + " waveforms but " +
                          std::to_string(offsets.size()) + " offsets");
  }
  std::size_t len = 0;
  for (std::size_t m = 0; m < waveforms.size(); ++m) {
    len = std::max(len, offsets[m] + waveforms[m].size());
  }
  CVec y(len, cd{});
  for (std::size_t m = 0; m < waveforms.size(); ++m) {
    for (std::size_t i = 0; i < waveforms[m].size(); ++i) y[offsets[m] + i] += waveforms[m][i];
  }
  return y;
}

std::string to_string(OffsetMode m) { return m == OffsetMode::Synchronous ? "sync" : "uniform"; }

OffsetMode offset_mode_from_string(const std::string& s) {
  if (s == "sync") return OffsetMode::Synchronous;
  if (s == "uniform") return OffsetMode::UniformChip;
  throw InvalidArgument("unknown offset mode '" + s + "' (expected sync|uniform)");
}

std::vector<std::size_t> draw_offsets(std::size_t m, OffsetMode mode, std::size_t max_offset,
                                      Rng& rng) {
  std::vector<std::size_t> out(m, 0);
  if (mode == OffsetMode::UniformChip && max_offset > 0) {
    for (auto& o : out) o = static_cast<std::size_t>(rng.below(max_offset + 1));
  }
  return out;
}

std::vector<std::size_t> draw_offsets(std::size_t m, OffsetMode mode, std::size_t max_offset,
                                      std::uint64_t seed) {
  Rng rng(seed);
  return draw_offsets(m, mode, max_offset, rng);
}

}  // namespace sims
