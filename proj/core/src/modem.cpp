#include "sims/modem.hpp"

#include <cmath>

#include "sims/fft.hpp"

namespace sims {

std::uint64_t map_bits(std::span<const std::uint8_t> bits) {
  if (bits.size() > 63) throw InvalidArgument("map_bits: at most 63 bits");
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) throw InvalidArgument("map_bits: bits must be 0 or 1");
    idx |= static_cast<std::uint64_t>(bits[i]) << i;
  }
  return idx;
}

std::uint64_t map_bits(const Codebook& codebook, std::span<const std::uint8_t> bits) {
  const auto n_b = static_cast<std::size_t>(codebook.bits_per_codeword());
  if (bits.size() != n_b) {
    throw InvalidArgument("map_bits: got " + std::to_string(bits.size()) + " bits, codebook carries " +
                          std::to_string(n_b));
  }
  return map_bits(bits);
}

std::vector<std::uint8_t> unmap_index(std::uint64_t index, int n_b) {
  if (n_b < 0 || n_b > 63) throw InvalidArgument("unmap_index: n_b must be in [0, 63]");
  if (index >> n_b != 0) {
    throw InvalidArgument("unmap_index: index " + std::to_string(index) + " needs more than " +
                          std::to_string(n_b) + " bits");
  }
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n_b));
  for (int i = 0; i < n_b; ++i) bits[i] = static_cast<std::uint8_t>((index >> i) & 1U);
  return bits;
}

CVec modulate(const Codebook& codebook, std::size_t index, double es) {
  if (!(es > 0.0) || !std::isfinite(es)) throw InvalidArgument("modulate: Es must be positive");
  const auto c = codebook.codeword(index);
  const double s = std::sqrt(es);
  CVec out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i] * s;
  return out;
}

namespace {

void check_length(const Codebook& cb, std::span<const cd> y) {
  if (y.size() != cb.codeword_length()) {
    throw InvalidArgument("received block has " + std::to_string(y.size()) +
                          " samples, codeword length is " + std::to_string(cb.codeword_length()));
  }
}

DetectionResult to_result(const CVec& corr) {
  DetectionResult r;
  r.z.resize(corr.size());
  for (std::size_t i = 0; i < corr.size(); ++i) r.z[i] = std::abs(corr[i]);
  r.best_index = decide(r.z);
  return r;
}

CVec correlate_cyclic_chip(const Codebook& cb, std::span<const cd> y) {
  const std::size_t n_sf = cb.params().n_sf();
  const std::size_t k = cb.params().k;
  const auto& spectra = cb.chip_spectra();
  CVec yk(n_sf), yf(n_sf), acc(n_sf, cd{});
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t n = 0; n < n_sf; ++n) yk[n] = y[n * k + s];
    fft::forward(yk, yf);
    const auto& u = spectra[s];
    for (std::size_t f = 0; f < n_sf; ++f) acc[f] += yf[f] * u[f];
  }
  return fft::inverse(acc);
}

CVec correlate_dechirp(const Codebook& cb, std::span<const cd> y) {
  const std::size_t n_sf = cb.params().n_sf();
  const auto c0 = cb.dechirp_reference();
  CVec d(n_sf);
  for (std::size_t n = 0; n < n_sf; ++n) d[n] = y[n] * std::conj(c0[n]);
  const auto spec = fft::forward(d);
  const auto a = static_cast<long long>(std::llround(cb.params().f0_theta()));
  const auto big_n = static_cast<long long>(n_sf);
  const long long step = ((a % big_n) + big_n) % big_n;
  CVec out(n_sf);
  for (std::size_t m = 0; m < n_sf; ++m) {
    out[m] = spec[static_cast<std::size_t>((step * static_cast<long long>(m)) % big_n)];
  }
  return out;
}

}  // namespace

CVec correlate_direct(const Codebook& codebook, std::span<const cd> y) {
  check_length(codebook, y);
  CVec out(codebook.num_codewords());
  for (std::size_t l = 0; l < out.size(); ++l) out[l] = inner(y, codebook.codeword(l));
  return out;
}

CVec correlate_fft(const Codebook& codebook, std::span<const cd> y) {
  check_length(codebook, y);
  switch (codebook.fast_path()) {
    case FastPath::CyclicChip:
      return correlate_cyclic_chip(codebook, y);
    case FastPath::Dechirp:
      return correlate_dechirp(codebook, y);
    case FastPath::None:
      break;
  }
  throw InvalidArgument("FFT path unavailable for " + to_string(codebook.scheme()) + " codebook");
}

CVec correlate(const Codebook& codebook, std::span<const cd> y, bool use_fft) {
  return use_fft && codebook.circulant() ? correlate_fft(codebook, y) : correlate_direct(codebook, y);
}

std::size_t decide(std::span<const double> z) {
  if (z.empty()) throw InvalidArgument("decide: empty correlation vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < z.size(); ++i) {
    if (z[i] > z[best]) best = i;
  }
  return best;
}

DetectionResult detect_direct(const Codebook& codebook, std::span<const cd> y) {
  return to_result(correlate_direct(codebook, y));
}

DetectionResult detect_fft(const Codebook& codebook, std::span<const cd> y) {
  return to_result(correlate_fft(codebook, y));
}

DetectionResult detect(const Codebook& codebook, std::span<const cd> y, bool use_fft) {
  return to_result(correlate(codebook, y, use_fft));
}

std::vector<DetectionResult> detect_multiuser(const MultiUserCodebook& mu, std::span<const cd> y,
                                              bool use_fft) {
  if (y.size() != mu.codeword_length()) {
    throw InvalidArgument("received block has " + std::to_string(y.size()) +
                          " samples, codeword length is " + std::to_string(mu.codeword_length()));
  }
  std::vector<DetectionResult> out;
  out.reserve(mu.num_users());
  for (const auto& cb : mu.users) out.push_back(detect(cb, y, use_fft));
  return out;
}

DetectionResult detect_mrc_two_tap(const Codebook& codebook, std::span<const cd> y,
                                   std::span<const cd> taps, bool use_fft) {
  if (taps.size() != 2) throw InvalidArgument("two-tap combining needs exactly 2 taps");
  const std::size_t len = codebook.codeword_length();
  if (y.size() != len && y.size() != len + 1) {
    throw InvalidArgument("two-tap combining needs " + std::to_string(len) + " or " +
                          std::to_string(len + 1) + " samples, got " + std::to_string(y.size()));
  }
  const auto z0 = correlate(codebook, y.first(len), use_fft);
  CVec y1(len);
  for (std::size_t i = 0; i + 1 < y.size(); ++i) y1[i] = y[i + 1];
  const auto z1 = correlate(codebook, y1, use_fft);
  CVec comb(z0.size());
  for (std::size_t l = 0; l < comb.size(); ++l) {
    comb[l] = std::conj(taps[0]) * z0[l] + std::conj(taps[1]) * z1[l];
  }
  return to_result(comb);
}

}  // namespace sims
