#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sims/codebook.hpp"
#include "sims/types.hpp"

namespace sims {

struct DetectionResult {
  std::vector<double> z;  // |<y, c_l>| per codeword
  std::size_t best_index = 0;  // lowest index among the maxima
};

/// LSB-first: index = sum bits[i] 2^i.
std::uint64_t map_bits(std::span<const std::uint8_t> bits);
/// Same, but requires bits.size() == codebook.bits_per_codeword().
std::uint64_t map_bits(const Codebook& codebook, std::span<const std::uint8_t> bits);

/// Inverse of map_bits. Throws unless index < 2^n_b.
std::vector<std::uint8_t> unmap_index(std::uint64_t index, int n_b);

/// sqrt(es) * codeword[index].
CVec modulate(const Codebook& codebook, std::size_t index, double es = 1.0);

/// <y, c_l> for every codeword, by direct inner products.
CVec correlate_direct(const Codebook& codebook, std::span<const cd> y);
/// Same values through the codebook's FFT path. Throws "FFT path unavailable"
/// if the codebook has none.
CVec correlate_fft(const Codebook& codebook, std::span<const cd> y);
/// FFT path when requested and available, direct otherwise.
CVec correlate(const Codebook& codebook, std::span<const cd> y, bool use_fft = true);

/// argmax of z with the lowest index winning ties.
std::size_t decide(std::span<const double> z);

DetectionResult detect_direct(const Codebook& codebook, std::span<const cd> y);
DetectionResult detect_fft(const Codebook& codebook, std::span<const cd> y);
DetectionResult detect(const Codebook& codebook, std::span<const cd> y, bool use_fft = true);

/// Independent per-user detection over the shared observation.
std::vector<DetectionResult> detect_multiuser(const MultiUserCodebook& mu, std::span<const cd> y,
                                              bool use_fft = true);

/// Two-path combining with known taps: z_l = |conj(h0) <y_0, c_l> + conj(h1) <y_1, c_l>|,
/// where y_d is y advanced by d samples. y has the codeword length or one more
/// sample; a missing tail sample is taken as zero.
DetectionResult detect_mrc_two_tap(const Codebook& codebook, std::span<const cd> y,
                                   std::span<const cd> taps, bool use_fft = true);

}  // namespace sims
