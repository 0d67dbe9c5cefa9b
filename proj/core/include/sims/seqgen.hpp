#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sims/types.hpp"

namespace sims {

class Codebook;

enum class SequenceFamily { MSeq, Gold, ZadoffChuQuantized, UniformRandom };

std::string to_string(SequenceFamily f);
SequenceFamily family_from_string(const std::string& s);

/// Generator parameters sufficient to regenerate a root sequence.
struct SequenceProvenance {
  SequenceFamily family = SequenceFamily::UniformRandom;
  std::uint64_t seed = 0;    // UniformRandom seed, or LFSR initial state (MSeq / Gold)
  std::uint64_t poly_a = 0;  // MSeq / Gold
  std::uint64_t poly_b = 0;  // Gold
  std::uint64_t shift = 0;   // Gold relative shift
  std::uint64_t root_index = 0;  // Zadoff-Chu u

  bool operator==(const SequenceProvenance&) const = default;
};

/// Length-N_SF sequence of subcarrier indices in [0, K).
class RootSequence {
 public:
  /// Throws InvalidArgument unless values.size() is a power of two >= 2 and
  /// every value is below alphabet_size.
  RootSequence(std::vector<std::uint32_t> values, std::uint32_t alphabet_size,
               SequenceProvenance provenance);

  std::span<const std::uint32_t> values() const { return values_; }
  std::uint32_t operator[](std::size_t n) const { return values_[n]; }
  std::size_t size() const { return values_.size(); }
  int sf() const { return ilog2(values_.size()); }
  std::uint32_t alphabet_size() const { return alphabet_; }
  SequenceFamily family() const { return provenance_.family; }
  const SequenceProvenance& provenance() const { return provenance_; }

  /// True if every chip carries the same index.
  bool is_constant() const;

  bool operator==(const RootSequence& other) const {
    return alphabet_ == other.alphabet_ && values_ == other.values_;
  }

 private:
  std::vector<std::uint32_t> values_;
  std::uint32_t alphabet_;
  SequenceProvenance provenance_;
};

// ---------------------------------------------------------------------------
// Binary generators

/// Fibonacci LFSR output for the polynomial whose coefficient of x^i is bit i of
/// `poly` (x^3 + x + 1 is 0b1011). The first r outputs are the seed bits, LSB
/// first; afterwards a[n + r] = XOR_i c_i a[n + i]. Primitivity is not checked.
std::vector<std::uint8_t> generate_msequence(std::uint64_t poly, std::uint64_t seed,
                                             std::size_t length);

/// XOR of the m-sequence of poly_a with the m-sequence of poly_b advanced by
/// `shift` chips. Both LFSRs start from state 1.
std::vector<std::uint8_t> generate_gold(std::uint64_t poly_a, std::uint64_t poly_b,
                                        std::uint64_t shift, std::size_t length);

/// Degree of a polynomial mask (index of its highest set bit).
int poly_degree(std::uint64_t poly);

/// A primitive polynomial of the given degree in [2, 20].
std::uint64_t primitive_polynomial(int degree);

/// A preferred pair for Gold sequences of degree 5, 6, 7, 9, 10 or 11.
/// Throws for other degrees (none exist when the degree is a multiple of 4).
std::pair<std::uint64_t, std::uint64_t> gold_preferred_pair(int degree);

/// Groups log2(K) bits into one symbol, MSB first. Trailing bits that do not
/// fill a symbol are dropped with a warning.
std::vector<std::uint32_t> binary_to_kary(std::span<const std::uint8_t> bits, std::uint32_t k);

// ---------------------------------------------------------------------------
// Root sequence generators

RootSequence generate_msequence_root(std::uint64_t poly, std::uint64_t seed, std::size_t n_sf,
                                     std::uint32_t k);
RootSequence generate_gold_root(std::uint64_t poly_a, std::uint64_t poly_b, std::uint64_t shift,
                                std::size_t n_sf, std::uint32_t k);

/// q(n) = floor(K * frac(u n (n+1) / (2 N_SF))), evaluated in exact integer arithmetic.
RootSequence generate_zc_quantized(std::uint64_t u, std::size_t n_sf, std::uint32_t k);

/// i.i.d. uniform symbols from Rng(seed).
RootSequence generate_random_root(std::uint64_t seed, std::size_t n_sf, std::uint32_t k);

/// Rebuilds a root from its provenance.
RootSequence regenerate(const SequenceProvenance& provenance, std::size_t n_sf, std::uint32_t k);

/// output[n] = input[(n - l) mod N].
RootSequence cyclic_shift(const RootSequence& seq, std::size_t l);

template <typename T>
std::vector<T> cyclic_shift(std::span<const T> v, std::size_t l) {
  const std::size_t n = v.size();
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = v[(i + n - l % n) % n];
  return out;
}

// ---------------------------------------------------------------------------
// Correlation analysis

enum class Normalization {
  Energy,  // divide by ||a|| ||b||
  Length,  // divide by the vector length
};

enum class CorrelationPath { Auto, Direct, Fft };

struct CorrelationProfile {
  /// values[lag] = <a, shift(b, lag)> / norm, with shift as in cyclic_shift.
  CVec values;
  Normalization normalization = Normalization::Energy;

  std::size_t size() const { return values.size(); }
  double max_magnitude(bool skip_lag0 = false) const;
};

/// Circular cross-correlation over every lag. Auto uses the FFT for length > 64.
CorrelationProfile cross_correlation_profile(std::span<const cd> a, std::span<const cd> b,
                                             Normalization norm = Normalization::Energy,
                                             CorrelationPath path = CorrelationPath::Auto);

struct TailCount {
  std::uint64_t hits = 0;
  std::uint64_t pairs = 0;
  double fraction() const { return pairs ? static_cast<double>(hits) / pairs : 0.0; }
};

/// Counts sampled distinct codeword pairs whose normalized inner product has
/// magnitude >= eps. Pairs are drawn without replacement; if num_pairs covers
/// every pair, all pairs are enumerated.
TailCount tail_count(const Codebook& codebook, double eps, std::uint64_t num_pairs,
                     std::uint64_t seed);

double empirical_tail(const Codebook& codebook, double eps, std::uint64_t num_pairs,
                      std::uint64_t seed);

/// Maximum normalized correlation magnitude over distinct pairs, at every
/// cyclic lag (or lag 0 only).
double coherence(std::span<const CVec> sequences, bool all_lags = true);

/// +1 / -1 mapping of a binary sequence (0 -> +1).
CVec bipolar(std::span<const std::uint8_t> bits);

}  // namespace sims
