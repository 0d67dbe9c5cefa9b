#include "sims/seqgen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "sims/codebook.hpp"
#include "sims/fft.hpp"
#include "sims/log.hpp"
#include "sims/rng.hpp"

namespace sims {

std::string to_string(SequenceFamily f) {
  switch (f) {
    case SequenceFamily::MSeq:
      return "mseq";
    case SequenceFamily::Gold:
      return "gold";
    case SequenceFamily::ZadoffChuQuantized:
      return "zc";
    case SequenceFamily::UniformRandom:
      return "random";
  }
  return "unknown";
}

SequenceFamily family_from_string(const std::string& s) {
  if (s == "mseq") return SequenceFamily::MSeq;
  if (s == "gold") return SequenceFamily::Gold;
  if (s == "zc") return SequenceFamily::ZadoffChuQuantized;
  if (s == "random") return SequenceFamily::UniformRandom;
  throw InvalidArgument("unknown sequence family '" + s + "' (expected mseq|gold|zc|random)");
}

RootSequence::RootSequence(std::vector<std::uint32_t> values, std::uint32_t alphabet_size,
                           SequenceProvenance provenance)
    : values_(std::move(values)), alphabet_(alphabet_size), provenance_(provenance) {
  if (values_.size() < 2 || !is_power_of_two(values_.size())) {
    throw InvalidArgument("root sequence length " + std::to_string(values_.size()) +
                          " is not 2^SF with SF >= 1");
  }
  if (alphabet_ == 0) throw InvalidArgument("root sequence alphabet size must be positive");
  for (auto v : values_) {
    if (v >= alphabet_) {
      throw InvalidArgument("root sequence value " + std::to_string(v) + " outside [0, " +
                            std::to_string(alphabet_) + ")");
    }
  }
}

bool RootSequence::is_constant() const {
  return std::all_of(values_.begin(), values_.end(), [&](auto v) { return v == values_[0]; });
}

int poly_degree(std::uint64_t poly) {
  if (poly == 0) return -1;
  return 63 - std::countl_zero(poly);
}

std::vector<std::uint8_t> generate_msequence(std::uint64_t poly, std::uint64_t seed,
                                             std::size_t length) {
  const int r = poly_degree(poly);
  if (r < 1 || r > 62) throw InvalidArgument("LFSR polynomial degree must be in [1, 62]");
  const std::uint64_t mask = (std::uint64_t{1} << r) - 1;
  std::uint64_t state = seed & mask;
  if (state == 0) throw InvalidArgument("degenerate LFSR state (zero seed)");
  const std::uint64_t taps = poly & mask;

  // state bit i holds a[n + i]; the output is bit 0.
  std::vector<std::uint8_t> out(length);
  for (std::size_t n = 0; n < length; ++n) {
    out[n] = static_cast<std::uint8_t>(state & 1U);
    const auto feedback = static_cast<std::uint64_t>(std::popcount(state & taps) & 1);
    state = (state >> 1) | (feedback << (r - 1));
  }
  return out;
}

std::vector<std::uint8_t> generate_gold(std::uint64_t poly_a, std::uint64_t poly_b,
                                        std::uint64_t shift, std::size_t length) {
  const int ra = poly_degree(poly_a);
  const int rb = poly_degree(poly_b);
  if (ra != rb) {
    throw InvalidArgument("Gold generator polynomials have mismatched degrees (" +
                          std::to_string(ra) + " vs " + std::to_string(rb) + ")");
  }
  if (ra < 1 || ra > 62) throw InvalidArgument("Gold polynomial degree must be in [1, 62]");
  const std::uint64_t period = (std::uint64_t{1} << ra) - 1;
  if (shift >= period) {
    throw InvalidArgument("Gold shift must be in [0, 2^r - 1)");
  }
  auto a = generate_msequence(poly_a, 1, length);
  auto b = generate_msequence(poly_b, 1, static_cast<std::size_t>(period));
  for (std::size_t n = 0; n < length; ++n) {
    a[n] ^= b[(n + shift) % period];
  }
  return a;
}

namespace {

// x^r + ... + 1 with bit i holding the coefficient of x^i.
constexpr std::uint64_t kPrimitive[] = {
    0,      0,      0x7,     0xB,     0x13,    0x25,     0x43,
    0x83,   0x11D,  0x211,   0x409,   0x805,   0x1053,   0x201B,
    0x4443, 0x8003, 0x1100B, 0x20009, 0x40081, 0x80027,  0x100009,
};

struct GoldPair {
  int degree;
  std::uint64_t a, b;
};

constexpr GoldPair kGoldPairs[] = {
    {5, 0x25, 0x3D},   {6, 0x43, 0x67},    {7, 0x89, 0x8F},
    {9, 0x211, 0x259}, {10, 0x409, 0x50D}, {11, 0x805, 0x925},
};

}  // namespace

std::uint64_t primitive_polynomial(int degree) {
  if (degree < 2 || degree >= static_cast<int>(std::size(kPrimitive))) {
    throw InvalidArgument("no built-in primitive polynomial of degree " + std::to_string(degree));
  }
  return kPrimitive[degree];
}

std::pair<std::uint64_t, std::uint64_t> gold_preferred_pair(int degree) {
  for (const auto& p : kGoldPairs) {
    if (p.degree == degree) return {p.a, p.b};
  }
  throw InvalidArgument("no built-in Gold preferred pair of degree " + std::to_string(degree) +
                        "; pass both polynomials explicitly");
}

std::vector<std::uint32_t> binary_to_kary(std::span<const std::uint8_t> bits, std::uint32_t k) {
  if (!is_power_of_two(k)) {
    throw InvalidArgument("binary_to_kary: K = " + std::to_string(k) + " is not a power of two");
  }
  const int width = ilog2(k);
  if (width == 0) return std::vector<std::uint32_t>(bits.size(), 0U);
  const std::size_t count = bits.size() / static_cast<std::size_t>(width);
  if (bits.size() % static_cast<std::size_t>(width) != 0) {
    warn("binary_to_kary: dropping " + std::to_string(bits.size() % width) +
         " trailing bit(s) that do not fill a symbol");
  }
  std::vector<std::uint32_t> out(count);
  for (std::size_t s = 0; s < count; ++s) {
    std::uint32_t v = 0;
    for (int b = 0; b < width; ++b) v = (v << 1) | (bits[s * width + b] & 1U);
    out[s] = v;
  }
  return out;
}

namespace {

void check_root_dims(std::size_t n_sf, std::uint32_t k) {
  if (n_sf < 2 || !is_power_of_two(n_sf)) {
    throw InvalidArgument("N_SF = " + std::to_string(n_sf) + " is not 2^SF with SF >= 1");
  }
  if (k == 0) throw InvalidArgument("alphabet size K must be positive");
}

std::size_t bits_needed(std::size_t n_sf, std::uint32_t k) {
  if (!is_power_of_two(k)) {
    throw InvalidArgument("binary families need K to be a power of two, got " + std::to_string(k));
  }
  return n_sf * static_cast<std::size_t>(ilog2(k));
}

}  // namespace

RootSequence generate_msequence_root(std::uint64_t poly, std::uint64_t seed, std::size_t n_sf,
                                     std::uint32_t k) {
  check_root_dims(n_sf, k);
  auto bits = generate_msequence(poly, seed, bits_needed(n_sf, k));
  auto symbols = k == 1 ? std::vector<std::uint32_t>(n_sf, 0U) : binary_to_kary(bits, k);
  SequenceProvenance p{.family = SequenceFamily::MSeq, .seed = seed, .poly_a = poly};
  return RootSequence(std::move(symbols), k, p);
}

RootSequence generate_gold_root(std::uint64_t poly_a, std::uint64_t poly_b, std::uint64_t shift,
                                std::size_t n_sf, std::uint32_t k) {
  check_root_dims(n_sf, k);
  auto bits = generate_gold(poly_a, poly_b, shift, bits_needed(n_sf, k));
  auto symbols = k == 1 ? std::vector<std::uint32_t>(n_sf, 0U) : binary_to_kary(bits, k);
  SequenceProvenance p{
      .family = SequenceFamily::Gold, .poly_a = poly_a, .poly_b = poly_b, .shift = shift};
  return RootSequence(std::move(symbols), k, p);
}

RootSequence generate_zc_quantized(std::uint64_t u, std::size_t n_sf, std::uint32_t k) {
  check_root_dims(n_sf, k);
  if (std::gcd(u, static_cast<std::uint64_t>(n_sf)) != 1) {
    throw InvalidArgument("Zadoff-Chu root index u = " + std::to_string(u) +
                          " is not coprime with N_SF = " + std::to_string(n_sf));
  }
  // frac(u n (n+1) / (2N)) = (u * n(n+1)/2 mod N) / N, and n(n+1)/2 is an integer.
  // N_SF <= 2^24 and K < 2^32 keep every product below 2^64.
  if (n_sf > (std::size_t{1} << 24)) throw InvalidArgument("Zadoff-Chu roots need N_SF <= 2^24");
  const std::uint64_t big_n = n_sf;
  std::vector<std::uint32_t> values(n_sf);
  for (std::uint64_t n = 0; n < big_n; ++n) {
    const std::uint64_t tri = (n * (n + 1) / 2) % big_n;
    const std::uint64_t residue = ((u % big_n) * tri) % big_n;
    values[n] = static_cast<std::uint32_t>((residue * k) / big_n % k);
  }
  SequenceProvenance p{.family = SequenceFamily::ZadoffChuQuantized, .root_index = u};
  return RootSequence(std::move(values), k, p);
}

RootSequence generate_random_root(std::uint64_t seed, std::size_t n_sf, std::uint32_t k) {
  check_root_dims(n_sf, k);
  Rng rng(seed);
  std::vector<std::uint32_t> values(n_sf);
  for (auto& v : values) v = static_cast<std::uint32_t>(rng.below(k));
  SequenceProvenance p{.family = SequenceFamily::UniformRandom, .seed = seed};
  return RootSequence(std::move(values), k, p);
}

RootSequence regenerate(const SequenceProvenance& p, std::size_t n_sf, std::uint32_t k) {
  switch (p.family) {
    case SequenceFamily::MSeq:
      return generate_msequence_root(p.poly_a, p.seed, n_sf, k);
    case SequenceFamily::Gold:
      return generate_gold_root(p.poly_a, p.poly_b, p.shift, n_sf, k);
    case SequenceFamily::ZadoffChuQuantized:
      return generate_zc_quantized(p.root_index, n_sf, k);
    case SequenceFamily::UniformRandom:
      return generate_random_root(p.seed, n_sf, k);
  }
  throw InvalidArgument("unknown sequence family");
}

RootSequence cyclic_shift(const RootSequence& seq, std::size_t l) {
  if (l >= seq.size()) {
    throw InvalidArgument("cyclic shift " + std::to_string(l) + " outside [0, " +
                          std::to_string(seq.size()) + ")");
  }
  return RootSequence(cyclic_shift<std::uint32_t>(seq.values(), l), seq.alphabet_size(),
                      seq.provenance());
}

double CorrelationProfile::max_magnitude(bool skip_lag0) const {
  double m = 0.0;
  for (std::size_t i = skip_lag0 ? 1 : 0; i < values.size(); ++i) m = std::max(m, std::abs(values[i]));
  return m;
}

CorrelationProfile cross_correlation_profile(std::span<const cd> a, std::span<const cd> b,
                                             Normalization norm, CorrelationPath path) {
  if (a.size() != b.size()) {
    throw InvalidArgument("cross_correlation_profile: length mismatch (" +
                          std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  const std::size_t n = a.size();
  CorrelationProfile out;
  out.normalization = norm;
  if (n == 0) return out;

  double scale = 1.0;
  if (norm == Normalization::Energy) {
    const double ea = energy(a), eb = energy(b);
    if (ea == 0.0 || eb == 0.0) throw InvalidArgument("cross_correlation_profile: zero-energy input");
    scale = 1.0 / std::sqrt(ea * eb);
  } else {
    scale = 1.0 / static_cast<double>(n);
  }

  if (path == CorrelationPath::Auto) path = n > 64 ? CorrelationPath::Fft : CorrelationPath::Direct;

  out.values.assign(n, cd{});
  if (path == CorrelationPath::Direct) {
    for (std::size_t lag = 0; lag < n; ++lag) {
      cd acc{};
      for (std::size_t i = 0; i < n; ++i) acc += a[i] * std::conj(b[(i + n - lag) % n]);
      out.values[lag] = acc * scale;
    }
  } else {
    auto fa = fft::forward(a);
    auto fb = fft::forward(b);
    for (std::size_t f = 0; f < n; ++f) fa[f] *= std::conj(fb[f]);
    auto r = fft::inverse(fa);
    const double s = scale / static_cast<double>(n);
    for (std::size_t lag = 0; lag < n; ++lag) out.values[lag] = r[lag] * s;
  }
  return out;
}

namespace {

double normalized_inner(std::span<const cd> a, std::span<const cd> b) {
  const double ea = energy(a), eb = energy(b);
  if (ea == 0.0 || eb == 0.0) return 0.0;
  return std::abs(inner(a, b)) / std::sqrt(ea * eb);
}

}  // namespace

TailCount tail_count(const Codebook& codebook, double eps, std::uint64_t num_pairs,
                     std::uint64_t seed) {
  if (!(eps > 0.0)) throw InvalidArgument("empirical_tail: eps must be positive");
  if (num_pairs == 0) throw InvalidArgument("empirical_tail: num_pairs must be positive");
  const std::uint64_t n = codebook.num_codewords();
  if (n < 2) throw InvalidArgument("empirical_tail: codebook needs at least 2 codewords");
  const std::uint64_t total = n * (n - 1) / 2;

  // Pair index p enumerates (i, j), i < j, row by row.
  std::vector<std::uint64_t> picks;
  if (num_pairs >= total) {
    picks.resize(total);
    std::iota(picks.begin(), picks.end(), std::uint64_t{0});
  } else {
    // Floyd's algorithm: num_pairs distinct indices from [0, total).
    Rng rng(seed);
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(num_pairs * 2);
    for (std::uint64_t j = total - num_pairs; j < total; ++j) {
      const std::uint64_t t = rng.below(j + 1);
      if (!chosen.insert(t).second) chosen.insert(j);
    }
    picks.assign(chosen.begin(), chosen.end());
    std::sort(picks.begin(), picks.end());
  }

  TailCount tc;
  std::uint64_t row = 0, row_start = 0;
  for (std::uint64_t p : picks) {
    while (p >= row_start + (n - 1 - row)) {
      row_start += n - 1 - row;
      ++row;
    }
    const std::uint64_t col = row + 1 + (p - row_start);
    if (normalized_inner(codebook.codeword(row), codebook.codeword(col)) >= eps) ++tc.hits;
    ++tc.pairs;
  }
  return tc;
}

double empirical_tail(const Codebook& codebook, double eps, std::uint64_t num_pairs,
                      std::uint64_t seed) {
  return tail_count(codebook, eps, num_pairs, seed).fraction();
}

double coherence(std::span<const CVec> sequences, bool all_lags) {
  if (sequences.size() < 2) throw InvalidArgument("coherence: need >= 2 sequences");
  const std::size_t len = sequences[0].size();
  for (const auto& s : sequences) {
    if (s.size() != len) throw InvalidArgument("coherence: sequences differ in length");
    if (energy(s) == 0.0) throw InvalidArgument("coherence: zero-energy sequence");
  }
  double mu = 0.0;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    for (std::size_t j = i + 1; j < sequences.size(); ++j) {
      if (all_lags) {
        mu = std::max(mu, cross_correlation_profile(sequences[i], sequences[j]).max_magnitude());
      } else {
        mu = std::max(mu, normalized_inner(sequences[i], sequences[j]));
      }
    }
  }
  return mu;
}

CVec bipolar(std::span<const std::uint8_t> bits) {
  CVec out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) out[i] = bits[i] ? -1.0 : 1.0;
  return out;
}

}  // namespace sims
