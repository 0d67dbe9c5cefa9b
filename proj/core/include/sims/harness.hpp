#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sims/channel.hpp"
#include "sims/codebook.hpp"
#include "sims/seqgen.hpp"
#include "sims/types.hpp"

namespace sims {

/// Detector used for two-tap channels. Auto combines both paths only when the
/// taps fade; otherwise it correlates the first L samples.
enum class Receiver { Auto, Matched, Mrc };

std::string to_string(Receiver r);
Receiver receiver_from_string(const std::string& s);

/// Root sequence parameters shared by all users. User m gets:
/// random / mseq: seed + m; gold: shift + m; zc: u = 2m + 1.
struct RootConfig {
  SequenceFamily family = SequenceFamily::UniformRandom;
  std::uint64_t seed = 1;
  std::uint64_t poly_a = 0;  // 0 selects a built-in primitive polynomial
  std::uint64_t poly_b = 0;
  std::uint64_t shift = 0;

  bool operator==(const RootConfig&) const = default;
};

RootSequence root_for_user(const RootConfig& cfg, std::size_t user, std::size_t n_sf,
                           std::uint32_t k);

struct SimConfig {
  Scheme scheme = Scheme::SIMS;
  int sf = 7;
  std::uint32_t k = 4;  // ignored for CSS (K = N_SF)
  double f0 = 1.0;
  double theta = 1.0;
  AmplitudeMode amplitudes = AmplitudeMode::NullOrigin;

  ChannelSpec channel;  // es_n0_db and seed are taken from the grid and master_seed
  std::vector<double> snr_grid_db;  // Es/N0 per block

  std::uint64_t trials_per_point = 100000;
  std::uint64_t min_bit_errors = 200;  // early stop; 0 runs every trial

  std::size_t users = 1;
  OffsetMode offsets = OffsetMode::UniformChip;
  std::optional<std::size_t> max_offset;  // default: codeword length

  std::uint64_t master_seed = 1;
  RootConfig roots;

  Receiver receiver = Receiver::Auto;
  bool use_fft = true;
  unsigned workers = 0;  // 0: hardware concurrency
  std::size_t dump_z = 0;  // correlation traces kept per SNR point and user

  /// Throws InvalidArgument on any violated invariant.
  void validate() const;
  WaveformParams waveform() const;
  /// Bits per block for this scheme.
  int bits_per_block() const;
  std::size_t resolved_max_offset() const;
};

struct BerPoint {
  double snr_db = 0.0;  // Es/N0 per block
  std::uint64_t trials = 0;  // detected blocks (users x trials)
  std::uint64_t bit_errors = 0;
  std::uint64_t block_errors = 0;
  double ber = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::vector<std::uint64_t> user_bit_errors;  // one entry per user

  bool operator==(const BerPoint&) const = default;
};

struct ZTrace {
  std::size_t snr_index = 0;
  std::uint64_t trial = 0;
  std::size_t user = 0;
  std::uint64_t sent = 0;
  std::uint64_t detected = 0;
  std::vector<double> z;

  bool operator==(const ZTrace&) const = default;
};

struct BerCurve {
  std::string scheme;
  int sf = 0;
  std::uint32_t k = 0;
  std::string channel;
  double rho = 0.0;
  bool fading = false;
  std::size_t users = 1;
  int bits_per_block = 0;
  std::uint64_t seed = 0;
  std::vector<BerPoint> points;
  std::vector<ZTrace> traces;

  std::string config_hash;
  std::string timestamp;
  std::string version;

  bool operator==(const BerCurve&) const = default;
};

/// Wilson score interval at 95% for `successes` out of `n`.
std::pair<double, double> wilson_interval(double p_hat, std::uint64_t n, double z = 1.959963984540054);
/// Half-width of the interval divided by z.
double wilson_sigma(const BerPoint& p);

/// Monte Carlo BER over the SNR grid. With users > 1 the counts are summed over
/// users, so ber is the per-user average.
BerCurve run_ber(const SimConfig& config);
/// Multi-user run; users = 1 gives the same result as run_ber.
BerCurve run_mu_ber(const SimConfig& config);

enum class SnrAxis { EsN0, EbN0, Chip };

std::string to_string(SnrAxis a);
SnrAxis snr_axis_from_string(const std::string& s);

/// Converts an Es/N0-per-block value to the requested axis.
double convert_snr(double es_n0_db, SnrAxis axis, int sf, int bits_per_block);

/// SNR at which the BER first falls through `target`, by linear interpolation of
/// log10(ber) between neighbouring points. Empty if the curve never crosses.
std::optional<double> snr_at_ber(const BerCurve& curve, double target, SnrAxis axis = SnrAxis::EsN0);

struct XcorrConfig {
  Scheme scheme = Scheme::SIMS;
  int sf = 8;
  std::uint32_t k = 4;
  AmplitudeMode amplitudes = AmplitudeMode::NullOrigin;
  RootConfig roots;
  std::size_t num_roots = 1;  // pairs are pooled over this many root draws
  std::vector<double> eps_grid;
  std::uint64_t pairs = 10000;
  std::uint64_t seed = 1;
};

struct XcorrRow {
  double eps = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t pairs = 0;
  double empirical = 0.0;
  double bound = 0.0;
};

std::vector<XcorrRow> run_xcorr_study(const XcorrConfig& config);

enum class Format { CSV, JSON };

std::string to_string(Format f);
Format format_from_string(const std::string& s);

inline constexpr const char* kCsvHeader =
    "scheme,sf,k,channel,rho,fading,users,snr_db,trials,bit_errors,ber,ci_lo,ci_hi,seed";

std::string to_csv(const BerCurve& curve);
BerCurve from_csv(const std::string& text);

/// Writes the curve; throws IoError if the file cannot be written.
void emit(const BerCurve& curve, const std::string& path, Format format);
BerCurve load(const std::string& path, Format format);

}  // namespace sims
