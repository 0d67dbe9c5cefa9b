#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sims/seqgen.hpp"
#include "sims/types.hpp"

namespace sims {

struct WaveformParams {
  int sf = 7;
  std::uint32_t k = 4;  // subcarriers per chip (SIMS), codeword count (FSK)
  double f0 = 1.0;
  double theta = 1.0;

  std::size_t n_sf() const { return std::size_t{1} << sf; }
  double f0_theta() const { return f0 * theta; }

  /// Throws InvalidArgument for sf outside [1, 24], K = 0, or non-finite f0 / theta.
  void validate() const;

  bool operator==(const WaveformParams&) const = default;
};

/// Per-subcarrier amplitudes A(k).
struct AmplitudeProfile {
  CVec d;

  /// A(k) = 1. Constant modulus.
  static AmplitudeProfile ones(std::uint32_t k);
  /// A(0) = 0, A(k) = 1 otherwise. Removes the DC sample of every chip, which
  /// makes the chip-level correlation of independent roots zero-mean.
  static AmplitudeProfile null_origin(std::uint32_t k);
  /// Unit-modulus entries with i.i.d. uniform phases.
  static AmplitudeProfile random_phase(std::uint32_t k, std::uint64_t seed);

  bool constant_modulus(double tol = 1e-12) const;
  double max_magnitude() const;

  bool operator==(const AmplitudeProfile&) const = default;
};

enum class AmplitudeMode { Ones, NullOrigin };

std::string to_string(AmplitudeMode m);
AmplitudeMode amplitude_mode_from_string(const std::string& s);
AmplitudeProfile make_amplitudes(AmplitudeMode mode, std::uint32_t k);

/// Which FFT detector applies to a codebook.
enum class FastPath {
  None,
  CyclicChip,  // SIMS: codeword l is codeword 0 shifted by l chips
  Dechirp,     // CSS with integer f0*theta: dechirp then DFT
};

/// Immutable family of unit-energy codewords.
class Codebook {
 public:
  Scheme scheme() const { return scheme_; }
  const WaveformParams& params() const { return params_; }
  std::size_t num_codewords() const { return num_codewords_; }
  std::size_t codeword_length() const { return length_; }
  /// Bits carried per codeword (floor of log2 of the codeword count).
  int bits_per_codeword() const;

  std::span<const cd> codeword(std::size_t l) const;
  const std::optional<RootSequence>& root() const { return root_; }
  const AmplitudeProfile& amplitudes() const { return amplitudes_; }

  FastPath fast_path() const { return fast_path_; }
  bool circulant() const { return fast_path_ != FastPath::None; }

  /// CyclicChip only: conj(DFT(u_k)) / N_SF, where u_k[n] = c_0[n K + k].
  const std::vector<CVec>& chip_spectra() const { return chip_spectra_; }
  /// Dechirp only: c_0.
  std::span<const cd> dechirp_reference() const { return codeword(0); }

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  friend Codebook build_sims(const RootSequence&, const WaveformParams&, const AmplitudeProfile&);
  friend Codebook build_fsk(const WaveformParams&);
  friend Codebook build_css(const WaveformParams&);

  Codebook() = default;
  void add_warning(std::string msg);

  Scheme scheme_ = Scheme::SIMS;
  WaveformParams params_;
  std::size_t num_codewords_ = 0;
  std::size_t length_ = 0;
  CVec data_;
  std::optional<RootSequence> root_;
  AmplitudeProfile amplitudes_;
  FastPath fast_path_ = FastPath::None;
  std::vector<CVec> chip_spectra_;
  std::vector<std::string> warnings_;
};

/// Codeword l: for chip n, K samples A(k) exp(j 2pi/K f0 theta q_l(n) k), stacked
/// in chip order, then scaled to unit energy. q_l is the root shifted by l.
Codebook build_sims(const RootSequence& root, const WaveformParams& params,
                    const AmplitudeProfile& amplitudes);

/// Codeword k (k < K): exp(j 2pi/N_SF f0 theta k n), unit energy. Stored as the
/// transmitted waveform, without conjugation.
Codebook build_fsk(const WaveformParams& params);

/// Codeword m: exp(j 2pi/N_SF f0 theta ((m + n) mod N_SF) n). Requires K = N_SF.
Codebook build_css(const WaveformParams& params);

/// Builds the codebook named by `scheme`. For FSK and CSS the root and
/// amplitudes are ignored; CSS forces K = N_SF.
Codebook build(Scheme scheme, const WaveformParams& params, const RootSequence* root,
               const AmplitudeProfile& amplitudes);

/// Rebuilds SIMS codeword l as (I (x) diag(d)) c_l and by the per-sample formula,
/// and checks both against `candidate` (the stored codeword by default) to 1e-10.
bool verify_kronecker(const Codebook& codebook, std::size_t l);
bool verify_kronecker(const Codebook& codebook, std::size_t l, std::span<const cd> candidate);

struct MultiUserCodebook {
  std::vector<Codebook> users;

  std::size_t num_users() const { return users.size(); }
  std::size_t total_codewords() const;
  std::size_t codeword_length() const { return users.empty() ? 0 : users[0].codeword_length(); }
};

/// One SIMS codebook per root. Throws on fewer than 2 roots or on duplicates.
MultiUserCodebook build_multiuser(std::span<const RootSequence> roots, const WaveformParams& params,
                                  const AmplitudeProfile& amplitudes);

}  // namespace sims
