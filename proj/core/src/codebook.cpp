#include "sims/codebook.hpp"

#include <cmath>
#include <numbers>

#include "sims/fft.hpp"
#include "sims/log.hpp"
#include "sims/rng.hpp"

namespace sims {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(j 2pi x / den), with x reduced modulo den first to keep the angle small.
cd cis_ratio(double x, double den) {
  double r = std::fmod(x, den);
  if (r < 0) r += den;
  return std::polar(1.0, kTwoPi * r / den);
}

}  // namespace

void WaveformParams::validate() const {
  if (sf < 1 || sf > 24) throw InvalidArgument("sf must be in [1, 24], got " + std::to_string(sf));
  if (k == 0) throw InvalidArgument("K must be positive");
  if (!std::isfinite(f0) || !std::isfinite(theta)) {
    throw InvalidArgument("f0 and theta must be finite");
  }
}

AmplitudeProfile AmplitudeProfile::ones(std::uint32_t k) { return {CVec(k, cd{1.0, 0.0})}; }

AmplitudeProfile AmplitudeProfile::null_origin(std::uint32_t k) {
  if (k < 2) throw InvalidArgument("null-origin amplitudes need K >= 2");
  AmplitudeProfile p = ones(k);
  p.d[0] = 0.0;
  return p;
}

AmplitudeProfile AmplitudeProfile::random_phase(std::uint32_t k, std::uint64_t seed) {
  Rng rng(seed);
  AmplitudeProfile p;
  p.d.resize(k);
  for (auto& v : p.d) v = rng.unit_phase();
  return p;
}

bool AmplitudeProfile::constant_modulus(double tol) const {
  for (const auto& v : d) {
    if (std::abs(std::abs(v) - 1.0) > tol) return false;
  }
  return true;
}

double AmplitudeProfile::max_magnitude() const {
  double m = 0.0;
  for (const auto& v : d) m = std::max(m, std::abs(v));
  return m;
}

std::string to_string(AmplitudeMode m) { return m == AmplitudeMode::Ones ? "ones" : "null-origin"; }

AmplitudeMode amplitude_mode_from_string(const std::string& s) {
  if (s == "ones") return AmplitudeMode::Ones;
  if (s == "null-origin") return AmplitudeMode::NullOrigin;
  throw InvalidArgument("unknown amplitude mode '" + s + "' (expected ones|null-origin)");
}

AmplitudeProfile make_amplitudes(AmplitudeMode mode, std::uint32_t k) {
  return mode == AmplitudeMode::Ones ? AmplitudeProfile::ones(k) : AmplitudeProfile::null_origin(k);
}

int Codebook::bits_per_codeword() const {
  int b = 0;
  while ((std::size_t{2} << b) <= num_codewords_) ++b;
  return num_codewords_ >= 2 ? b : 0;
}

std::span<const cd> Codebook::codeword(std::size_t l) const {
  if (l >= num_codewords_) {
    throw InvalidArgument("codeword index " + std::to_string(l) + " out of range [0, " +
                          std::to_string(num_codewords_) + ")");
  }
  return std::span<const cd>(data_).subspan(l * length_, length_);
}

void Codebook::add_warning(std::string msg) {
  warn(msg);
  warnings_.push_back(std::move(msg));
}

Codebook build_sims(const RootSequence& root, const WaveformParams& params,
                    const AmplitudeProfile& amplitudes) {
  params.validate();
  const std::size_t n_sf = params.n_sf();
  const std::uint32_t k = params.k;
  if (root.alphabet_size() != k) {
    throw InvalidArgument("root alphabet size " + std::to_string(root.alphabet_size()) +
                          " does not match K = " + std::to_string(k));
  }
  if (root.size() != n_sf) {
    throw InvalidArgument("root length " + std::to_string(root.size()) + " is not 2^SF = " +
                          std::to_string(n_sf));
  }
  if (amplitudes.d.size() != k) {
    throw InvalidArgument("amplitude profile has " + std::to_string(amplitudes.d.size()) +
                          " entries, expected K = " + std::to_string(k));
  }
  double amp_energy = 0.0;
  for (const auto& a : amplitudes.d) amp_energy += std::norm(a);
  if (amp_energy == 0.0) throw InvalidArgument("amplitude profile has zero energy");

  Codebook cb;
  cb.scheme_ = Scheme::SIMS;
  cb.params_ = params;
  cb.num_codewords_ = n_sf;
  cb.length_ = static_cast<std::size_t>(k) * n_sf;
  cb.root_ = root;
  cb.amplitudes_ = amplitudes;
  cb.fast_path_ = FastPath::CyclicChip;

  if (k == 1) cb.add_warning("SIMS codebook with K = 1 carries no subcarrier diversity");
  if (root.is_constant()) {
    cb.add_warning("constant root sequence: all SIMS codewords are identical (degenerate codebook)");
  }

  // Every chip of every codeword comes from the same K-sample tone table.
  const double a = params.f0_theta();
  std::vector<CVec> tones(k, CVec(k));
  for (std::uint32_t q = 0; q < k; ++q) {
    for (std::uint32_t s = 0; s < k; ++s) {
      tones[q][s] = amplitudes.d[s] * cis_ratio(a * q * s, static_cast<double>(k));
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_sf) * amp_energy);
  cb.data_.resize(cb.num_codewords_ * cb.length_);
  for (std::size_t l = 0; l < n_sf; ++l) {
    cd* out = cb.data_.data() + l * cb.length_;
    for (std::size_t n = 0; n < n_sf; ++n) {
      const auto q = root[(n + n_sf - l) % n_sf];
      for (std::uint32_t s = 0; s < k; ++s) out[n * k + s] = tones[q][s] * scale;
    }
  }

  cb.chip_spectra_.resize(k);
  CVec u(n_sf);
  const auto c0 = cb.codeword(0);
  for (std::uint32_t s = 0; s < k; ++s) {
    for (std::size_t n = 0; n < n_sf; ++n) u[n] = c0[n * k + s];
    auto spec = fft::forward(u);
    for (auto& v : spec) v = std::conj(v) / static_cast<double>(n_sf);
    cb.chip_spectra_[s] = std::move(spec);
  }
  return cb;
}

Codebook build_fsk(const WaveformParams& params) {
  params.validate();
  const std::size_t n_sf = params.n_sf();
  if (params.k > n_sf) {
    throw InvalidArgument("FSK needs K <= N_SF (K = " + std::to_string(params.k) +
                          ", N_SF = " + std::to_string(n_sf) + ")");
  }
  Codebook cb;
  cb.scheme_ = Scheme::FSK;
  cb.params_ = params;
  cb.num_codewords_ = params.k;
  cb.length_ = n_sf;
  cb.amplitudes_ = AmplitudeProfile::ones(params.k);
  cb.data_.resize(cb.num_codewords_ * n_sf);
  const double a = params.f0_theta();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_sf));
  for (std::size_t kk = 0; kk < params.k; ++kk) {
    for (std::size_t n = 0; n < n_sf; ++n) {
      cb.data_[kk * n_sf + n] =
          cis_ratio(a * static_cast<double>(kk) * static_cast<double>(n), static_cast<double>(n_sf)) *
          scale;
    }
  }
  return cb;
}

Codebook build_css(const WaveformParams& params) {
  params.validate();
  const std::size_t n_sf = params.n_sf();
  if (params.k != n_sf) {
    throw InvalidArgument("CSS needs K = N_SF (K = " + std::to_string(params.k) +
                          ", N_SF = " + std::to_string(n_sf) + ")");
  }
  Codebook cb;
  cb.scheme_ = Scheme::CSS;
  cb.params_ = params;
  cb.num_codewords_ = n_sf;
  cb.length_ = n_sf;
  cb.amplitudes_ = AmplitudeProfile::ones(params.k);
  const double a = params.f0_theta();
  if (a == std::round(a)) cb.fast_path_ = FastPath::Dechirp;
  cb.data_.resize(n_sf * n_sf);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_sf));
  for (std::size_t m = 0; m < n_sf; ++m) {
    for (std::size_t n = 0; n < n_sf; ++n) {
      const double idx = static_cast<double>((m + n) % n_sf);
      cb.data_[m * n_sf + n] =
          cis_ratio(a * idx * static_cast<double>(n), static_cast<double>(n_sf)) * scale;
    }
  }
  return cb;
}

Codebook build(Scheme scheme, const WaveformParams& params, const RootSequence* root,
               const AmplitudeProfile& amplitudes) {
  switch (scheme) {
    case Scheme::SIMS:
      if (root == nullptr) throw InvalidArgument("SIMS codebook needs a root sequence");
      return build_sims(*root, params, amplitudes);
    case Scheme::FSK:
      return build_fsk(params);
    case Scheme::CSS: {
      WaveformParams p = params;
      p.k = static_cast<std::uint32_t>(p.n_sf());
      return build_css(p);
    }
  }
  throw InvalidArgument("unknown scheme");
}

bool verify_kronecker(const Codebook& codebook, std::size_t l) {
  return verify_kronecker(codebook, l, codebook.codeword(l));
}

bool verify_kronecker(const Codebook& codebook, std::size_t l, std::span<const cd> candidate) {
  if (codebook.scheme() != Scheme::SIMS || !codebook.root()) {
    throw InvalidArgument("verify_kronecker needs a SIMS codebook");
  }
  const auto& p = codebook.params();
  const std::size_t n_sf = p.n_sf();
  const std::size_t k = p.k;
  if (l >= n_sf) throw InvalidArgument("codeword index out of range");
  if (candidate.size() != n_sf * k) throw InvalidArgument("candidate length mismatch");
  const auto& root = *codebook.root();
  const auto& d = codebook.amplitudes().d;
  const double a = p.f0_theta();

  double amp_energy = 0.0;
  for (const auto& v : d) amp_energy += std::norm(v);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_sf) * amp_energy);

  // (a) unit-amplitude spreading vector c_l, then the block-diagonal diag(d) per chip.
  const auto shifted = cyclic_shift(root, l);
  CVec c(n_sf * k);
  for (std::size_t n = 0; n < n_sf; ++n) {
    for (std::size_t s = 0; s < k; ++s) {
      const double ph = kTwoPi / static_cast<double>(k) * a * shifted[n] * static_cast<double>(s);
      c[n * k + s] = cd(std::cos(ph), std::sin(ph));
    }
  }
  CVec via_kron(n_sf * k);
  for (std::size_t blk = 0; blk < n_sf; ++blk) {
    for (std::size_t r = 0; r < k; ++r) via_kron[blk * k + r] = d[r] * c[blk * k + r] * scale;
  }

  // (b) per-sample formula indexed by the flat sample position.
  double dev = 0.0;
  for (std::size_t i = 0; i < n_sf * k; ++i) {
    const std::size_t n = i / k;
    const std::size_t s = i % k;
    const std::uint32_t q = root[(n + n_sf - l) % n_sf];
    const cd direct = d[s] * std::exp(cd(0.0, kTwoPi * a * q * static_cast<double>(s) / k)) * scale;
    dev = std::max({dev, std::abs(direct - via_kron[i]), std::abs(direct - candidate[i]),
                    std::abs(via_kron[i] - candidate[i])});
  }
  return dev < 1e-10;
}

std::size_t MultiUserCodebook::total_codewords() const {
  std::size_t t = 0;
  for (const auto& u : users) t += u.num_codewords();
  return t;
}

MultiUserCodebook build_multiuser(std::span<const RootSequence> roots, const WaveformParams& params,
                                  const AmplitudeProfile& amplitudes) {
  if (roots.size() < 2) throw InvalidArgument("multi-user codebook needs at least 2 users");
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (roots[i] == roots[j]) {
        throw InvalidArgument("codebook collision: users " + std::to_string(i) + " and " +
                              std::to_string(j) + " share a root sequence");
      }
    }
  }
  MultiUserCodebook mu;
  mu.users.reserve(roots.size());
  for (const auto& r : roots) mu.users.push_back(build_sims(r, params, amplitudes));
  return mu;
}

}  // namespace sims
