#pragma once

#include <cstdint>
#include <string>

namespace sims::theory {

// Every BER function takes gamma = Es/N0 per block (linear), averaged over the
// fading for the Rayleigh models. The approximations are written for the per-chip
// ratio gamma / 2^SF and convert internally.

enum class BerModel { AwgnExact, AwgnApprox, RayleighExact, RayleighApprox };

std::string to_string(BerModel m);
/// Accepts awgn-exact | awgn-approx | rayleigh-exact | rayleigh-approx.
BerModel ber_model_from_string(const std::string& s);

/// Upper-tail standard normal probability.
double q_function(double x);

/// H_n: exact partial sum up to 1e6, ln n + 1/(2n) + 0.57722 beyond.
double harmonic(std::uint64_t n);

/// Noncoherent orthogonal 2^SF-ary signaling over AWGN. Evaluated in
/// multiprecision; sf must be in [1, 12].
double ber_awgn_exact(int sf, double gamma);

/// 0.5 Q(sqrt(2 gamma) - sqrt(1.386 SF + 1.154)).
double ber_awgn_approx(int sf, double gamma);

/// Noncoherent orthogonal signaling over flat Rayleigh fading; sf in [1, 12].
double ber_rayleigh_exact(int sf, double gamma_bar);

/// Harmonic-number approximation with Gamma_eff = gamma_bar.
double ber_rayleigh_approx(int sf, double gamma_bar);

double ber(BerModel model, int sf, double gamma);

/// 2 exp(-K N eps^2 / (2 A^2 + (2/3) A eps)), capped at 1.
double bernstein_tail_single(std::uint64_t k, std::uint64_t n_sf, double a_max, double eps);

/// 2 exp(-K eps^2 / (2 mu^2 + (2/3) mu eps)), capped at 1.
double bernstein_tail_cross(std::uint64_t k, double mu, double eps);

struct MuiBound {
  double amplitude = 0.0;   // (M-1) K N eps
  double power = 0.0;       // amplitude^2
  double confidence = 0.0;  // 1 - (M-1) eta, clamped to [0, 1]
};

/// eta is bernstein_tail_cross(K, mu, eps); mu <= 0 selects 1/sqrt(N_SF).
MuiBound mui_bound(std::uint64_t m, std::uint64_t k, std::uint64_t n_sf, double eps,
                   double mu = 0.0);

/// sqrt((M - N) / (N (M - 1))). Requires M > N.
double welch_bound(std::uint64_t m, std::uint64_t n_sf);
/// 1 / sqrt(N).
double welch_asymptote(std::uint64_t n_sf);

/// 10 log10(N_SF).
double processing_gain_db(std::uint64_t n_sf);

double db_to_linear(double db);
double linear_to_db(double x);

}  // namespace sims::theory
