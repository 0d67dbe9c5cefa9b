#include "sims/theory.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sims/types.hpp"

namespace sims::theory {

namespace {

class Mp {
 public:
  explicit Mp(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  ~Mp() { mpfr_clear(v_); }
  Mp(const Mp&) = delete;
  Mp& operator=(const Mp&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

constexpr int kMaxExactSf = 12;

void check_exact_sf(int sf) {
  if (sf < 1) throw InvalidArgument("sf must be >= 1");
  if (sf > kMaxExactSf) {
    throw InvalidArgument("exact BER formulas are limited to sf <= 12; use the approximation for sf = " +
                          std::to_string(sf));
  }
}

void check_gamma(double g) {
  if (!(g >= 0.0)) throw InvalidArgument("gamma must be non-negative");
}

double clamp_ber(double p) { return std::clamp(p, 0.0, 0.5); }

// The alternating sums lose about 2^SF bits to cancellation, so they are
// evaluated with that much extra precision. Binomials stay exact integers.
enum class Kind { Awgn, Rayleigh };

double exact_sum(int sf, double gamma, Kind kind) {
  const std::uint64_t big_m = std::uint64_t{1} << sf;
  double extra = 0.0;
  if (kind == Kind::Awgn && std::isfinite(gamma)) extra = gamma * std::numbers::log2e;
  const auto prec = static_cast<mpfr_prec_t>(big_m + 96 + static_cast<std::uint64_t>(std::ceil(extra)));

  Mp binom(prec), term(prec), sum(prec), tmp(prec);
  mpfr_set_ui(binom.get(), 1, MPFR_RNDN);
  mpfr_set_zero(sum.get(), 1);
  for (std::uint64_t k = 1; k < big_m; ++k) {
    // C(M-1, k) = C(M-1, k-1) (M-k) / k, exact at this precision.
    mpfr_mul_ui(binom.get(), binom.get(), big_m - k, MPFR_RNDN);
    mpfr_div_ui(binom.get(), binom.get(), k, MPFR_RNDN);
    if (kind == Kind::Awgn) {
      mpfr_set_d(tmp.get(), -gamma, MPFR_RNDN);
      mpfr_mul_ui(tmp.get(), tmp.get(), k, MPFR_RNDN);
      mpfr_div_ui(tmp.get(), tmp.get(), k + 1, MPFR_RNDN);
      mpfr_exp(tmp.get(), tmp.get(), MPFR_RNDN);
      mpfr_mul(term.get(), binom.get(), tmp.get(), MPFR_RNDN);
      mpfr_div_ui(term.get(), term.get(), k + 1, MPFR_RNDN);
    } else {
      // 1 + k + k gamma_bar
      mpfr_set_d(tmp.get(), gamma, MPFR_RNDN);
      mpfr_add_ui(tmp.get(), tmp.get(), 1, MPFR_RNDN);
      mpfr_mul_ui(tmp.get(), tmp.get(), k, MPFR_RNDN);
      mpfr_add_ui(tmp.get(), tmp.get(), 1, MPFR_RNDN);
      mpfr_div(term.get(), binom.get(), tmp.get(), MPFR_RNDN);
    }
    if (k % 2 == 1) {
      mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    } else {
      mpfr_sub(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    }
  }
  // 2^(SF-1) / (2^SF - 1)
  mpfr_mul_ui(sum.get(), sum.get(), big_m / 2, MPFR_RNDN);
  mpfr_div_ui(sum.get(), sum.get(), big_m - 1, MPFR_RNDN);
  return mpfr_get_d(sum.get(), MPFR_RNDN);
}

}  // namespace

std::string to_string(BerModel m) {
  switch (m) {
    case BerModel::AwgnExact:
      return "awgn-exact";
    case BerModel::AwgnApprox:
      return "awgn-approx";
    case BerModel::RayleighExact:
      return "rayleigh-exact";
    case BerModel::RayleighApprox:
      return "rayleigh-approx";
  }
  return "unknown";
}

BerModel ber_model_from_string(const std::string& s) {
  if (s == "awgn-exact") return BerModel::AwgnExact;
  if (s == "awgn-approx") return BerModel::AwgnApprox;
  if (s == "rayleigh-exact") return BerModel::RayleighExact;
  if (s == "rayleigh-approx") return BerModel::RayleighApprox;
  throw InvalidArgument("unknown BER model '" + s +
                        "' (expected awgn-exact|awgn-approx|rayleigh-exact|rayleigh-approx)");
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double harmonic(std::uint64_t n) {
  if (n < 1) throw InvalidArgument("harmonic: n must be >= 1");
  if (n > 1'000'000) {
    const double x = static_cast<double>(n);
    return std::log(x) + 1.0 / (2.0 * x) + 0.57722;
  }
  // Smallest terms first, with Kahan compensation.
  double sum = 0.0, c = 0.0;
  for (std::uint64_t k = n; k >= 1; --k) {
    const double y = 1.0 / static_cast<double>(k) - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double ber_awgn_exact(int sf, double gamma) {
  check_exact_sf(sf);
  check_gamma(gamma);
  // Beyond this the k = 1 term e^(-gamma/2) underflows double precision.
  if (gamma > 1500.0) return 0.0;
  return clamp_ber(exact_sum(sf, gamma, Kind::Awgn));
}

double ber_awgn_approx(int sf, double gamma) {
  if (sf < 1) throw InvalidArgument("sf must be >= 1");
  check_gamma(gamma);
  return 0.5 * q_function(std::sqrt(2.0 * gamma) - std::sqrt(1.386 * sf + 1.154));
}

double ber_rayleigh_exact(int sf, double gamma_bar) {
  check_exact_sf(sf);
  check_gamma(gamma_bar);
  if (std::isinf(gamma_bar)) return 0.0;
  return clamp_ber(exact_sum(sf, gamma_bar, Kind::Rayleigh));
}

double ber_rayleigh_approx(int sf, double gamma_bar) {
  if (sf < 1 || sf > 62) throw InvalidArgument("sf must be in [1, 62]");
  check_gamma(gamma_bar);
  const double h = harmonic((std::uint64_t{1} << sf) - 1);
  const double g = gamma_bar;
  const double r = std::sqrt(2.0 * h);
  if (std::isinf(g)) return 0.0;
  if (g == 0.0) return clamp_ber(0.5 * q_function(-r));
  const double p = 0.5 * (q_function(-r) - std::sqrt(g / (g + 1.0)) * std::exp(-h / (g + 1.0)) *
                                                q_function(std::sqrt((g + 1.0) / g) * (-r + r / (g + 1.0))));
  return clamp_ber(p);
}

double ber(BerModel model, int sf, double gamma) {
  switch (model) {
    case BerModel::AwgnExact:
      return ber_awgn_exact(sf, gamma);
    case BerModel::AwgnApprox:
      return ber_awgn_approx(sf, gamma);
    case BerModel::RayleighExact:
      return ber_rayleigh_exact(sf, gamma);
    case BerModel::RayleighApprox:
      return ber_rayleigh_approx(sf, gamma);
  }
  throw InvalidArgument("unknown BER model");
}

double bernstein_tail_single(std::uint64_t k, std::uint64_t n_sf, double a_max, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  if (!(a_max > 0.0)) throw InvalidArgument("A_max must be positive");
  const double kn = static_cast<double>(k) * static_cast<double>(n_sf);
  const double v = 2.0 * std::exp(-kn * eps * eps / (2.0 * a_max * a_max + (2.0 / 3.0) * a_max * eps));
  return std::min(1.0, v);
}

double bernstein_tail_cross(std::uint64_t k, double mu, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  if (!(mu > 0.0 && mu <= 1.0)) throw InvalidArgument("mu must be in (0, 1]");
  const double v =
      2.0 * std::exp(-static_cast<double>(k) * eps * eps / (2.0 * mu * mu + (2.0 / 3.0) * mu * eps));
  return std::min(1.0, v);
}

MuiBound mui_bound(std::uint64_t m, std::uint64_t k, std::uint64_t n_sf, double eps, double mu) {
  if (m < 2) throw InvalidArgument("mui_bound needs M >= 2");
  if (n_sf == 0) throw InvalidArgument("N_SF must be positive");
  if (mu <= 0.0) mu = welch_asymptote(n_sf);
  const double eta = bernstein_tail_cross(k, mu, eps);
  MuiBound b;
  b.amplitude = static_cast<double>(m - 1) * static_cast<double>(k) * static_cast<double>(n_sf) * eps;
  b.power = b.amplitude * b.amplitude;
  b.confidence = std::clamp(1.0 - static_cast<double>(m - 1) * eta, 0.0, 1.0);
  return b;
}

double welch_bound(std::uint64_t m, std::uint64_t n_sf) {
  if (n_sf == 0) throw InvalidArgument("N_SF must be positive");
  if (m <= n_sf) throw InvalidArgument("Welch bound needs M > N_SF");
  const double md = static_cast<double>(m), nd = static_cast<double>(n_sf);
  return std::sqrt((md - nd) / (nd * (md - 1.0)));
}

double welch_asymptote(std::uint64_t n_sf) {
  if (n_sf == 0) throw InvalidArgument("N_SF must be positive");
  return 1.0 / std::sqrt(static_cast<double>(n_sf));
}

double processing_gain_db(std::uint64_t n_sf) {
  if (n_sf == 0) throw InvalidArgument("N_SF must be positive");
  return 10.0 * std::log10(static_cast<double>(n_sf));
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace sims::theory
