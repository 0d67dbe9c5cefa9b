#include "sims/types.hpp"

namespace sims {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::SIMS:
      return "sims";
    case Scheme::FSK:
      return "fsk";
    case Scheme::CSS:
      return "css";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "sims" || s == "SIMS") return Scheme::SIMS;
  if (s == "fsk" || s == "FSK") return Scheme::FSK;
  if (s == "css" || s == "CSS") return Scheme::CSS;
  throw InvalidArgument("unknown scheme '" + s + "' (expected sims|fsk|css)");
}

cd inner(std::span<const cd> a, std::span<const cd> b) {
  if (a.size() != b.size()) throw InvalidArgument("inner: length mismatch");
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re += ar * br + ai * bi;
    im += ai * br - ar * bi;
  }
  return {re, im};
}

double energy(std::span<const cd> a) {
  double e = 0.0;
  for (const auto& v : a) e += std::norm(v);
  return e;
}

}  // namespace sims
