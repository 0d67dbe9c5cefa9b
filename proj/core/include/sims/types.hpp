#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sims {

using cd = std::complex<double>;
using CVec = std::vector<cd>;

/// Raised when an argument violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for file and serialization failures.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scheme { SIMS, FSK, CSS };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

inline bool is_power_of_two(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// log2 of a power of two.
inline int ilog2(std::uint64_t n) {
  int r = 0;
  while (n > 1) {
    n >>= 1;
    ++r;
  }
  return r;
}

/// sum a[n] * conj(b[n])
cd inner(std::span<const cd> a, std::span<const cd> b);

double energy(std::span<const cd> a);

}  // namespace sims
