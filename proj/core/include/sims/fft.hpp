#pragma once

#include <span>

#include "sims/types.hpp"

namespace sims::fft {

/// Unnormalized forward DFT: out[f] = sum_n in[n] exp(-j 2 pi f n / N).
/// `in` and `out` must have equal length and must not alias.
void forward(std::span<const cd> in, std::span<cd> out);

/// Unnormalized inverse DFT: out[n] = sum_f in[f] exp(+j 2 pi f n / N).
void inverse(std::span<const cd> in, std::span<cd> out);

CVec forward(std::span<const cd> in);
CVec inverse(std::span<const cd> in);

}  // namespace sims::fft
