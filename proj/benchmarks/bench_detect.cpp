#include <benchmark/benchmark.h>

#include "sims/codebook.hpp"
#include "sims/modem.hpp"
#include "sims/rng.hpp"
#include "sims/theory.hpp"

namespace {

sims::CVec noisy_block(const sims::Codebook& cb, std::uint64_t seed) {
  sims::Rng rng(seed);
  auto y = sims::modulate(cb, rng.below(cb.num_codewords()));
  for (auto& v : y) v += rng.complex_normal(0.1);
  return y;
}

sims::Codebook sims_codebook(int sf) {
  const std::size_t n = std::size_t{1} << sf;
  return sims::build_sims(sims::generate_random_root(1, n, 4), {.sf = sf, .k = 4},
                          sims::AmplitudeProfile::null_origin(4));
}

void BM_SimsDetectFft(benchmark::State& state) {
  const auto cb = sims_codebook(static_cast<int>(state.range(0)));
  const auto y = noisy_block(cb, 3);
  for (auto _ : state) benchmark::DoNotOptimize(sims::detect_fft(cb, y).best_index);
  state.SetItemsProcessed(state.iterations());
}

void BM_SimsDetectDirect(benchmark::State& state) {
  const auto cb = sims_codebook(static_cast<int>(state.range(0)));
  const auto y = noisy_block(cb, 3);
  for (auto _ : state) benchmark::DoNotOptimize(sims::detect_direct(cb, y).best_index);
  state.SetItemsProcessed(state.iterations());
}

void BM_CssDetectFft(benchmark::State& state) {
  const int sf = static_cast<int>(state.range(0));
  const auto cb = sims::build_css({.sf = sf, .k = 1u << sf});
  const auto y = noisy_block(cb, 4);
  for (auto _ : state) benchmark::DoNotOptimize(sims::detect_fft(cb, y).best_index);
  state.SetItemsProcessed(state.iterations());
}

void BM_AwgnExact(benchmark::State& state) {
  const int sf = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sims::theory::ber_awgn_exact(sf, 20.0));
}

}  // namespace

BENCHMARK(BM_SimsDetectFft)->DenseRange(5, 12, 1);
BENCHMARK(BM_SimsDetectDirect)->DenseRange(5, 10, 1);
BENCHMARK(BM_CssDetectFft)->DenseRange(5, 12, 1);
BENCHMARK(BM_AwgnExact)->DenseRange(4, 12, 2);
BENCHMARK_MAIN();
