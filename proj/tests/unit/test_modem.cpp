#include <gtest/gtest.h>

#include <cmath>

#include "sims/channel.hpp"
#include "sims/codebook.hpp"
#include "sims/modem.hpp"
#include "sims/rng.hpp"

using namespace sims;

namespace {

Codebook sims_cb(int sf, std::uint32_t k, std::uint64_t seed = 1) {
  return build_sims(generate_random_root(seed, std::size_t{1} << sf, k), {.sf = sf, .k = k},
                    AmplitudeProfile::null_origin(k));
}

CVec noise_vec(std::size_t n, double var, std::uint64_t seed) {
  Rng r(seed);
  CVec y(n);
  for (auto& v : y) v = r.complex_normal(var);
  return y;
}

}  // namespace

TEST(Mapping, Examples) {
  const std::vector<std::uint8_t> b{1, 0, 1};
  EXPECT_EQ(map_bits(b), 5u);
  EXPECT_EQ(unmap_index(5, 3), b);
  EXPECT_EQ(map_bits(std::vector<std::uint8_t>{0, 0, 0}), 0u);
  EXPECT_THROW(unmap_index(8, 3), InvalidArgument);
  const auto cb = build_fsk({.sf = 3, .k = 8});
  EXPECT_EQ(map_bits(cb, b), 5u);
  EXPECT_THROW(map_bits(cb, std::vector<std::uint8_t>{1, 0}), InvalidArgument);
}

TEST(Mapping, RoundTrip) {
  for (int nb = 1; nb <= 12; ++nb) {
    for (std::uint64_t i = 0; i < (1u << nb); i += 1 + (1u << nb) / 50) {
      EXPECT_EQ(map_bits(unmap_index(i, nb)), i);
    }
  }
}

TEST(Detect, NoiselessAllSchemes) {
  std::vector<Codebook> cbs;
  cbs.push_back(sims_cb(6, 4));
  cbs.push_back(build_sims(generate_random_root(2, 32, 8), {.sf = 5, .k = 8}, AmplitudeProfile::ones(8)));
  cbs.push_back(build_fsk({.sf = 6, .k = 64}));
  cbs.push_back(build_css({.sf = 6, .k = 64}));
  for (const auto& cb : cbs) {
    for (std::size_t l = 0; l < cb.num_codewords(); ++l) {
      const auto y = modulate(cb, l);
      const auto r = detect(cb, y);
      ASSERT_EQ(r.best_index, l);
      EXPECT_NEAR(r.z[l], 1.0, 1e-9);
      EXPECT_EQ(detect(cb, y, false).best_index, l);
    }
  }
}

TEST(Detect, FftMatchesDirect) {
  for (int sf = 3; sf <= 10; ++sf) {
    const auto cb = sims_cb(sf, 4, sf);
    const auto y = noise_vec(cb.codeword_length(), 1.0, 100 + sf);
    const auto d = correlate_direct(cb, y);
    const auto f = correlate_fft(cb, y);
    double scale = 0;
    for (auto v : d) scale = std::max(scale, std::abs(v));
    for (std::size_t l = 0; l < d.size(); ++l) ASSERT_LE(std::abs(d[l] - f[l]), 1e-9 * scale) << sf;
    EXPECT_EQ(detect_fft(cb, y).best_index, detect_direct(cb, y).best_index);
  }
  for (int sf = 3; sf <= 10; ++sf) {
    const auto cb = build_css({.sf = sf, .k = 1u << sf});
    const auto y = noise_vec(cb.codeword_length(), 1.0, 200 + sf);
    const auto d = correlate_direct(cb, y);
    const auto f = correlate_fft(cb, y);
    for (std::size_t l = 0; l < d.size(); ++l) ASSERT_LE(std::abs(d[l] - f[l]), 1e-9) << sf;
  }
}

TEST(Detect, FskHasNoFastPath) {
  const auto cb = build_fsk({.sf = 4, .k = 16});
  try {
    correlate_fft(cb, modulate(cb, 0));
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("FFT path unavailable"), std::string::npos);
  }
  EXPECT_EQ(detect(cb, modulate(cb, 3), true).best_index, 3u);
}

TEST(Detect, LengthMismatch) {
  const auto cb = sims_cb(4, 4);
  EXPECT_THROW(detect(cb, CVec(10)), InvalidArgument);
}

TEST(Detect, TiesPickLowestIndex) {
  const std::vector<double> z{0.5, 0.9, 0.9, 0.1};
  EXPECT_EQ(decide(z), 1u);
  const auto cb = sims_cb(4, 4);
  EXPECT_EQ(detect(cb, CVec(cb.codeword_length())).best_index, 0u);
}

TEST(Detect, ScaledAndRotatedInput) {
  const auto cb = sims_cb(5, 4);
  auto y = modulate(cb, 9, 4.0);
  for (auto& v : y) v *= std::polar(1.0, 1.234);
  const auto r = detect(cb, y);
  EXPECT_EQ(r.best_index, 9u);
  EXPECT_NEAR(r.z[9], 2.0, 1e-9);
}

TEST(Detect, MultiUserSynchronousNoiseless) {
  std::vector<RootSequence> roots{generate_random_root(1, 64, 4), generate_random_root(2, 64, 4)};
  const auto mu = build_multiuser(roots, {.sf = 6, .k = 4}, AmplitudeProfile::null_origin(4));
  const auto a = modulate(mu.users[0], 17);
  const auto b = modulate(mu.users[1], 40);
  CVec y(a.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a[i] + b[i];
  const auto r = detect_multiuser(mu, y);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].best_index, 17u);
  EXPECT_EQ(r[1].best_index, 40u);
}

TEST(Mrc, RecoversThroughTwoTaps) {
  const auto cb = sims_cb(6, 4);
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const CVec h{rng.complex_normal(1.0), rng.complex_normal(1.0)};
    const std::size_t idx = rng.below(cb.num_codewords());
    const auto y = propagate(modulate(cb, idx), h);
    EXPECT_EQ(y.size(), cb.codeword_length() + 1);
    EXPECT_EQ(detect_mrc_two_tap(cb, y, h).best_index, idx);
    EXPECT_EQ(detect_mrc_two_tap(cb, y, h, false).best_index, idx);
  }
}

TEST(Mrc, MatchesExplicitCombination) {
  const auto cb = sims_cb(4, 4);
  const auto y = noise_vec(cb.codeword_length() + 1, 1.0, 9);
  const CVec h{cd(0.8, 0.1), cd(-0.2, 0.4)};
  const auto r = detect_mrc_two_tap(cb, y, h);
  const std::size_t len = cb.codeword_length();
  for (std::size_t l = 0; l < cb.num_codewords(); ++l) {
    const auto c = cb.codeword(l);
    cd z0{}, z1{};
    for (std::size_t t = 0; t < len; ++t) {
      z0 += y[t] * std::conj(c[t]);
      z1 += y[t + 1] * std::conj(c[t]);
    }
    EXPECT_NEAR(r.z[l], std::abs(std::conj(h[0]) * z0 + std::conj(h[1]) * z1), 1e-10);
  }
  EXPECT_THROW(detect_mrc_two_tap(cb, y, CVec{1.0}), InvalidArgument);
}
