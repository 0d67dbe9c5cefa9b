#include <gtest/gtest.h>

#include <cmath>

#include "sims/channel.hpp"
#include "sims/rng.hpp"

using namespace sims;

TEST(Channel, Names) {
  for (auto m : {ChannelModel::AWGN, ChannelModel::RayleighFlat, ChannelModel::TwoTap}) {
    EXPECT_EQ(channel_model_from_string(to_string(m)), m);
  }
  EXPECT_THROW(channel_model_from_string("rician"), InvalidArgument);
  EXPECT_EQ(offset_mode_from_string("sync"), OffsetMode::Synchronous);
  EXPECT_EQ(offset_mode_from_string("uniform"), OffsetMode::UniformChip);
}

TEST(Channel, SpecValidation) {
  ChannelSpec s;
  s.model = ChannelModel::TwoTap;
  s.rho = 1.5;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s.rho = 0.3;
  s.es_n0_db = NAN;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s.es_n0_db = 10.0;
  EXPECT_NO_THROW(s.validate());
  EXPECT_NEAR(s.gamma(), 10.0, 1e-12);
}

TEST(Channel, NoiselessAwgnIsIdentity) {
  CVec x{cd(1, 2), cd(-3, 0.5), cd(0, 1)};
  ChannelSpec s;
  const auto out = sims::apply(s, x);
  EXPECT_EQ(out.y, x);
  EXPECT_EQ(out.realization.noise_variance, 0.0);
}

TEST(Channel, TwoTapRhoZeroIsIdentityPlusTail) {
  ChannelSpec s;
  s.model = ChannelModel::TwoTap;
  s.rho = 0.0;
  CVec x{cd(1, 0), cd(0, 1), cd(2, 2)};
  const auto out = sims::apply(s, x);
  ASSERT_EQ(out.y.size(), 4u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LT(std::abs(out.y[i] - x[i]), 1e-15);
  EXPECT_LT(std::abs(out.y[3]), 1e-15);
}

TEST(Channel, TwoTapResponse) {
  const auto h = two_tap_response(0.2);
  EXPECT_NEAR(h[0].real(), std::sqrt(0.8), 1e-15);
  EXPECT_NEAR(h[1].real(), std::sqrt(0.2), 1e-15);
  EXPECT_NEAR(std::norm(h[0]) + std::norm(h[1]), 1.0, 1e-15);
}

TEST(Channel, ConvolutionExample) {
  const CVec x{1.0, 2.0, 3.0};
  const CVec h{0.5, -1.0};
  const auto y = propagate(x, h);
  const CVec expect{0.5, 0.0, -0.5, -3.0};
  ASSERT_EQ(y.size(), expect.size());
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_LT(std::abs(y[i] - expect[i]), 1e-15);
}

TEST(Channel, NoiseVarianceMatchesSnr) {
  ChannelSpec s;
  s.es_n0_db = 3.0;
  const double var = noise_variance(s, 1.0);
  EXPECT_NEAR(var, std::pow(10.0, -0.3), 1e-12);
  CVec x(200000);
  Rng r(5);
  add_noise(x, var, r);
  double p = 0;
  for (auto v : x) p += std::norm(v);
  EXPECT_NEAR(p / x.size(), var, 0.01 * var);
}

TEST(Channel, RayleighTapStatistics) {
  ChannelSpec s;
  s.model = ChannelModel::RayleighFlat;
  Rng r(8);
  double p = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto h = draw_taps(s, r);
    ASSERT_EQ(h.size(), 1u);
    p += std::norm(h[0]);
  }
  EXPECT_NEAR(p / n, 1.0, 0.02);
}

TEST(Channel, EmptyInputRejected) {
  ChannelSpec s;
  EXPECT_THROW(sims::apply(s, CVec{}), InvalidArgument);
}

TEST(Channel, DeterministicPerSeed) {
  ChannelSpec s;
  s.model = ChannelModel::RayleighFlat;
  s.es_n0_db = 5.0;
  s.seed = 77;
  const CVec x(32, cd(0.1, 0.0));
  EXPECT_EQ(sims::apply(s, x).y, sims::apply(s, x).y);
  auto s2 = s;
  s2.seed = 78;
  EXPECT_NE(sims::apply(s, x).y, sims::apply(s2, x).y);
}

TEST(Superpose, Example) {
  const std::vector<CVec> w{{1.0, 1.0}, {2.0, 2.0}};
  const std::vector<std::size_t> off{0, 1};
  const auto y = superpose_async(w, off);
  ASSERT_EQ(y.size(), 3u);
  EXPECT_EQ(y[0], cd(1.0));
  EXPECT_EQ(y[1], cd(3.0));
  EXPECT_EQ(y[2], cd(2.0));
}

TEST(Superpose, SynchronousIsPlainSum) {
  const std::vector<CVec> w{{cd(1, 1), cd(2, 0)}, {cd(0, 1), cd(-1, 0)}};
  const std::vector<std::size_t> off{0, 0};
  const auto y = superpose_async(w, off);
  EXPECT_EQ(y, (CVec{cd(1, 2), cd(1, 0)}));
}

TEST(Superpose, CountMismatch) {
  const std::vector<CVec> w{{1.0}, {2.0}};
  const std::vector<std::size_t> off{0};
  try {
    superpose_async(w, off);
    FAIL();
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('2'), std::string::npos);
    EXPECT_NE(msg.find('1'), std::string::npos);
  }
}

TEST(Offsets, Modes) {
  EXPECT_EQ(draw_offsets(4, OffsetMode::Synchronous, 100, 1), std::vector<std::size_t>(4, 0));
  const auto o = draw_offsets(1000, OffsetMode::UniformChip, 7, 2);
  std::vector<int> hist(8, 0);
  for (auto v : o) {
    ASSERT_LE(v, 7u);
    ++hist[v];
  }
  for (int h : hist) EXPECT_GT(h, 60);
  EXPECT_EQ(o, draw_offsets(1000, OffsetMode::UniformChip, 7, 2));
}
