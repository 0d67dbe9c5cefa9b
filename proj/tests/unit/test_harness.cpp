#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "sims/harness.hpp"
#include "sims/theory.hpp"

using namespace sims;

namespace {

SimConfig small_config() {
  SimConfig c;
  c.scheme = Scheme::FSK;
  c.sf = 4;
  c.k = 16;
  c.snr_grid_db = {6.0, 10.0};
  c.trials_per_point = 3000;
  c.min_bit_errors = 0;
  c.workers = 1;
  return c;
}

}  // namespace

TEST(Config, Validation) {
  auto c = small_config();
  EXPECT_NO_THROW(c.validate());
  c.snr_grid_db = {};
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.snr_grid_db = {3.0, 1.0};
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.snr_grid_db = {1.0, NAN};
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = small_config();
  c.trials_per_point = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = small_config();
  c.users = 2;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = small_config();
  c.receiver = Receiver::Mrc;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.channel.model = ChannelModel::TwoTap;
  EXPECT_NO_THROW(c.validate());
  c = small_config();
  c.k = 32;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Config, BitsAndOffsets) {
  SimConfig c;
  c.sf = 7;
  c.k = 4;
  EXPECT_EQ(c.bits_per_block(), 7);
  EXPECT_EQ(c.resolved_max_offset(), 512u);
  c.max_offset = 10;
  EXPECT_EQ(c.resolved_max_offset(), 10u);
  c.scheme = Scheme::CSS;
  EXPECT_EQ(c.waveform().k, 128u);
  c.scheme = Scheme::FSK;
  c.k = 8;
  EXPECT_EQ(c.bits_per_block(), 3);
}

TEST(Roots, PerUserFamilies) {
  RootConfig rc;
  EXPECT_NE(root_for_user(rc, 0, 64, 4), root_for_user(rc, 1, 64, 4));
  EXPECT_EQ(root_for_user(rc, 1, 64, 4), generate_random_root(2, 64, 4));
  // Binary families use degree SF + log2 K, so N_SF = 32 with K = 4 needs degree 7.
  for (auto fam : {SequenceFamily::MSeq, SequenceFamily::Gold, SequenceFamily::ZadoffChuQuantized}) {
    rc.family = fam;
    const auto a = root_for_user(rc, 0, 32, 4);
    const auto b = root_for_user(rc, 1, 32, 4);
    EXPECT_EQ(a.family(), fam);
    EXPECT_NE(a, b) << to_string(fam);
  }
}

TEST(Wilson, Properties) {
  const auto [lo, hi] = wilson_interval(0.0, 100);
  EXPECT_EQ(lo, 0.0);
  EXPECT_GT(hi, 0.0);
  const auto [l2, h2] = wilson_interval(0.5, 10000);
  EXPECT_NEAR(l2, 0.5 - 1.96 * 0.005, 1e-4);
  EXPECT_NEAR(h2, 0.5 + 1.96 * 0.005, 1e-4);
  const auto [l3, h3] = wilson_interval(0.3, 0);
  EXPECT_EQ(l3, 0.0);
  EXPECT_EQ(h3, 1.0);
}

TEST(RunBer, NoiselessIsErrorFree) {
  for (auto scheme : {Scheme::SIMS, Scheme::FSK, Scheme::CSS}) {
    SimConfig c;
    c.scheme = scheme;
    c.sf = 5;
    c.k = scheme == Scheme::FSK ? 32 : 4;
    c.snr_grid_db = {INFINITY};
    c.trials_per_point = 500;
    c.workers = 1;
    const auto curve = run_ber(c);
    ASSERT_EQ(curve.points.size(), 1u);
    EXPECT_EQ(curve.points[0].bit_errors, 0u) << to_string(scheme);
    EXPECT_EQ(curve.points[0].trials, 500u);
    EXPECT_EQ(curve.bits_per_block, 5);
  }
}

TEST(RunBer, ZeroSnrNearHalf) {
  auto c = small_config();
  c.snr_grid_db = {-60.0};
  c.trials_per_point = 4000;
  const auto pt = run_ber(c).points[0];
  // Uniform guessing among 16 indices gives BER 0.5.
  EXPECT_NEAR(pt.ber, 0.5, 0.02);
}

TEST(RunBer, Deterministic) {
  auto c = small_config();
  auto a = run_ber(c);
  auto b = run_ber(c);
  a.timestamp = b.timestamp;
  EXPECT_EQ(a, b);
  c.master_seed = 2;
  auto d = run_ber(c);
  EXPECT_NE(a.points, d.points);
}

TEST(RunBer, WorkerCountDoesNotMatter) {
  auto c = small_config();
  c.scheme = Scheme::SIMS;
  c.k = 4;
  c.users = 3;
  c.min_bit_errors = 50;
  c.trials_per_point = 20000;
  c.workers = 1;
  const auto a = run_ber(c);
  c.workers = 3;
  const auto b = run_ber(c);
  EXPECT_EQ(a.points, b.points);
}

TEST(RunBer, EarlyStop) {
  auto c = small_config();
  c.snr_grid_db = {0.0};
  c.trials_per_point = 100000;
  c.min_bit_errors = 100;
  const auto pt = run_ber(c).points[0];
  EXPECT_GE(pt.bit_errors, 100u);
  EXPECT_LT(pt.trials, 100000u);
  EXPECT_EQ(pt.trials % 256, 0u);
}

TEST(RunBer, ConfidenceIntervalBracketsBer) {
  auto c = small_config();
  c.snr_grid_db = {4.0, 8.0};
  for (const auto& p : run_ber(c).points) {
    EXPECT_LE(p.ci_lo, p.ber);
    EXPECT_GE(p.ci_hi, p.ber);
  }
}

TEST(RunMuBer, SingleUserMatchesRunBer) {
  SimConfig c;
  c.sf = 5;
  c.snr_grid_db = {8.0};
  c.trials_per_point = 2000;
  c.min_bit_errors = 0;
  c.workers = 1;
  auto a = run_ber(c);
  auto b = run_mu_ber(c);
  a.timestamp = b.timestamp;
  EXPECT_EQ(a, b);
}

TEST(RunMuBer, PerUserCounts) {
  SimConfig c;
  c.sf = 5;
  c.users = 3;
  c.snr_grid_db = {10.0};
  c.trials_per_point = 1000;
  c.min_bit_errors = 0;
  c.workers = 1;
  const auto curve = run_ber(c);
  const auto& p = curve.points[0];
  EXPECT_EQ(p.trials, 3000u);
  ASSERT_EQ(p.user_bit_errors.size(), 3u);
  EXPECT_EQ(p.user_bit_errors[0] + p.user_bit_errors[1] + p.user_bit_errors[2], p.bit_errors);
}

TEST(RunBer, DumpZ) {
  auto c = small_config();
  c.dump_z = 3;
  const auto curve = run_ber(c);
  ASSERT_EQ(curve.traces.size(), 6u);
  for (const auto& t : curve.traces) {
    EXPECT_EQ(t.z.size(), 16u);
    EXPECT_LT(t.trial, 3u);
  }
}

TEST(RunBer, FftAndDirectAgree) {
  SimConfig c;
  c.sf = 6;
  c.snr_grid_db = {12.0};
  c.trials_per_point = 1500;
  c.min_bit_errors = 0;
  c.workers = 1;
  const auto a = run_ber(c);
  c.use_fft = false;
  const auto b = run_ber(c);
  EXPECT_EQ(a.points, b.points);
}

TEST(RunBer, TwoTapMrc) {
  SimConfig c;
  c.sf = 5;
  c.channel.model = ChannelModel::TwoTap;
  c.channel.rho = 0.5;
  c.channel.fading = true;
  c.snr_grid_db = {INFINITY};
  c.trials_per_point = 300;
  c.workers = 1;
  EXPECT_EQ(run_ber(c).points[0].bit_errors, 0u);
}

TEST(Snr, Conversion) {
  EXPECT_DOUBLE_EQ(convert_snr(10.0, SnrAxis::EsN0, 7, 7), 10.0);
  EXPECT_NEAR(convert_snr(10.0, SnrAxis::EbN0, 7, 7), 10.0 - 10 * std::log10(7.0), 1e-12);
  EXPECT_NEAR(convert_snr(10.0, SnrAxis::Chip, 7, 7), 10.0 - 10 * std::log10(128.0), 1e-12);
  EXPECT_EQ(snr_axis_from_string(to_string(SnrAxis::Chip)), SnrAxis::Chip);
}

TEST(Snr, CrossingInterpolation) {
  BerCurve curve;
  curve.sf = 5;
  curve.bits_per_block = 5;
  for (auto [s, b] : {std::pair{0.0, 1e-1}, {1.0, 1e-2}, {2.0, 1e-4}}) {
    BerPoint p;
    p.snr_db = s;
    p.ber = b;
    curve.points.push_back(p);
  }
  EXPECT_NEAR(*snr_at_ber(curve, 1e-3), 1.5, 1e-12);
  EXPECT_NEAR(*snr_at_ber(curve, 1e-2), 1.0, 1e-12);
  EXPECT_FALSE(snr_at_ber(curve, 1e-6).has_value());
  EXPECT_THROW(snr_at_ber(curve, 0.0), InvalidArgument);
}

TEST(Xcorr, FskIsZeroAndSimsBelowBound) {
  XcorrConfig c;
  c.scheme = Scheme::FSK;
  c.sf = 6;
  c.k = 64;
  c.eps_grid = {0.01, 0.1};
  c.pairs = 500;
  for (const auto& r : run_xcorr_study(c)) EXPECT_EQ(r.hits, 0u);

  c.scheme = Scheme::SIMS;
  c.k = 4;
  c.num_roots = 3;
  c.eps_grid = {0.1, 0.2};
  const auto rows = run_xcorr_study(c);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.pairs, 500u);
    EXPECT_NEAR(r.bound, theory::bernstein_tail_single(4, 64, 1.0, r.eps), 1e-15);
    EXPECT_LE(r.empirical, r.bound);
  }
  c.eps_grid = {};
  EXPECT_THROW(run_xcorr_study(c), InvalidArgument);
}

TEST(Csv, RoundTrip) {
  auto c = small_config();
  auto curve = run_ber(c);
  const auto text = to_csv(curve);
  EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
  const auto back = from_csv(text);
  ASSERT_EQ(back.points.size(), curve.points.size());
  for (std::size_t i = 0; i < back.points.size(); ++i) {
    EXPECT_EQ(back.points[i].trials, curve.points[i].trials);
    EXPECT_EQ(back.points[i].bit_errors, curve.points[i].bit_errors);
    EXPECT_EQ(back.points[i].ber, curve.points[i].ber);
    EXPECT_EQ(back.points[i].ci_lo, curve.points[i].ci_lo);
  }
  EXPECT_EQ(back.scheme, "fsk");
  EXPECT_THROW(from_csv("nope\n"), IoError);
}

TEST(Emit, FilesAndErrors) {
  auto curve = run_ber(small_config());
  const auto dir = std::filesystem::temp_directory_path() / "sims_emit_test";
  std::filesystem::create_directories(dir);
  for (auto fmt : {Format::CSV, Format::JSON}) {
    const auto path = (dir / ("curve." + to_string(fmt))).string();
    emit(curve, path, fmt);
    const auto back = load(path, fmt);
    EXPECT_EQ(back.points.size(), curve.points.size());
    EXPECT_EQ(back.points[1].bit_errors, curve.points[1].bit_errors);
  }
  EXPECT_THROW(emit(curve, "/nonexistent-dir/x/curve.csv", Format::CSV), IoError);
  std::filesystem::remove_all(dir);
}
