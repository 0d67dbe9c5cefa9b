#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "sims/harness.hpp"
#include "sims/serialize.hpp"

using namespace sims;

TEST(RootJson, RoundTripEveryFamily) {
  const auto [ga, gb] = gold_preferred_pair(7);
  for (const auto& r : {generate_random_root(4, 32, 4), generate_msequence_root(primitive_polynomial(7), 9, 32, 4),
                        generate_gold_root(ga, gb, 3, 32, 4), generate_zc_quantized(3, 32, 4)}) {
    const auto back = root_from_json(root_to_json(r));
    EXPECT_EQ(back, r);
    EXPECT_EQ(back.provenance(), r.provenance());
  }
}

TEST(RootJson, RegeneratesWithoutValues) {
  const auto r = generate_random_root(11, 16, 4);
  const std::string text = R"({"family": "random", "params": {"seed": 11}, "K": 4, "N_SF": 16})";
  EXPECT_EQ(root_from_json(text), r);
  EXPECT_THROW(root_from_json("{"), IoError);
  EXPECT_THROW(root_from_json(R"({"family": "random"})"), IoError);
}

TEST(CodebookJson, RoundTrip) {
  const auto root = generate_random_root(5, 16, 4);
  const auto cb = build_sims(root, {.sf = 4, .k = 4}, AmplitudeProfile::null_origin(4));
  for (bool samples : {false, true}) {
    const auto back = codebook_from_json(codebook_to_json(cb, samples));
    EXPECT_EQ(back.scheme(), Scheme::SIMS);
    EXPECT_EQ(back.params(), cb.params());
    EXPECT_EQ(*back.root(), root);
    for (std::size_t l = 0; l < cb.num_codewords(); ++l) {
      for (std::size_t i = 0; i < cb.codeword_length(); ++i) {
        EXPECT_LT(std::abs(back.codeword(l)[i] - cb.codeword(l)[i]), 1e-12);
      }
    }
  }
  const auto css = build_css({.sf = 5, .k = 32});
  EXPECT_EQ(codebook_from_json(codebook_to_json(css, false)).scheme(), Scheme::CSS);
}

TEST(CodebookJson, TamperedSamplesRejected) {
  const auto cb = build_fsk({.sf = 3, .k = 8});
  auto text = codebook_to_json(cb, true);
  const auto pos = text.find("0.35355339");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 10, "0.45355339");
  EXPECT_THROW(codebook_from_json(text), IoError);
}

TEST(ConfigJson, RoundTripAndOverride) {
  SimConfig c;
  c.scheme = Scheme::CSS;
  c.sf = 9;
  c.channel.model = ChannelModel::TwoTap;
  c.channel.rho = 0.25;
  c.channel.fading = true;
  c.snr_grid_db = {-3.0, 0.5, INFINITY};
  c.users = 1;
  c.max_offset = 77;
  c.master_seed = 123;
  c.roots.family = SequenceFamily::Gold;
  c.receiver = Receiver::Matched;
  c.workers = 2;
  const auto back = config_from_json(config_to_json(c));
  EXPECT_EQ(back.scheme, c.scheme);
  EXPECT_EQ(back.sf, 9);
  EXPECT_EQ(back.channel.model, ChannelModel::TwoTap);
  EXPECT_EQ(back.channel.rho, 0.25);
  EXPECT_TRUE(back.channel.fading);
  EXPECT_EQ(back.snr_grid_db, c.snr_grid_db);
  EXPECT_EQ(back.max_offset, c.max_offset);
  EXPECT_EQ(back.master_seed, 123u);
  EXPECT_EQ(back.roots, c.roots);
  EXPECT_EQ(back.receiver, Receiver::Matched);
  EXPECT_EQ(back.workers, 2u);

  SimConfig base;
  base.sf = 6;
  base.trials_per_point = 42;
  const auto partial = config_from_json(R"({"sf": 8})", base);
  EXPECT_EQ(partial.sf, 8);
  EXPECT_EQ(partial.trials_per_point, 42u);
  EXPECT_THROW(config_from_json("not json"), IoError);
  EXPECT_THROW(config_from_json(R"({"scheme": "ook"})"), InvalidArgument);
}

TEST(ConfigHash, IgnoresWorkers) {
  SimConfig a;
  a.snr_grid_db = {1.0};
  auto b = a;
  b.workers = 7;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.sf = 8;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(CurveJson, RoundTrip) {
  SimConfig c;
  c.scheme = Scheme::FSK;
  c.sf = 4;
  c.k = 16;
  c.snr_grid_db = {4.0, INFINITY};
  c.trials_per_point = 600;
  c.dump_z = 2;
  c.workers = 1;
  const auto curve = run_ber(c);
  EXPECT_EQ(curve.config_hash, config_hash(c));
  EXPECT_FALSE(curve.version.empty());
  EXPECT_EQ(curve_from_json(curve_to_json(curve)), curve);
  EXPECT_THROW(curve_from_json("[]"), IoError);
}

TEST(Files, ReadWriteErrors) {
  EXPECT_THROW(read_file("/nonexistent/definitely/missing.json"), IoError);
  EXPECT_THROW(write_file("/nonexistent/dir/out.json", "x"), IoError);
  const auto p = (std::filesystem::temp_directory_path() / "sims_rw_test.txt").string();
  write_file(p, "hello\n");
  EXPECT_EQ(read_file(p), "hello\n");
  std::filesystem::remove(p);
}

TEST(Xcorr, CsvHeader) {
  const std::vector<XcorrRow> rows{{0.1, 3, 100, 0.03, 0.5}};
  const auto text = xcorr_to_csv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), "eps,pairs,hits,empirical_tail,bernstein_bound");
}
