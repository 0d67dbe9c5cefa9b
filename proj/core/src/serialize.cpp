#include "sims/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sims {

using json = nlohmann::json;

namespace {

// JSON has no infinity; +inf Es/N0 (noise disabled) is written as the string "inf".
json snr_value(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double snr_from(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw IoError("invalid SNR value '" + s + "'");
  }
  return j.get<double>();
}

json provenance_json(const SequenceProvenance& p) {
  return {{"seed", p.seed}, {"poly_a", p.poly_a}, {"poly_b", p.poly_b},
          {"shift", p.shift}, {"root_index", p.root_index}};
}

json root_json(const RootSequence& r) {
  return {{"family", to_string(r.family())},
          {"params", provenance_json(r.provenance())},
          {"K", r.alphabet_size()},
          {"N_SF", r.size()},
          {"values", std::vector<std::uint32_t>(r.values().begin(), r.values().end())}};
}

RootSequence root_parse(const json& j) {
  SequenceProvenance p;
  p.family = family_from_string(j.at("family").get<std::string>());
  const auto& pj = j.at("params");
  p.seed = pj.value("seed", std::uint64_t{0});
  p.poly_a = pj.value("poly_a", std::uint64_t{0});
  p.poly_b = pj.value("poly_b", std::uint64_t{0});
  p.shift = pj.value("shift", std::uint64_t{0});
  p.root_index = pj.value("root_index", std::uint64_t{0});
  const auto k = j.at("K").get<std::uint32_t>();
  const auto n = j.at("N_SF").get<std::size_t>();
  if (j.contains("values")) {
    auto values = j.at("values").get<std::vector<std::uint32_t>>();
    if (values.size() != n) throw IoError("root sequence: values length does not match N_SF");
    return RootSequence(std::move(values), k, p);
  }
  return regenerate(p, n, k);
}

json complex_list(std::span<const cd> v) {
  json arr = json::array();
  for (const auto& c : v) arr.push_back({c.real(), c.imag()});
  return arr;
}

CVec complex_parse(const json& j) {
  CVec out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw IoError("complex sample must be [re, im]");
    out.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

json params_json(const WaveformParams& p) {
  return {{"sf", p.sf}, {"K", p.k}, {"N_SF", p.n_sf()}, {"f0", p.f0}, {"theta", p.theta}};
}

json root_config_json(const RootConfig& r) {
  return {{"family", to_string(r.family)}, {"seed", r.seed}, {"poly_a", r.poly_a},
          {"poly_b", r.poly_b}, {"shift", r.shift}};
}

json config_json(const SimConfig& c, bool with_runtime) {
  json j = {
      {"scheme", to_string(c.scheme)},
      {"sf", c.sf},
      {"k", c.k},
      {"f0", c.f0},
      {"theta", c.theta},
      {"amplitudes", to_string(c.amplitudes)},
      {"channel",
       {{"model", to_string(c.channel.model)}, {"rho", c.channel.rho}, {"fading", c.channel.fading}}},
      {"snr_grid_db", json::array()},
      {"trials_per_point", c.trials_per_point},
      {"min_bit_errors", c.min_bit_errors},
      {"users", c.users},
      {"offsets", to_string(c.offsets)},
      {"max_offset", c.max_offset ? json(*c.max_offset) : json(nullptr)},
      {"master_seed", c.master_seed},
      {"roots", root_config_json(c.roots)},
      {"receiver", to_string(c.receiver)},
      {"use_fft", c.use_fft},
      {"dump_z", c.dump_z},
  };
  for (double s : c.snr_grid_db) j["snr_grid_db"].push_back(snr_value(s));
  if (with_runtime) j["workers"] = c.workers;
  return j;
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string(what) + ": invalid JSON: " + e.what());
  }
}

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw IoError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string root_to_json(const RootSequence& root) { return root_json(root).dump(2); }

RootSequence root_from_json(const std::string& text) {
  const auto j = parse_json(text, "root sequence");
  return guarded("root sequence", [&] { return root_parse(j); });
}

std::string codebook_to_json(const Codebook& codebook, bool include_samples) {
  json j = {{"scheme", to_string(codebook.scheme())},
            {"params", params_json(codebook.params())},
            {"num_codewords", codebook.num_codewords()},
            {"codeword_length", codebook.codeword_length()},
            {"circulant", codebook.circulant()},
            {"amplitudes", complex_list(codebook.amplitudes().d)}};
  if (codebook.root()) j["root"] = root_json(*codebook.root());
  if (include_samples) {
    json cws = json::array();
    for (std::size_t l = 0; l < codebook.num_codewords(); ++l) {
      cws.push_back(complex_list(codebook.codeword(l)));
    }
    j["codewords"] = std::move(cws);
  }
  return j.dump(2);
}

Codebook codebook_from_json(const std::string& text) {
  const auto j = parse_json(text, "codebook");
  return guarded("codebook", [&] {
    const Scheme scheme = scheme_from_string(j.at("scheme").get<std::string>());
    const auto& pj = j.at("params");
    WaveformParams p;
    p.sf = pj.at("sf").get<int>();
    p.k = pj.at("K").get<std::uint32_t>();
    p.f0 = pj.value("f0", 1.0);
    p.theta = pj.value("theta", 1.0);
    AmplitudeProfile amps{complex_parse(j.at("amplitudes"))};
    std::optional<RootSequence> root;
    if (j.contains("root")) root = root_parse(j.at("root"));
    Codebook cb = build(scheme, p, root ? &*root : nullptr, amps);
    if (j.contains("codewords")) {
      const auto& cws = j.at("codewords");
      if (cws.size() != cb.num_codewords()) throw IoError("codebook: codeword count mismatch");
      for (std::size_t l = 0; l < cb.num_codewords(); ++l) {
        const auto samples = complex_parse(cws[l]);
        const auto ref = cb.codeword(l);
        if (samples.size() != ref.size()) throw IoError("codebook: codeword length mismatch");
        for (std::size_t i = 0; i < ref.size(); ++i) {
          if (std::abs(samples[i] - ref[i]) > 1e-12) {
            throw IoError("codebook: stored samples differ from the rebuilt codebook at codeword " +
                          std::to_string(l));
          }
        }
      }
    }
    return cb;
  });
}

std::string config_to_json(const SimConfig& config) { return config_json(config, true).dump(2); }

SimConfig config_from_json(const std::string& text, const SimConfig& base) {
  const auto j = parse_json(text, "config");
  return guarded("config", [&] {
    SimConfig c = base;
    if (j.contains("scheme")) c.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    maybe(j, "sf", c.sf);
    maybe(j, "k", c.k);
    maybe(j, "f0", c.f0);
    maybe(j, "theta", c.theta);
    if (j.contains("amplitudes")) {
      c.amplitudes = amplitude_mode_from_string(j.at("amplitudes").get<std::string>());
    }
    if (j.contains("channel")) {
      const auto& cj = j.at("channel");
      if (cj.contains("model")) {
        c.channel.model = channel_model_from_string(cj.at("model").get<std::string>());
      }
      maybe(cj, "rho", c.channel.rho);
      maybe(cj, "fading", c.channel.fading);
    }
    if (j.contains("snr_grid_db")) {
      c.snr_grid_db.clear();
      for (const auto& v : j.at("snr_grid_db")) c.snr_grid_db.push_back(snr_from(v));
    }
    maybe(j, "trials_per_point", c.trials_per_point);
    maybe(j, "min_bit_errors", c.min_bit_errors);
    maybe(j, "users", c.users);
    if (j.contains("offsets")) c.offsets = offset_mode_from_string(j.at("offsets").get<std::string>());
    if (j.contains("max_offset")) {
      if (j.at("max_offset").is_null()) {
        c.max_offset.reset();
      } else {
        c.max_offset = j.at("max_offset").get<std::size_t>();
      }
    }
    maybe(j, "master_seed", c.master_seed);
    if (j.contains("roots")) {
      const auto& rj = j.at("roots");
      if (rj.contains("family")) c.roots.family = family_from_string(rj.at("family").get<std::string>());
      maybe(rj, "seed", c.roots.seed);
      maybe(rj, "poly_a", c.roots.poly_a);
      maybe(rj, "poly_b", c.roots.poly_b);
      maybe(rj, "shift", c.roots.shift);
    }
    if (j.contains("receiver")) c.receiver = receiver_from_string(j.at("receiver").get<std::string>());
    maybe(j, "use_fft", c.use_fft);
    maybe(j, "workers", c.workers);
    maybe(j, "dump_z", c.dump_z);
    return c;
  });
}

std::string curve_to_json(const BerCurve& curve) {
  json pts = json::array();
  for (const auto& p : curve.points) {
    pts.push_back({{"snr_db", snr_value(p.snr_db)},
                   {"ebn0_db", snr_value(convert_snr(p.snr_db, SnrAxis::EbN0, curve.sf, curve.bits_per_block))},
                   {"snr_chip_db", snr_value(convert_snr(p.snr_db, SnrAxis::Chip, curve.sf, curve.bits_per_block))},
                   {"trials", p.trials},
                   {"bit_errors", p.bit_errors},
                   {"block_errors", p.block_errors},
                   {"ber", p.ber},
                   {"ci_lo", p.ci_lo},
                   {"ci_hi", p.ci_hi},
                   {"user_bit_errors", p.user_bit_errors}});
  }
  json j = {{"scheme", curve.scheme},
            {"sf", curve.sf},
            {"k", curve.k},
            {"channel", curve.channel},
            {"rho", curve.rho},
            {"fading", curve.fading},
            {"users", curve.users},
            {"bits_per_block", curve.bits_per_block},
            {"seed", curve.seed},
            {"points", std::move(pts)},
            {"metadata",
             {{"config_hash", curve.config_hash},
              {"timestamp", curve.timestamp},
              {"version", curve.version}}}};
  if (!curve.traces.empty()) j["traces"] = json::parse(traces_to_json(curve.traces));
  return j.dump(2);
}

BerCurve curve_from_json(const std::string& text) {
  const auto j = parse_json(text, "BER curve");
  return guarded("BER curve", [&] {
    BerCurve c;
    c.scheme = j.at("scheme").get<std::string>();
    c.sf = j.at("sf").get<int>();
    c.k = j.at("k").get<std::uint32_t>();
    c.channel = j.at("channel").get<std::string>();
    c.rho = j.at("rho").get<double>();
    c.fading = j.at("fading").get<bool>();
    c.users = j.at("users").get<std::size_t>();
    c.bits_per_block = j.at("bits_per_block").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& pj : j.at("points")) {
      BerPoint p;
      p.snr_db = snr_from(pj.at("snr_db"));
      p.trials = pj.at("trials").get<std::uint64_t>();
      p.bit_errors = pj.at("bit_errors").get<std::uint64_t>();
      p.block_errors = pj.value("block_errors", std::uint64_t{0});
      p.ber = pj.at("ber").get<double>();
      p.ci_lo = pj.at("ci_lo").get<double>();
      p.ci_hi = pj.at("ci_hi").get<double>();
      p.user_bit_errors = pj.value("user_bit_errors", std::vector<std::uint64_t>{});
      c.points.push_back(std::move(p));
    }
    if (j.contains("traces")) {
      for (const auto& tj : j.at("traces")) {
        ZTrace t;
        t.snr_index = tj.at("snr_index").get<std::size_t>();
        t.trial = tj.at("trial").get<std::uint64_t>();
        t.user = tj.at("user").get<std::size_t>();
        t.sent = tj.at("sent").get<std::uint64_t>();
        t.detected = tj.at("detected").get<std::uint64_t>();
        t.z = tj.at("z").get<std::vector<double>>();
        c.traces.push_back(std::move(t));
      }
    }
    if (j.contains("metadata")) {
      const auto& m = j.at("metadata");
      c.config_hash = m.value("config_hash", "");
      c.timestamp = m.value("timestamp", "");
      c.version = m.value("version", "");
    }
    return c;
  });
}

std::string traces_to_json(const std::vector<ZTrace>& traces) {
  json arr = json::array();
  for (const auto& t : traces) {
    arr.push_back({{"snr_index", t.snr_index},
                   {"trial", t.trial},
                   {"user", t.user},
                   {"sent", t.sent},
                   {"detected", t.detected},
                   {"z", t.z}});
  }
  return arr.dump(2);
}

std::string xcorr_to_csv(const std::vector<XcorrRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "eps,pairs,hits,empirical_tail,bernstein_bound\n";
  for (const auto& r : rows) {
    os << r.eps << ',' << r.pairs << ',' << r.hits << ',' << r.empirical << ',' << r.bound << '\n';
  }
  return os.str();
}

std::string config_hash(const SimConfig& config) {
  const std::string canon = config_json(config, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("error writing '" + path + "'");
}

}  // namespace sims
