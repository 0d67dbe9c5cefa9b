#include "sims/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "sims/modem.hpp"
#include "sims/rng.hpp"
#include "sims/serialize.hpp"
#include "sims/theory.hpp"

namespace sims {

std::string to_string(Receiver r) {
  switch (r) {
    case Receiver::Auto:
      return "auto";
    case Receiver::Matched:
      return "matched";
    case Receiver::Mrc:
      return "mrc";
  }
  return "unknown";
}

Receiver receiver_from_string(const std::string& s) {
  if (s == "auto") return Receiver::Auto;
  if (s == "matched") return Receiver::Matched;
  if (s == "mrc") return Receiver::Mrc;
  throw InvalidArgument("unknown receiver '" + s + "' (expected auto|matched|mrc)");
}

namespace {

int binary_degree(std::size_t n_sf, std::uint32_t k) {
  if (!is_power_of_two(k) || k < 2) {
    throw InvalidArgument("binary root families need K to be a power of two >= 2");
  }
  return ilog2(n_sf) + ilog2(k);
}

}  // namespace

RootSequence root_for_user(const RootConfig& cfg, std::size_t user, std::size_t n_sf,
                           std::uint32_t k) {
  const auto m = static_cast<std::uint64_t>(user);
  switch (cfg.family) {
    case SequenceFamily::UniformRandom:
      return generate_random_root(cfg.seed + m, n_sf, k);
    case SequenceFamily::MSeq: {
      std::uint64_t poly = cfg.poly_a;
      if (poly == 0) {
        poly = primitive_polynomial(binary_degree(n_sf, k));
      }
      return generate_msequence_root(poly, cfg.seed + m, n_sf, k);
    }
    case SequenceFamily::Gold: {
      std::uint64_t a = cfg.poly_a, b = cfg.poly_b;
      if (a == 0 || b == 0) {
        std::tie(a, b) = gold_preferred_pair(binary_degree(n_sf, k));
      }
      return generate_gold_root(a, b, cfg.shift + m, n_sf, k);
    }
    case SequenceFamily::ZadoffChuQuantized:
      return generate_zc_quantized(2 * m + 1, n_sf, k);
  }
  throw InvalidArgument("unknown sequence family");
}

void SimConfig::validate() const {
  waveform().validate();
  if (scheme == Scheme::FSK && k > (std::size_t{1} << sf)) {
    throw InvalidArgument("FSK needs K <= N_SF");
  }
  if (scheme == Scheme::FSK && k < 2) throw InvalidArgument("FSK needs K >= 2");
  if (scheme == Scheme::SIMS && amplitudes == AmplitudeMode::NullOrigin && k < 2) {
    throw InvalidArgument("null-origin amplitudes need K >= 2");
  }
  channel.validate();
  if (snr_grid_db.empty()) throw InvalidArgument("SNR grid is empty");
  for (std::size_t i = 0; i < snr_grid_db.size(); ++i) {
    if (std::isnan(snr_grid_db[i])) throw InvalidArgument("SNR grid contains NaN");
    if (i > 0 && !(snr_grid_db[i] > snr_grid_db[i - 1])) {
      throw InvalidArgument("SNR grid must be strictly increasing");
    }
  }
  if (trials_per_point < 1) throw InvalidArgument("trials per point must be >= 1");
  if (users < 1) throw InvalidArgument("users must be >= 1");
  if (users > 1 && scheme != Scheme::SIMS) {
    throw InvalidArgument("multi-user runs need the SIMS scheme (distinct roots per user)");
  }
  if (receiver == Receiver::Mrc && channel.model != ChannelModel::TwoTap) {
    throw InvalidArgument("the mrc receiver applies to the two-tap channel only");
  }
}

WaveformParams SimConfig::waveform() const {
  WaveformParams p{.sf = sf, .k = k, .f0 = f0, .theta = theta};
  if (scheme == Scheme::CSS && sf >= 1 && sf <= 24) p.k = static_cast<std::uint32_t>(p.n_sf());
  return p;
}

int SimConfig::bits_per_block() const {
  if (scheme == Scheme::FSK) {
    int b = 0;
    while ((std::uint64_t{2} << b) <= k) ++b;
    return b;
  }
  return sf;
}

std::size_t SimConfig::resolved_max_offset() const {
  if (max_offset) return *max_offset;
  const auto w = waveform();
  return scheme == Scheme::SIMS ? w.n_sf() * w.k : w.n_sf();
}

std::pair<double, double> wilson_interval(double p_hat, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nd = static_cast<double>(n);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nd;
  const double center = (p_hat + z2 / (2.0 * nd)) / denom;
  const double half = z * std::sqrt(p_hat * (1.0 - p_hat) / nd + z2 / (4.0 * nd * nd)) / denom;
  // Exact endpoints at the edges; the general form leaves rounding residue there.
  const double lo = p_hat <= 0.0 ? 0.0 : std::max(0.0, center - half);
  const double hi = p_hat >= 1.0 ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

double wilson_sigma(const BerPoint& p) { return (p.ci_hi - p.ci_lo) / (2.0 * 1.959963984540054); }

namespace {

enum Purpose : std::uint64_t { kBits = 1, kOffsets = 2, kFading = 3, kNoise = 4 };

constexpr std::uint64_t kChunkTrials = 256;
constexpr std::size_t kChunksPerRound = 16;

std::uint64_t user_key(Purpose p, std::size_t user) {
  return static_cast<std::uint64_t>(p) | (static_cast<std::uint64_t>(user) << 8);
}

struct ChunkCounts {
  std::uint64_t trials = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t block_errors = 0;
  std::vector<std::uint64_t> user_bit_errors;
  std::vector<ZTrace> traces;
};

struct Experiment {
  const SimConfig& cfg;
  std::vector<Codebook> codebooks;  // one per user
  int n_b = 0;
  std::uint64_t index_count = 0;
  bool mrc = false;
};

Experiment prepare(const SimConfig& cfg) {
  Experiment ex{cfg, {}, cfg.bits_per_block(), 0, false};
  ex.index_count = std::uint64_t{1} << ex.n_b;
  const auto params = cfg.waveform();
  if (cfg.scheme == Scheme::SIMS) {
    const auto amps = make_amplitudes(cfg.amplitudes, params.k);
    std::vector<RootSequence> roots;
    for (std::size_t m = 0; m < cfg.users; ++m) {
      roots.push_back(root_for_user(cfg.roots, m, params.n_sf(), params.k));
    }
    if (cfg.users > 1) {
      ex.codebooks = build_multiuser(roots, params, amps).users;
    } else {
      ex.codebooks.push_back(build_sims(roots[0], params, amps));
    }
  } else {
    ex.codebooks.push_back(build(cfg.scheme, params, nullptr, AmplitudeProfile::ones(params.k)));
  }
  if (cfg.channel.model == ChannelModel::TwoTap) {
    ex.mrc = cfg.receiver == Receiver::Mrc || (cfg.receiver == Receiver::Auto && cfg.channel.fading);
  }
  return ex;
}

void run_trial(const Experiment& ex, std::size_t snr_idx, double gamma_db, std::uint64_t trial,
               ChunkCounts& acc) {
  const auto& cfg = ex.cfg;
  const std::size_t m_users = ex.codebooks.size();
  const std::uint64_t seed = cfg.master_seed;
  const std::size_t len = ex.codebooks[0].codeword_length();

  std::vector<std::size_t> offsets(m_users, 0);
  if (m_users > 1) {
    Rng orng = Rng::keyed({seed, snr_idx, trial, kOffsets});
    auto drawn = draw_offsets(m_users - 1, cfg.offsets, cfg.resolved_max_offset(), orng);
    std::copy(drawn.begin(), drawn.end(), offsets.begin() + 1);
  }

  std::vector<std::uint64_t> sent(m_users);
  std::vector<CVec> rx_parts(m_users);
  std::vector<CVec> taps(m_users);
  for (std::size_t m = 0; m < m_users; ++m) {
    Rng brng = Rng::keyed({seed, snr_idx, trial, user_key(kBits, m)});
    sent[m] = brng.below(ex.index_count);
    auto x = modulate(ex.codebooks[m], static_cast<std::size_t>(sent[m]), 1.0);
    Rng frng = Rng::keyed({seed, snr_idx, trial, user_key(kFading, m)});
    taps[m] = draw_taps(cfg.channel, frng);
    if (taps[m].size() == 1) {
      for (auto& v : x) v *= taps[m][0];
      rx_parts[m] = std::move(x);
    } else {
      rx_parts[m] = propagate(x, taps[m]);
    }
  }
  CVec y = m_users == 1 ? std::move(rx_parts[0]) : superpose_async(rx_parts, offsets);

  ChannelSpec ch = cfg.channel;
  ch.es_n0_db = gamma_db;
  Rng nrng = Rng::keyed({seed, snr_idx, trial, kNoise});
  add_noise(y, noise_variance(ch, 1.0), nrng);

  const std::uint64_t mask = ex.index_count - 1;
  for (std::size_t m = 0; m < m_users; ++m) {
    const auto& cb = ex.codebooks[m];
    const std::size_t off = offsets[m];
    DetectionResult det;
    if (ex.mrc) {
      const std::size_t avail = std::min(len + 1, y.size() - off);
      det = detect_mrc_two_tap(cb, std::span<const cd>(y).subspan(off, avail), taps[m], cfg.use_fft);
    } else {
      det = detect(cb, std::span<const cd>(y).subspan(off, len), cfg.use_fft);
    }
    const std::uint64_t got = det.best_index;
    const auto errs = static_cast<std::uint64_t>(std::popcount((got ^ sent[m]) & mask));
    acc.bit_errors += errs;
    acc.user_bit_errors[m] += errs;
    if (got != sent[m]) ++acc.block_errors;
    if (trial < cfg.dump_z) {
      acc.traces.push_back(ZTrace{snr_idx, trial, m, sent[m], got, std::move(det.z)});
    }
  }
  acc.trials += m_users;
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

BerPoint run_point(const Experiment& ex, std::size_t snr_idx, std::vector<ZTrace>& traces) {
  const auto& cfg = ex.cfg;
  const double gamma_db = cfg.snr_grid_db[snr_idx];
  const std::size_t m_users = ex.codebooks.size();
  const std::uint64_t total_chunks = (cfg.trials_per_point + kChunkTrials - 1) / kChunkTrials;
  const unsigned workers = resolve_workers(cfg.workers);

  BerPoint pt;
  pt.snr_db = gamma_db;
  pt.user_bit_errors.assign(m_users, 0);

  bool stopped = false;
  for (std::uint64_t round_start = 0; round_start < total_chunks && !stopped;
       round_start += kChunksPerRound) {
    const std::size_t n_chunks =
        static_cast<std::size_t>(std::min<std::uint64_t>(kChunksPerRound, total_chunks - round_start));
    std::vector<ChunkCounts> chunks(n_chunks);
    for (auto& c : chunks) c.user_bit_errors.assign(m_users, 0);

    auto work = [&](std::size_t c) {
      const std::uint64_t first = (round_start + c) * kChunkTrials;
      const std::uint64_t last = std::min(first + kChunkTrials, cfg.trials_per_point);
      for (std::uint64_t t = first; t < last; ++t) run_trial(ex, snr_idx, gamma_db, t, chunks[c]);
    };

    const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(workers, n_chunks));
    if (n_threads <= 1) {
      for (std::size_t c = 0; c < n_chunks; ++c) work(c);
    } else {
      std::atomic<std::size_t> next{0};
      std::exception_ptr error;
      std::mutex error_mutex;
      std::vector<std::thread> pool;
      pool.reserve(n_threads);
      for (unsigned w = 0; w < n_threads; ++w) {
        pool.emplace_back([&] {
          for (std::size_t c = next++; c < n_chunks; c = next++) {
            try {
              work(c);
            } catch (...) {
              std::lock_guard lock(error_mutex);
              if (!error) error = std::current_exception();
            }
          }
        });
      }
      for (auto& t : pool) t.join();
      if (error) std::rethrow_exception(error);
    }

    // Fold in chunk order so the stopping point does not depend on scheduling.
    for (auto& c : chunks) {
      pt.trials += c.trials;
      pt.bit_errors += c.bit_errors;
      pt.block_errors += c.block_errors;
      for (std::size_t m = 0; m < m_users; ++m) pt.user_bit_errors[m] += c.user_bit_errors[m];
      for (auto& tr : c.traces) traces.push_back(std::move(tr));
      if (cfg.min_bit_errors > 0 && pt.bit_errors >= cfg.min_bit_errors) {
        stopped = true;
        break;
      }
    }
  }

  const double bits = static_cast<double>(pt.trials) * ex.n_b;
  pt.ber = bits > 0 ? static_cast<double>(pt.bit_errors) / bits : 0.0;
  std::tie(pt.ci_lo, pt.ci_hi) = wilson_interval(pt.ber, pt.trials);
  return pt;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

BerCurve run_ber(const SimConfig& config) {
  config.validate();
  const Experiment ex = prepare(config);
  BerCurve curve;
  curve.scheme = to_string(config.scheme);
  curve.sf = config.sf;
  curve.k = config.waveform().k;
  curve.channel = to_string(config.channel.model);
  curve.rho = config.channel.rho;
  curve.fading = config.channel.fading;
  curve.users = config.users;
  curve.bits_per_block = ex.n_b;
  curve.seed = config.master_seed;
  curve.config_hash = config_hash(config);
  curve.timestamp = utc_timestamp();
  curve.version = SIMS_VERSION;
  for (std::size_t i = 0; i < config.snr_grid_db.size(); ++i) {
    curve.points.push_back(run_point(ex, i, curve.traces));
  }
  return curve;
}

BerCurve run_mu_ber(const SimConfig& config) { return run_ber(config); }

std::string to_string(SnrAxis a) {
  switch (a) {
    case SnrAxis::EsN0:
      return "esn0";
    case SnrAxis::EbN0:
      return "ebn0";
    case SnrAxis::Chip:
      return "chip";
  }
  return "unknown";
}

SnrAxis snr_axis_from_string(const std::string& s) {
  if (s == "esn0") return SnrAxis::EsN0;
  if (s == "ebn0") return SnrAxis::EbN0;
  if (s == "chip") return SnrAxis::Chip;
  throw InvalidArgument("unknown SNR axis '" + s + "' (expected esn0|ebn0|chip)");
}

double convert_snr(double es_n0_db, SnrAxis axis, int sf, int bits_per_block) {
  switch (axis) {
    case SnrAxis::EsN0:
      return es_n0_db;
    case SnrAxis::EbN0:
      return es_n0_db - 10.0 * std::log10(static_cast<double>(std::max(bits_per_block, 1)));
    case SnrAxis::Chip:
      return es_n0_db - theory::processing_gain_db(std::uint64_t{1} << sf);
  }
  return es_n0_db;
}

std::optional<double> snr_at_ber(const BerCurve& curve, double target, SnrAxis axis) {
  if (!(target > 0.0)) throw InvalidArgument("target BER must be positive");
  const auto& p = curve.points;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double b0 = p[i].ber, b1 = p[i + 1].ber;
    if (b0 >= target && b1 < target && b1 > 0.0) {
      const double x0 = convert_snr(p[i].snr_db, axis, curve.sf, curve.bits_per_block);
      const double x1 = convert_snr(p[i + 1].snr_db, axis, curve.sf, curve.bits_per_block);
      const double l0 = std::log10(b0), l1 = std::log10(b1), lt = std::log10(target);
      return x0 + (lt - l0) * (x1 - x0) / (l1 - l0);
    }
  }
  return std::nullopt;
}

std::vector<XcorrRow> run_xcorr_study(const XcorrConfig& config) {
  if (config.eps_grid.empty()) throw InvalidArgument("xcorr study: epsilon grid is empty");
  for (double e : config.eps_grid) {
    if (!(e > 0.0)) throw InvalidArgument("xcorr study: epsilon values must be positive");
  }
  if (config.pairs == 0) throw InvalidArgument("xcorr study: pairs must be positive");
  if (config.num_roots == 0) throw InvalidArgument("xcorr study: num_roots must be positive");

  WaveformParams params{.sf = config.sf, .k = config.k};
  std::vector<Codebook> books;
  AmplitudeProfile amps = AmplitudeProfile::ones(params.k);
  if (config.scheme == Scheme::SIMS) {
    amps = make_amplitudes(config.amplitudes, params.k);
    for (std::size_t r = 0; r < config.num_roots; ++r) {
      books.push_back(build_sims(root_for_user(config.roots, r, params.n_sf(), params.k), params, amps));
    }
  } else {
    books.push_back(build(config.scheme, params, nullptr, amps));
    params = books[0].params();
  }

  std::vector<XcorrRow> rows;
  for (double eps : config.eps_grid) {
    XcorrRow row;
    row.eps = eps;
    for (std::size_t r = 0; r < books.size(); ++r) {
      const std::uint64_t share = config.pairs / books.size() + (r < config.pairs % books.size() ? 1 : 0);
      if (share == 0) continue;
      // Same pair sample at every eps, so the empirical column is monotone.
      const auto tc = tail_count(books[r], eps, share, config.seed + r);
      row.hits += tc.hits;
      row.pairs += tc.pairs;
    }
    row.empirical = row.pairs ? static_cast<double>(row.hits) / static_cast<double>(row.pairs) : 0.0;
    row.bound = theory::bernstein_tail_single(params.k, params.n_sf(), amps.max_magnitude(), eps);
    rows.push_back(row);
  }
  return rows;
}

std::string to_string(Format f) { return f == Format::CSV ? "csv" : "json"; }

Format format_from_string(const std::string& s) {
  if (s == "csv") return Format::CSV;
  if (s == "json") return Format::JSON;
  throw InvalidArgument("unknown format '" + s + "' (expected csv|json)");
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
T parse_num(const std::string& s, const char* what) {
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError(std::string("CSV: cannot parse ") + what + " '" + s + "'");
  }
  return v;
}

}  // namespace

std::string to_csv(const BerCurve& curve) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& p : curve.points) {
    os << curve.scheme << ',' << curve.sf << ',' << curve.k << ',' << curve.channel << ','
       << fmt_double(curve.rho) << ',' << (curve.fading ? 1 : 0) << ',' << curve.users << ','
       << fmt_double(p.snr_db) << ',' << p.trials << ',' << p.bit_errors << ',' << fmt_double(p.ber)
       << ',' << fmt_double(p.ci_lo) << ',' << fmt_double(p.ci_hi) << ',' << curve.seed << '\n';
  }
  return os.str();
}

BerCurve from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw IoError("CSV: unexpected header");
  BerCurve curve;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 14) throw IoError("CSV: expected 14 columns, got " + std::to_string(f.size()));
    if (first) {
      curve.scheme = f[0];
      curve.sf = parse_num<int>(f[1], "sf");
      curve.k = parse_num<std::uint32_t>(f[2], "k");
      curve.channel = f[3];
      curve.rho = parse_num<double>(f[4], "rho");
      curve.fading = parse_num<int>(f[5], "fading") != 0;
      curve.users = parse_num<std::size_t>(f[6], "users");
      curve.seed = parse_num<std::uint64_t>(f[13], "seed");
      curve.bits_per_block = curve.scheme == "fsk" ? ilog2(std::bit_floor(curve.k)) : curve.sf;
      first = false;
    }
    BerPoint p;
    p.snr_db = parse_num<double>(f[7], "snr_db");
    p.trials = parse_num<std::uint64_t>(f[8], "trials");
    p.bit_errors = parse_num<std::uint64_t>(f[9], "bit_errors");
    p.ber = parse_num<double>(f[10], "ber");
    p.ci_lo = parse_num<double>(f[11], "ci_lo");
    p.ci_hi = parse_num<double>(f[12], "ci_hi");
    curve.points.push_back(p);
  }
  return curve;
}

void emit(const BerCurve& curve, const std::string& path, Format format) {
  write_file(path, format == Format::CSV ? to_csv(curve) : curve_to_json(curve));
}

BerCurve load(const std::string& path, Format format) {
  const auto text = read_file(path);
  return format == Format::CSV ? from_csv(text) : curve_from_json(text);
}

}  // namespace sims
