// Command-line front end: BER sweeps, closed-form curves, correlation studies
// and codebook export.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sims/codebook.hpp"
#include "sims/harness.hpp"
#include "sims/serialize.hpp"
#include "sims/theory.hpp"

namespace {

std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw sims::InvalidArgument("SNR step must be positive");
  if (stop < start) throw sims::InvalidArgument("SNR stop is below SNR start");
  std::vector<double> grid;
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= n; ++i) grid.push_back(start + static_cast<double>(i) * step);
  return grid;
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    sims::write_file(path, text);
  }
}

struct SimFlags {
  std::string config;
  std::string scheme, channel, offsets, amplitudes, receiver, root_family;
  int sf = 0;
  unsigned k = 0;
  double rho = 0.0;
  bool fading = false;
  double snr_start = 0.0, snr_stop = 0.0, snr_step = 1.0;
  std::uint64_t trials = 0, seed = 0, root_seed = 0, min_errors = 0;
  std::size_t users = 0;
  unsigned workers = 0;
  bool no_fft = false;
  std::string out, format = "csv", dump_z;
};

void add_sim_flags(CLI::App* cmd, SimFlags& f) {
  cmd->add_option("--config", f.config, "JSON config file; explicit flags override it");
  cmd->add_option("--scheme", f.scheme, "sims | fsk | css");
  cmd->add_option("--sf", f.sf, "Spreading factor");
  cmd->add_option("--k", f.k, "Subcarriers per chip (SIMS) or tones (FSK)");
  cmd->add_option("--channel", f.channel, "awgn | rayleigh | two-tap");
  cmd->add_option("--rho", f.rho, "Two-tap power in the delayed path");
  cmd->add_flag("--fading", f.fading, "Rayleigh factor on each two-tap path");
  cmd->add_option("--snr-start", f.snr_start, "First Es/N0 point (dB)");
  cmd->add_option("--snr-stop", f.snr_stop, "Last Es/N0 point (dB)");
  cmd->add_option("--snr-step", f.snr_step, "Es/N0 step (dB)");
  cmd->add_option("--trials", f.trials, "Trials per SNR point");
  cmd->add_option("--min-errors", f.min_errors, "Stop a point after this many bit errors (0: never)");
  cmd->add_option("--users", f.users, "Number of users");
  cmd->add_option("--offsets", f.offsets, "sync | uniform");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--root-seed", f.root_seed, "Root sequence seed (user m uses seed + m)");
  cmd->add_option("--root-family", f.root_family, "random | mseq | gold | zc");
  cmd->add_option("--amplitudes", f.amplitudes, "ones | null-origin");
  cmd->add_option("--receiver", f.receiver, "auto | matched | mrc");
  cmd->add_option("--workers", f.workers, "Worker threads (0: all cores)");
  cmd->add_flag("--no-fft", f.no_fft, "Use direct correlation instead of the FFT detector");
  cmd->add_option("--out", f.out, "Output file (default: stdout)");
  cmd->add_option("--format", f.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--dump-z", f.dump_z, "Write correlation traces of the first trials to this JSON file");
}

sims::SimConfig resolve_config(CLI::App* cmd, const SimFlags& f, std::size_t default_users) {
  sims::SimConfig c;
  c.users = default_users;
  if (!f.config.empty()) c = sims::config_from_json(sims::read_file(f.config), c);
  auto given = [&](const char* name) { return cmd->count(name) > 0; };
  if (given("--scheme")) c.scheme = sims::scheme_from_string(f.scheme);
  if (given("--sf")) c.sf = f.sf;
  if (given("--k")) c.k = f.k;
  if (given("--channel")) c.channel.model = sims::channel_model_from_string(f.channel);
  if (given("--rho")) c.channel.rho = f.rho;
  if (given("--fading")) c.channel.fading = f.fading;
  if (given("--snr-start") || given("--snr-stop") || given("--snr-step")) {
    if (!given("--snr-start") || !given("--snr-stop")) {
      throw sims::InvalidArgument("--snr-start and --snr-stop must be given together");
    }
    c.snr_grid_db = make_grid(f.snr_start, f.snr_stop, f.snr_step);
  }
  if (given("--trials")) c.trials_per_point = f.trials;
  if (given("--min-errors")) c.min_bit_errors = f.min_errors;
  if (given("--users")) c.users = f.users;
  if (given("--offsets")) c.offsets = sims::offset_mode_from_string(f.offsets);
  if (given("--seed")) c.master_seed = f.seed;
  if (given("--root-seed")) c.roots.seed = f.root_seed;
  if (given("--root-family")) c.roots.family = sims::family_from_string(f.root_family);
  if (given("--amplitudes")) c.amplitudes = sims::amplitude_mode_from_string(f.amplitudes);
  if (given("--receiver")) c.receiver = sims::receiver_from_string(f.receiver);
  if (given("--workers")) c.workers = f.workers;
  if (given("--no-fft")) c.use_fft = !f.no_fft;
  if (!f.dump_z.empty() && c.dump_z == 0) c.dump_z = 4;
  c.validate();
  return c;
}

void run_sim(CLI::App* cmd, const SimFlags& f, std::size_t default_users) {
  const auto cfg = resolve_config(cmd, f, default_users);
  const auto curve = sims::run_ber(cfg);
  const auto fmt = sims::format_from_string(f.format);
  write_or_print(f.out, fmt == sims::Format::CSV ? sims::to_csv(curve) : sims::curve_to_json(curve));
  if (!f.dump_z.empty()) sims::write_file(f.dump_z, sims::traces_to_json(curve.traces));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SIMS / FSK / CSS baseband simulator"};
  app.require_subcommand(1);

  SimFlags ber_flags, mu_flags;
  auto* ber = app.add_subcommand("ber", "Monte Carlo BER sweep");
  add_sim_flags(ber, ber_flags);
  auto* mu = app.add_subcommand("mu-ber", "Multi-user Monte Carlo BER sweep (per-user average)");
  add_sim_flags(mu, mu_flags);

  auto* th = app.add_subcommand("theory", "Closed-form BER curve");
  std::string model = "awgn-exact";
  int th_sf = 7;
  double th_start = -10.0, th_stop = 20.0, th_step = 0.5;
  std::string th_out;
  th->add_option("--model", model, "awgn-exact | awgn-approx | rayleigh-exact | rayleigh-approx");
  th->add_option("--sf", th_sf, "Spreading factor");
  th->add_option("--snr-start", th_start, "First Es/N0 point (dB)");
  th->add_option("--snr-stop", th_stop, "Last Es/N0 point (dB)");
  th->add_option("--snr-step,--step", th_step, "Es/N0 step (dB)");
  th->add_option("--out", th_out, "Output CSV (default: stdout)");

  auto* xc = app.add_subcommand("xcorr", "Empirical correlation tails against the Bernstein bound");
  std::string xc_scheme = "sims", xc_amps = "null-origin", xc_family = "random", xc_out;
  int xc_sf = 8;
  unsigned xc_k = 4;
  std::vector<double> xc_eps{0.02, 0.05, 0.1};
  std::uint64_t xc_pairs = 10000, xc_seed = 1, xc_root_seed = 1;
  std::size_t xc_roots = 1;
  xc->add_option("--scheme", xc_scheme, "sims | fsk | css");
  xc->add_option("--sf", xc_sf, "Spreading factor");
  xc->add_option("--k", xc_k, "Subcarriers per chip");
  xc->add_option("--eps", xc_eps, "Thresholds")->delimiter(',');
  xc->add_option("--pairs", xc_pairs, "Codeword pairs per threshold");
  xc->add_option("--roots", xc_roots, "Number of random roots to pool over");
  xc->add_option("--seed", xc_seed, "Pair sampling seed");
  xc->add_option("--root-seed", xc_root_seed, "First root seed");
  xc->add_option("--root-family", xc_family, "random | mseq | gold | zc");
  xc->add_option("--amplitudes", xc_amps, "ones | null-origin");
  xc->add_option("--out", xc_out, "Output CSV (default: stdout)");

  auto* cbc = app.add_subcommand("codebook", "Build a codebook and export it as JSON");
  std::string cb_scheme = "sims", cb_amps = "null-origin", cb_family = "random", cb_out;
  int cb_sf = 7;
  unsigned cb_k = 4;
  std::uint64_t cb_root_seed = 1;
  bool cb_samples = false;
  cbc->add_option("--scheme", cb_scheme, "sims | fsk | css");
  cbc->add_option("--sf", cb_sf, "Spreading factor");
  cbc->add_option("--k", cb_k, "Subcarriers per chip (SIMS) or tones (FSK)");
  cbc->add_option("--root-seed", cb_root_seed, "Root sequence seed");
  cbc->add_option("--root-family", cb_family, "random | mseq | gold | zc");
  cbc->add_option("--amplitudes", cb_amps, "ones | null-origin");
  cbc->add_flag("--samples", cb_samples, "Include codeword samples");
  cbc->add_option("--out", cb_out, "Output JSON (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ber) {
      run_sim(ber, ber_flags, 1);
    } else if (*mu) {
      run_sim(mu, mu_flags, 2);
    } else if (*th) {
      const auto m = sims::theory::ber_model_from_string(model);
      std::ostringstream os;
      os.precision(17);
      os << "snr_db,ber\n";
      for (double s : make_grid(th_start, th_stop, th_step)) {
        os << s << ',' << sims::theory::ber(m, th_sf, sims::theory::db_to_linear(s)) << '\n';
      }
      write_or_print(th_out, os.str());
    } else if (*xc) {
      sims::XcorrConfig cfg;
      cfg.scheme = sims::scheme_from_string(xc_scheme);
      cfg.sf = xc_sf;
      cfg.k = xc_k;
      cfg.amplitudes = sims::amplitude_mode_from_string(xc_amps);
      cfg.roots.family = sims::family_from_string(xc_family);
      cfg.roots.seed = xc_root_seed;
      cfg.num_roots = xc_roots;
      cfg.eps_grid = xc_eps;
      cfg.pairs = xc_pairs;
      cfg.seed = xc_seed;
      write_or_print(xc_out, sims::xcorr_to_csv(sims::run_xcorr_study(cfg)));
    } else if (*cbc) {
      const auto scheme = sims::scheme_from_string(cb_scheme);
      sims::WaveformParams p{.sf = cb_sf, .k = cb_k};
      p.validate();
      std::optional<sims::RootSequence> root;
      auto amps = sims::AmplitudeProfile::ones(p.k);
      if (scheme == sims::Scheme::SIMS) {
        sims::RootConfig rc;
        rc.family = sims::family_from_string(cb_family);
        rc.seed = cb_root_seed;
        root = sims::root_for_user(rc, 0, p.n_sf(), p.k);
        amps = sims::make_amplitudes(sims::amplitude_mode_from_string(cb_amps), p.k);
      }
      const auto cb = sims::build(scheme, p, root ? &*root : nullptr, amps);
      write_or_print(cb_out, sims::codebook_to_json(cb, cb_samples));
    }
  } catch (const sims::InvalidArgument& e) {
    std::cerr << "sims: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const sims::IoError& e) {
    std::cerr << "sims: I/O error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "sims: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
