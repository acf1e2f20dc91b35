// Command-line front end: one subcommand per pipeline stage plus the
// end-to-end session runner. Stages compose through documented CSV/bit/byte
// file artifacts.
//
// Exit codes: 0 success, 1 validation error, 2 session abort, 3 internal error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "hdqkd/config.hpp"
#include "hdqkd/io.hpp"
#include "hdqkd/security.hpp"

namespace {

bool verbose_logging() {
  const char* level = std::getenv("HDQKD_LOG");
  return level != nullptr && std::string(level) != "quiet";
}

hdqkd::RunConfig load_config(const std::string& path) {
  return path.empty() ? hdqkd::RunConfig{} : hdqkd::RunConfig::load(path);
}

void randomize_seeds(hdqkd::RunConfig& cfg) {
  std::random_device rd;
  auto fresh = [&rd] { return (static_cast<std::uint64_t>(rd()) << 32) | rd(); };
  cfg.seed_source = fresh();
  cfg.seed_bob_basis = fresh();
  cfg.seed_channel = fresh();
  cfg.seed_shuffle = fresh();
  cfg.seed_pa = fresh();
  cfg.seed_sample = fresh();
}

std::ostream& open_or_stdout(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

void print_session(const char* who, const hdqkd::SessionResult& r) {
  std::printf("%s: %s  sifted=%zu key_symbols=%zu qber=%.4f leaked=%llu final_bits=%zu digest=%016llx\n",
              who, r.aborted ? ("ABORT (" + r.abort_reason + ")").c_str() : "done",
              r.sifted_symbols, r.key_symbols, r.qber,
              static_cast<unsigned long long>(r.leaked_bits), r.final_key_bits,
              static_cast<unsigned long long>(r.final_digest));
  if (verbose_logging())
    std::printf("%s: classical messages=%llu bytes=%llu\n", who,
                static_cast<unsigned long long>(r.messages_sent),
                static_cast<unsigned long long>(r.bytes_sent));
}

struct SimulatedRun {
  std::vector<hdqkd::PulseRecord> pulses;
  std::vector<hdqkd::DetectionEvent> events;
};

SimulatedRun simulate_events(const hdqkd::RunConfig& cfg) {
  SimulatedRun run;
  hdqkd::PulseSimulator sim(cfg.channel_model(), cfg.seed_channel);
  std::mt19937_64 source(cfg.seed_source), bob(cfg.seed_bob_basis);
  std::bernoulli_distribution coin(0.5);
  run.pulses.reserve(cfg.pulses);
  run.events.reserve(cfg.pulses);
  for (std::uint64_t i = 0; i < cfg.pulses; ++i) {
    const auto pulse = hdqkd::alice_emit_pulse(source, cfg.d);
    const auto basis = coin(bob) ? hdqkd::Basis::ANG : hdqkd::Basis::OAM;
    run.pulses.push_back(pulse);
    run.events.push_back(sim.simulate(i, pulse.symbol, pulse.basis, basis));
  }
  return run;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-dimensional OAM/ANG QKD simulator and analysis toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  bool entropy = false;
  app.add_option("--config", config_path, "run configuration file")->envname("HDQKD_CONFIG");
  app.add_flag("--entropy", entropy, "replace the fixed default seeds with fresh randomness");

  // mub-check
  auto* mub = app.add_subcommand("mub-check", "verify the OAM/ANG bases are mutually unbiased");
  int mub_d = 7;
  mub->add_option("--d", mub_d, "dimension (odd, >= 3)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo pulse stream -> events CSV");
  std::string sim_out;
  std::uint64_t sim_pulses = 0;
  simulate->add_option("--out", sim_out, "events CSV path (default stdout)");
  simulate->add_option("--pulses", sim_pulses, "override pulse count");

  // sift
  auto* sift_cmd = app.add_subcommand("sift", "events CSV -> aligned sifted symbol files");
  std::string sift_events, sift_alice = "alice_sifted.txt", sift_bob = "bob_sifted.txt";
  sift_cmd->add_option("--events", sift_events, "events CSV from `simulate`")->required();
  sift_cmd->add_option("--alice-out", sift_alice, "Alice sifted symbols");
  sift_cmd->add_option("--bob-out", sift_bob, "Bob sifted symbols");

  // reconcile
  auto* rec = app.add_subcommand("reconcile", "cascade-correct Bob's bit file against Alice's");
  std::string rec_alice, rec_bob, rec_out = "corrected.txt";
  double rec_qber = 0.105;
  rec->add_option("--alice", rec_alice, "Alice bit file")->required();
  rec->add_option("--bob", rec_bob, "Bob bit file")->required();
  rec->add_option("--out", rec_out, "corrected Bob bits");
  rec->add_option("--qber", rec_qber, "QBER estimate for block sizing");

  // amplify
  auto* amp = app.add_subcommand("amplify", "Toeplitz-hash a bit file down to n-out bits");
  std::string amp_bits, amp_out = "key.bin";
  std::size_t amp_nout = 0;
  std::uint64_t amp_seed = 55;
  amp->add_option("--bits", amp_bits, "error-corrected bit file")->required();
  amp->add_option("--n-out", amp_nout, "output length in bits")->required();
  amp->add_option("--seed", amp_seed, "Toeplitz seed value");
  amp->add_option("--out", amp_out, "final key bytes");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "closed-form security report for a configuration");
  std::string analyze_csv;
  analyze->add_option("--csv", analyze_csv, "also write the report as CSV");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "QBER security-bound curves vs dimension -> CSV");
  int bounds_dmax = 25;
  std::string bounds_out;
  bounds->add_option("--d-max", bounds_dmax, "largest dimension in the sweep");
  bounds->add_option("--out", bounds_out, "CSV path (default stdout)");

  // run
  auto* run = app.add_subcommand("run", "full session: transmit, sift, cascade, amplify");
  std::string run_transport, run_events_out, run_key_out;
  std::uint64_t run_pulses = 0;
  run->add_option("--transport", run_transport, "inproc | tcp (overrides config)");
  run->add_option("--pulses", run_pulses, "override pulse count");
  run->add_option("--events-out", run_events_out, "write Bob's per-pulse transcript CSV");
  run->add_option("--key-out", run_key_out, "write the final key bytes (Alice's copy)");

  // otp
  auto* otp = app.add_subcommand("otp", "one-time-pad encrypt/decrypt a file with a key file");
  std::string otp_in, otp_key, otp_out = "otp.out";
  bool otp_decrypt_flag = false;
  otp->add_option("--in", otp_in, "input file")->required();
  otp->add_option("--key", otp_key, "key bytes file")->required();
  otp->add_option("--out", otp_out, "output file");
  otp->add_flag("--decrypt", otp_decrypt_flag, "decrypt instead of encrypt (same XOR)");

  // aperture-check
  auto* aperture = app.add_subcommand(
      "aperture-check", "randomized check that annulus P_ANG equals P_OAM at any plane");
  int app_d = 7, app_instances = 100;
  aperture->add_option("--d", app_d, "dimension");
  aperture->add_option("--instances", app_instances, "number of random profile/annulus draws");

  // dump-config
  auto* dump = app.add_subcommand("dump-config", "print the effective configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    hdqkd::RunConfig cfg = load_config(config_path);
    if (entropy) randomize_seeds(cfg);

    if (*mub) {
      const double dev = hdqkd::verify_mub(hdqkd::Dimension(mub_d));
      std::printf("d=%d  max | |<ANG_n|OAM_l>|^2 - 1/d | = %.3e  %s\n", mub_d, dev,
                  dev <= 1e-9 ? "PASS" : "FAIL");
      return dev <= 1e-9 ? 0 : 1;
    }

    if (*simulate) {
      if (sim_pulses) cfg.pulses = sim_pulses;
      const auto run_data = simulate_events(cfg);
      std::ofstream file;
      hdqkd::write_events_csv(open_or_stdout(file, sim_out), run_data.events);
      return 0;
    }

    if (*sift_cmd) {
      std::ifstream in(sift_events);
      if (!in) throw std::runtime_error("cannot open " + sift_events);
      const auto events = hdqkd::read_events_csv(in);
      std::vector<hdqkd::PulseRecord> alice;
      alice.reserve(events.size());
      for (const auto& ev : events) alice.push_back({ev.sent_symbol, ev.sent_basis});
      const auto [a, b] = hdqkd::sift(alice, events);
      hdqkd::write_symbols(sift_alice, a.symbols);
      hdqkd::write_symbols(sift_bob, b.symbols);
      std::printf("sifted %zu symbols from %zu pulses (yield %.4g)\n", a.size(), events.size(),
                  events.empty() ? 0.0 : static_cast<double>(a.size()) / events.size());
      return 0;
    }

    if (*rec) {
      const auto alice_bits = hdqkd::read_bits(rec_alice);
      const auto bob_bits = hdqkd::read_bits(rec_bob);
      hdqkd::CascadeConfig ccfg{cfg.cascade_passes, cfg.cascade_block, cfg.seed_shuffle};
      const auto result = hdqkd::cascade(alice_bits, bob_bits, rec_qber, ccfg);
      hdqkd::write_bits(rec_out, result.corrected);
      std::printf("corrections=%zu leaked_bits=%llu exchanges=%llu converged=%s\n",
                  result.corrections, static_cast<unsigned long long>(result.leaked_bits),
                  static_cast<unsigned long long>(result.parity_exchanges),
                  result.converged ? "yes" : "NO");
      if (!result.converged) {
        std::fprintf(stderr, "reconciliation did not converge after %d passes\n",
                     cfg.cascade_passes);
        return 2;
      }
      return 0;
    }

    if (*amp) {
      const auto bits = hdqkd::read_bits(amp_bits);
      const auto seed = hdqkd::ToeplitzSeed::random(bits.size(), amp_nout, amp_seed);
      const auto out_bits = hdqkd::toeplitz_hash(bits, seed, amp_nout);
      const auto bytes = hdqkd::bits_to_bytes(out_bits);
      hdqkd::write_bytes(amp_out, bytes);
      std::printf("amplified %zu -> %zu bits, digest %s\n", bits.size(), amp_nout,
                  hdqkd::hex_digest(bytes).c_str());
      return 0;
    }

    if (*analyze) {
      const hdqkd::ErrorBudget errors{cfg.delta, cfg.epsilon};
      const auto model = cfg.channel_model();
      const auto report =
          hdqkd::build_report(cfg.d, errors, model.pulse, model.link, model.detector);
      std::fputs(report.to_text().c_str(), stdout);
      if (!analyze_csv.empty()) {
        std::ofstream out(analyze_csv);
        out << report.to_csv();
      }
      return 0;
    }

    if (*bounds) {
      std::ofstream file;
      open_or_stdout(file, bounds_out) << hdqkd::bounds_csv(bounds_dmax);
      return 0;
    }

    if (*run) {
      if (run_pulses) cfg.pulses = run_pulses;
      if (!run_transport.empty()) cfg.transport = run_transport;
      cfg.validate();
      const auto model = cfg.channel_model();
      const auto session = cfg.session_config();
      const auto outcome = cfg.transport == "tcp"
                               ? hdqkd::run_session_tcp(session, model, cfg.tcp_port)
                               : hdqkd::run_session_inproc(session, model);
      print_session("alice", outcome.alice);
      print_session("bob  ", outcome.bob);
      if (!run_events_out.empty()) {
        std::ofstream out(run_events_out);
        hdqkd::write_events_csv(out, outcome.bob.events);
      }
      if (outcome.keys_match()) {
        std::printf("final keys identical: %zu bits, digest %s\n", outcome.alice.final_key_bits,
                    hdqkd::hex_digest(outcome.alice.final_key).c_str());
        const hdqkd::ErrorBudget errors{cfg.delta, cfg.epsilon};
        const auto report =
            hdqkd::build_report(cfg.d, errors, model.pulse, model.link, model.detector);
        std::fputs(report.to_text().c_str(), stdout);
        if (!run_key_out.empty()) hdqkd::write_bytes(run_key_out, outcome.alice.final_key);
        return 0;
      }
      std::fprintf(stderr, "session aborted\n");
      return 2;
    }

    if (*otp) {
      const auto data = hdqkd::read_bytes(otp_in);
      const auto key = hdqkd::read_bytes(otp_key);
      const auto result =
          otp_decrypt_flag ? hdqkd::otp_decrypt(data, key) : hdqkd::otp_encrypt(data, key);
      if (result.key_repeated)
        std::fprintf(stderr,
                     "warning: key shorter than data; repeating a key voids one-time-pad "
                     "security\n");
      hdqkd::write_bytes(otp_out, result.data);
      return 0;
    }

    if (*aperture) {
      const hdqkd::Dimension dim(app_d);
      double worst = 0.0;
      std::mt19937_64 rng(cfg.seed_channel);
      for (int i = 0; i < app_instances; ++i) {
        const auto profiles = hdqkd::random_radial_profiles(dim, 64, 5.0, rng());
        std::uniform_real_distribution<double> radius(0.0, 5.0);
        double a = radius(rng), b = radius(rng);
        if (a > b) std::swap(a, b);
        if (b - a < 1e-3) b = a + 1e-3;
        const hdqkd::AnnulusSpec annulus(a, b);
        const double p_oam = hdqkd::annulus_probability_oam(profiles, annulus);
        const double p_ang = hdqkd::annulus_probability_ang(profiles, annulus, 4 * app_d);
        worst = std::max(worst, std::abs(p_ang - p_oam));
      }
      std::printf("d=%d instances=%d  max |P_ANG - P_OAM| = %.3e  %s\n", app_d, app_instances,
                  worst, worst < 1e-9 ? "PASS" : "FAIL");
      return worst < 1e-9 ? 0 : 1;
    }

    if (*dump) {
      std::fputs(cfg.dump().c_str(), stdout);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 3;
  }
  return 0;
}
