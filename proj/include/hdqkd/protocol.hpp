#pragma once

// Prepare-and-measure protocol: Alice/Bob state machines, sifting, symbol/bit
// mapping, shared shuffling, OTP demo, and the end-to-end session runner over
// an in-process or TCP classical transport.

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hdqkd/channel.hpp"
#include "hdqkd/privacy.hpp"
#include "hdqkd/reconcile.hpp"
#include "hdqkd/security.hpp"
#include "hdqkd/transport.hpp"

namespace hdqkd {

enum class Phase { Transmitting, Sifting, Reconciling, Amplifying, Done };

struct PulseRecord {
  int symbol;
  Basis basis;
};

struct SiftedKey {
  std::vector<int> symbols;
  std::vector<Basis> basis_record;
  std::vector<std::uint64_t> pulse_indices;

  std::size_t size() const { return symbols.size(); }
};

inline PulseRecord alice_emit_pulse(std::mt19937_64& rng, int d) {
  std::uniform_int_distribution<int> sym(0, d - 1);
  std::bernoulli_distribution coin(0.5);
  return PulseRecord{sym(rng), coin(rng) ? Basis::ANG : Basis::OAM};
}

// Keep only pulses with a single click and matching bases; outputs stay
// index-aligned across the parties.
inline std::pair<SiftedKey, SiftedKey> sift(const std::vector<PulseRecord>& alice,
                                            const std::vector<DetectionEvent>& bob) {
  if (alice.size() != bob.size()) throw std::invalid_argument("sift: misaligned record streams");
  SiftedKey a, b;
  for (std::size_t i = 0; i < alice.size(); ++i) {
    const auto& ev = bob[i];
    if (ev.kind != OutcomeKind::Click) continue;
    if (ev.recv_basis != alice[i].basis) continue;
    a.symbols.push_back(alice[i].symbol);
    a.basis_record.push_back(alice[i].basis);
    a.pulse_indices.push_back(i);
    b.symbols.push_back(ev.detector);
    b.basis_record.push_back(ev.recv_basis);
    b.pulse_indices.push_back(i);
  }
  return {std::move(a), std::move(b)};
}

inline int bits_per_symbol(int d) {
  int bits = 0;
  while ((1 << bits) < d) ++bits;
  return bits;
}

// Each symbol becomes its big-endian binary representation (3 bits at d=7).
inline BitString symbols_to_bits(const std::vector<int>& symbols, int d) {
  const int width = bits_per_symbol(d);
  BitString bits;
  bits.reserve(symbols.size() * static_cast<std::size_t>(width));
  for (int s : symbols) {
    if (s < 0 || s >= d) throw std::invalid_argument("symbol outside alphabet");
    for (int b = width - 1; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((s >> b) & 1));
  }
  return bits;
}

inline std::vector<int> bits_to_symbols(const BitString& bits, int d) {
  const int width = bits_per_symbol(d);
  if (bits.size() % static_cast<std::size_t>(width) != 0)
    throw std::invalid_argument("bit string length not a multiple of symbol width");
  std::vector<int> symbols;
  symbols.reserve(bits.size() / static_cast<std::size_t>(width));
  for (std::size_t i = 0; i < bits.size(); i += static_cast<std::size_t>(width)) {
    int s = 0;
    for (int b = 0; b < width; ++b) s = (s << 1) | bits[i + static_cast<std::size_t>(b)];
    if (s >= d) throw std::invalid_argument("decoded symbol outside alphabet");
    symbols.push_back(s);
  }
  return symbols;
}

inline std::vector<std::uint32_t> shuffle_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::uint32_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(perm[i - 1], perm[pick(rng)]);
  }
  return perm;
}

inline BitString shared_shuffle(const BitString& bits, std::uint64_t seed) {
  const auto perm = shuffle_permutation(bits.size(), seed);
  BitString out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) out[i] = bits[perm[i]];
  return out;
}

inline BitString shared_unshuffle(const BitString& bits, std::uint64_t seed) {
  const auto perm = shuffle_permutation(bits.size(), seed);
  BitString out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) out[perm[i]] = bits[i];
  return out;
}

struct OtpResult {
  std::vector<std::uint8_t> data;
  bool key_repeated = false;  // reuse voids the one-time-pad guarantee
};

inline OtpResult otp_encrypt(const std::vector<std::uint8_t>& data,
                             const std::vector<std::uint8_t>& key_bytes) {
  if (key_bytes.empty()) throw std::invalid_argument("otp: empty key");
  OtpResult out;
  out.data.resize(data.size());
  out.key_repeated = data.size() > key_bytes.size();
  for (std::size_t i = 0; i < data.size(); ++i)
    out.data[i] = static_cast<std::uint8_t>(data[i] ^ key_bytes[i % key_bytes.size()]);
  return out;
}

inline OtpResult otp_decrypt(const std::vector<std::uint8_t>& data,
                             const std::vector<std::uint8_t>& key_bytes) {
  return otp_encrypt(data, key_bytes);  // XOR is an involution
}

inline std::uint64_t fnv1a64(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t digest_bits(const BitString& bits) { return fnv1a64(bits_to_bytes(bits)); }

// One-directional quantum channel: Alice pushes pulses, Bob pops them and
// runs them through the channel simulator on his side.
class QuantumChannel {
 public:
  void push(PulseRecord pulse) {
    {
      std::lock_guard lock(mutex_);
      queue_.push_back(pulse);
    }
    cv_.notify_one();
  }
  PulseRecord pop() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [this] { return !queue_.empty(); });
    PulseRecord p = queue_.front();
    queue_.pop_front();
    return p;
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<PulseRecord> queue_;
};

struct SessionConfig {
  int d = 7;
  std::uint64_t num_pulses = 100000;
  double sample_fraction = 0.1;    // sifted symbols disclosed for QBER estimation
  double abort_threshold = 0.0;    // 0 = coherent bound for d
  CascadeConfig cascade;
  long long safety_margin_bits = 0;
  std::uint64_t source_seed = 11;
  std::uint64_t bob_basis_seed = 22;
  std::uint64_t channel_seed = 33;
  std::uint64_t shuffle_seed = 44;
  std::uint64_t pa_seed = 55;
  std::uint64_t sample_seed = 66;

  double effective_abort_threshold() const {
    return abort_threshold > 0.0 ? abort_threshold : coherent_bound(d);
  }
};

struct SessionResult {
  Phase phase = Phase::Transmitting;
  bool aborted = false;
  std::string abort_reason;
  std::size_t sifted_symbols = 0;   // before sample disclosure
  std::size_t key_symbols = 0;      // after sample disclosure
  double qber = 0.0;
  std::uint64_t leaked_bits = 0;
  std::size_t final_key_bits = 0;
  std::vector<std::uint8_t> final_key;
  std::uint64_t final_digest = 0;
  std::uint64_t messages_sent = 0;
  std::uint64_t bytes_sent = 0;
  std::vector<MessageType> sent_types;          // transcript audit
  std::vector<PulseRecord> pulses;              // Alice: sent; Bob: empty
  std::vector<DetectionEvent> events;           // Bob: received; Alice: empty
};

namespace detail {

struct AbortSignal {
  std::string reason;
};

inline void send_tracked(Transport& t, SessionResult& r, const ClassicalMessage& msg) {
  t.send(msg);
  r.sent_types.push_back(msg.type);
}

inline ClassicalMessage recv_or_abort(Transport& t) {
  ClassicalMessage msg = t.recv();
  if (msg.type == MessageType::Abort) {
    PayloadReader rd{msg.payload};
    const auto blob = rd.blob();
    throw AbortSignal{std::string(blob.begin(), blob.end())};
  }
  return msg;
}

inline void send_abort(Transport& t, SessionResult& r, const std::string& reason) {
  PayloadWriter w;
  w.blob(std::vector<std::uint8_t>(reason.begin(), reason.end()));
  send_tracked(t, r, {MessageType::Abort, w.bytes});
}

inline BitString unpack_bits(const std::vector<std::uint8_t>& bytes, std::size_t nbits) {
  BitString bits(nbits);
  for (std::size_t i = 0; i < nbits; ++i)
    bits[i] = static_cast<std::uint8_t>((bytes[i / 8] >> (7 - i % 8)) & 1);
  return bits;
}

class TransportParityOracle : public ParityOracle {
 public:
  TransportParityOracle(Transport& t, SessionResult& r) : transport_(t), result_(r) {}

  std::vector<std::uint8_t> parities(int pass, const std::vector<Range>& ranges) override {
    PayloadWriter w;
    w.u8(static_cast<std::uint8_t>(pass));
    w.u32(static_cast<std::uint32_t>(ranges.size()));
    for (const auto& [s, e] : ranges) {
      w.u32(s);
      w.u32(e);
    }
    send_tracked(transport_, result_, {MessageType::ParityRequest, w.bytes});
    ClassicalMessage msg = recv_or_abort(transport_);
    if (msg.type != MessageType::ParityResponse)
      throw std::runtime_error("expected parity-response");
    PayloadReader rd{msg.payload};
    const std::uint32_t n = rd.u32();
    if (n != ranges.size()) throw std::runtime_error("parity-response count mismatch");
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = rd.u8();
    return bits;
  }

 private:
  Transport& transport_;
  SessionResult& result_;
};

}  // namespace detail

// Sample positions (indices into the sifted key) disclosed for QBER
// estimation; drawn without replacement from a shared seed.
inline std::vector<std::uint32_t> sample_positions(std::size_t n_sifted, double fraction,
                                                   std::uint64_t seed) {
  const std::size_t k = static_cast<std::size_t>(std::floor(fraction * n_sifted));
  std::vector<std::uint32_t> all(n_sifted);
  for (std::size_t i = 0; i < n_sifted; ++i) all[i] = static_cast<std::uint32_t>(i);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k && n_sifted > 1; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n_sifted - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

template <typename T>
std::vector<T> remove_positions(const std::vector<T>& values,
                                const std::vector<std::uint32_t>& sorted_positions) {
  std::vector<T> out;
  out.reserve(values.size() - sorted_positions.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (next < sorted_positions.size() && sorted_positions[next] == i) {
      ++next;
      continue;
    }
    out.push_back(values[i]);
  }
  return out;
}

// Alice endpoint: transmits pulses, answers sifting and parity queries,
// chooses the shuffle/PA seeds, and verifies the final key digest.
inline SessionResult run_alice(const SessionConfig& config, QuantumChannel& channel,
                               Transport& transport) {
  SessionResult result;
  try {
    std::mt19937_64 source_rng(config.source_seed);
    result.pulses.reserve(config.num_pulses);
    for (std::uint64_t i = 0; i < config.num_pulses; ++i) {
      const PulseRecord p = alice_emit_pulse(source_rng, config.d);
      result.pulses.push_back(p);
      channel.push(p);
    }
    result.phase = Phase::Sifting;

    // Bob announces bases and outcome kinds; symbols stay private.
    ClassicalMessage announce = detail::recv_or_abort(transport);
    if (announce.type != MessageType::BasesAnnouncement)
      throw std::runtime_error("expected bases-announcement");
    PayloadReader rd{announce.payload};
    const std::uint32_t count = rd.u32();
    if (count != config.num_pulses) throw std::runtime_error("announcement count mismatch");
    std::vector<std::uint64_t> kept;
    std::vector<int> kept_symbols;
    for (std::uint32_t i = 0; i < count; ++i) {
      const std::uint8_t code = rd.u8();
      const Basis bob_basis = (code & 1) ? Basis::ANG : Basis::OAM;
      const bool single_click = ((code >> 1) & 3) == 1;
      if (single_click && bob_basis == result.pulses[i].basis) {
        kept.push_back(i);
        kept_symbols.push_back(result.pulses[i].symbol);
      }
    }
    result.sifted_symbols = kept.size();
    if (kept.empty()) {
      detail::send_abort(transport, result, "empty sifted key");
      result.aborted = true;
      result.abort_reason = "empty sifted key";
      return result;
    }

    // Sift-ack: kept pulse indices plus the disclosed QBER sample.
    const auto sample = sample_positions(kept.size(), config.sample_fraction, config.sample_seed);
    PayloadWriter ack;
    ack.u32(static_cast<std::uint32_t>(kept.size()));
    for (std::uint64_t idx : kept) ack.u64(idx);
    ack.u32(static_cast<std::uint32_t>(sample.size()));
    for (std::uint32_t pos : sample) {
      ack.u32(pos);
      ack.u8(static_cast<std::uint8_t>(kept_symbols[pos]));
    }
    detail::send_tracked(transport, result, {MessageType::SiftAck, ack.bytes});

    ClassicalMessage qber_msg = detail::recv_or_abort(transport);
    if (qber_msg.type != MessageType::QberEstimate) throw std::runtime_error("expected qber-estimate");
    PayloadReader qrd{qber_msg.payload};
    result.qber = qrd.f64();

    const auto key_symbols = remove_positions(kept_symbols, sample);
    result.key_symbols = key_symbols.size();
    result.phase = Phase::Reconciling;

    PayloadWriter sh;
    sh.u64(config.shuffle_seed);
    detail::send_tracked(transport, result, {MessageType::ShuffleSeed, sh.bytes});
    BitString key_bits = shared_shuffle(symbols_to_bits(key_symbols, config.d),
                                        config.shuffle_seed);

    // Serve cascade parity queries until Bob reports his corrected digest.
    ParityServer server(key_bits, config.cascade.shuffle_seed ? config.cascade.shuffle_seed
                                                              : config.shuffle_seed);
    ClassicalMessage msg = detail::recv_or_abort(transport);
    while (msg.type == MessageType::ParityRequest) {
      PayloadReader prd{msg.payload};
      const int pass = prd.u8();
      const std::uint32_t n = prd.u32();
      std::vector<Range> ranges(n);
      for (auto& [s, e] : ranges) {
        s = prd.u32();
        e = prd.u32();
      }
      const auto bits = server.parities(pass, ranges);
      PayloadWriter pw;
      pw.u32(static_cast<std::uint32_t>(bits.size()));
      for (std::uint8_t b : bits) pw.u8(b);
      detail::send_tracked(transport, result, {MessageType::ParityResponse, pw.bytes});
      msg = detail::recv_or_abort(transport);
    }
    if (msg.type != MessageType::KeyDigest) throw std::runtime_error("expected key-digest");
    PayloadReader drd{msg.payload};
    const std::uint64_t bob_digest = drd.u64();
    result.leaked_bits = server.disclosed_bits();
    if (bob_digest != digest_bits(key_bits)) {
      detail::send_abort(transport, result, "reconciliation digest mismatch");
      result.aborted = true;
      result.abort_reason = "reconciliation digest mismatch";
      return result;
    }
    result.phase = Phase::Amplifying;

    // Secure length from the measured QBER, minus disclosed parities.
    const double fidelity = std::clamp(1.0 - result.qber, 1.0 / config.d + 1e-9, 1.0);
    SecureLengthBudget budget;
    budget.n_sift_symbols = static_cast<double>(key_symbols.size());
    budget.bits_per_symbol = mutual_info_uniform(config.d, fidelity);
    budget.eve_bits_per_symbol = eve_info(config.d, fidelity);
    budget.ec_leakage_bits = static_cast<long long>(result.leaked_bits);
    budget.safety_margin_bits = config.safety_margin_bits;
    const std::size_t n_out = secure_length(budget);
    if (n_out == 0) {
      detail::send_abort(transport, result, "no secure bits left after leakage");
      result.aborted = true;
      result.abort_reason = "no secure bits left after leakage";
      return result;
    }

    const ToeplitzSeed seed = ToeplitzSeed::random(key_bits.size(), n_out, config.pa_seed);
    PayloadWriter pa;
    pa.u32(static_cast<std::uint32_t>(n_out));
    pa.u32(static_cast<std::uint32_t>(seed.bits.size()));
    pa.blob(bits_to_bytes(seed.bits));
    detail::send_tracked(transport, result, {MessageType::PaSeed, pa.bytes});

    const BitString final_bits = toeplitz_hash(key_bits, seed, n_out);
    result.final_key = bits_to_bytes(final_bits);
    result.final_key_bits = n_out;
    result.final_digest = fnv1a64(result.final_key);

    PayloadWriter dg;
    dg.u64(result.final_digest);
    detail::send_tracked(transport, result, {MessageType::KeyDigest, dg.bytes});
    ClassicalMessage bob_final = detail::recv_or_abort(transport);
    if (bob_final.type != MessageType::KeyDigest) throw std::runtime_error("expected key-digest");
    PayloadReader frd{bob_final.payload};
    if (frd.u64() != result.final_digest) {
      result.aborted = true;
      result.abort_reason = "final key digest mismatch";
      return result;
    }
    result.phase = Phase::Done;
  } catch (const detail::AbortSignal& abort) {
    result.aborted = true;
    result.abort_reason = abort.reason;
  }
  result.messages_sent = transport.messages_sent;
  result.bytes_sent = transport.bytes_sent;
  return result;
}

// Bob endpoint: measures pulses, announces bases, estimates QBER (aborting
// above threshold), runs cascade against Alice, and applies the PA seed.
inline SessionResult run_bob(const SessionConfig& config, const ChannelModel& model,
                             QuantumChannel& channel, Transport& transport) {
  SessionResult result;
  try {
    std::mt19937_64 basis_rng(config.bob_basis_seed);
    PulseSimulator sim(model, config.channel_seed);
    std::bernoulli_distribution coin(0.5);
    result.events.reserve(config.num_pulses);
    for (std::uint64_t i = 0; i < config.num_pulses; ++i) {
      const PulseRecord sent = channel.pop();
      const Basis recv_basis = coin(basis_rng) ? Basis::ANG : Basis::OAM;
      result.events.push_back(sim.simulate(i, sent.symbol, sent.basis, recv_basis));
    }
    result.phase = Phase::Sifting;

    PayloadWriter announce;
    announce.u32(static_cast<std::uint32_t>(config.num_pulses));
    for (const auto& ev : result.events) {
      std::uint8_t code = (ev.recv_basis == Basis::ANG) ? 1 : 0;
      const std::uint8_t kind = ev.kind == OutcomeKind::Click ? 1
                                : ev.kind == OutcomeKind::MultiClick ? 2
                                                                     : 0;
      code |= static_cast<std::uint8_t>(kind << 1);
      announce.u8(code);
    }
    detail::send_tracked(transport, result, {MessageType::BasesAnnouncement, announce.bytes});

    ClassicalMessage ack = detail::recv_or_abort(transport);
    if (ack.type != MessageType::SiftAck) throw std::runtime_error("expected sift-ack");
    PayloadReader rd{ack.payload};
    const std::uint32_t n_kept = rd.u32();
    std::vector<int> kept_symbols;
    kept_symbols.reserve(n_kept);
    for (std::uint32_t i = 0; i < n_kept; ++i) {
      const std::uint64_t pulse = rd.u64();
      if (pulse >= result.events.size()) throw std::runtime_error("sift-ack index out of range");
      kept_symbols.push_back(result.events[pulse].detector);
    }
    result.sifted_symbols = kept_symbols.size();

    const std::uint32_t n_sample = rd.u32();
    std::vector<std::uint32_t> sample;
    std::size_t sample_errors = 0;
    sample.reserve(n_sample);
    for (std::uint32_t i = 0; i < n_sample; ++i) {
      const std::uint32_t pos = rd.u32();
      const int alice_symbol = rd.u8();
      sample.push_back(pos);
      if (pos >= kept_symbols.size()) throw std::runtime_error("sample position out of range");
      if (kept_symbols[pos] != alice_symbol) ++sample_errors;
    }
    result.qber = n_sample ? static_cast<double>(sample_errors) / n_sample : 0.0;

    const double threshold = config.effective_abort_threshold();
    if (result.qber > threshold) {
      const std::string reason = "QBER " + std::to_string(result.qber) +
                                 " above abort threshold " + std::to_string(threshold);
      detail::send_abort(transport, result, reason);
      result.aborted = true;
      result.abort_reason = reason;
      return result;
    }
    PayloadWriter qw;
    qw.f64(result.qber);
    detail::send_tracked(transport, result, {MessageType::QberEstimate, qw.bytes});

    const auto key_symbols = remove_positions(kept_symbols, sample);
    result.key_symbols = key_symbols.size();
    result.phase = Phase::Reconciling;

    ClassicalMessage sh = detail::recv_or_abort(transport);
    if (sh.type != MessageType::ShuffleSeed) throw std::runtime_error("expected shuffle-seed");
    PayloadReader srd{sh.payload};
    const std::uint64_t shuffle_seed = srd.u64();
    BitString key_bits = shared_shuffle(symbols_to_bits(key_symbols, config.d), shuffle_seed);

    CascadeConfig cascade_cfg = config.cascade;
    if (cascade_cfg.shuffle_seed == 0) cascade_cfg.shuffle_seed = shuffle_seed;
    detail::TransportParityOracle oracle(transport, result);
    CascadeEngine engine(key_bits, result.qber, cascade_cfg, oracle);
    ReconciliationResult rec = engine.run();
    result.leaked_bits = rec.leaked_bits;
    key_bits = rec.corrected;

    PayloadWriter dg;
    dg.u64(digest_bits(key_bits));
    detail::send_tracked(transport, result, {MessageType::KeyDigest, dg.bytes});
    result.phase = Phase::Amplifying;

    ClassicalMessage pa = detail::recv_or_abort(transport);
    if (pa.type != MessageType::PaSeed) throw std::runtime_error("expected pa-seed");
    PayloadReader prd{pa.payload};
    const std::uint32_t n_out = prd.u32();
    const std::uint32_t n_seed_bits = prd.u32();
    const ToeplitzSeed seed{detail::unpack_bits(prd.blob(), n_seed_bits)};
    const BitString final_bits = toeplitz_hash(key_bits, seed, n_out);
    result.final_key = bits_to_bytes(final_bits);
    result.final_key_bits = n_out;
    result.final_digest = fnv1a64(result.final_key);

    ClassicalMessage alice_final = detail::recv_or_abort(transport);
    if (alice_final.type != MessageType::KeyDigest) throw std::runtime_error("expected key-digest");
    PayloadReader frd{alice_final.payload};
    if (frd.u64() != result.final_digest) {
      detail::send_abort(transport, result, "final key digest mismatch");
      result.aborted = true;
      result.abort_reason = "final key digest mismatch";
      return result;
    }
    PayloadWriter fw;
    fw.u64(result.final_digest);
    detail::send_tracked(transport, result, {MessageType::KeyDigest, fw.bytes});
    result.phase = Phase::Done;
  } catch (const detail::AbortSignal& abort) {
    result.aborted = true;
    result.abort_reason = abort.reason;
  }
  result.messages_sent = transport.messages_sent;
  result.bytes_sent = transport.bytes_sent;
  return result;
}

struct SessionOutcome {
  SessionResult alice;
  SessionResult bob;

  bool completed() const { return !alice.aborted && !bob.aborted; }
  bool keys_match() const {
    return completed() && !alice.final_key.empty() && alice.final_key == bob.final_key;
  }
};

// Run both endpoints concurrently over a transport pair (the quantum channel
// is always in-process).
inline SessionOutcome run_session(const SessionConfig& config, const ChannelModel& model,
                                  Transport& alice_transport, Transport& bob_transport) {
  QuantumChannel channel;
  SessionOutcome outcome;
  std::exception_ptr alice_error, bob_error;
  std::thread alice([&] {
    try {
      outcome.alice = run_alice(config, channel, alice_transport);
    } catch (...) {
      alice_error = std::current_exception();
    }
  });
  std::thread bob([&] {
    try {
      outcome.bob = run_bob(config, model, channel, bob_transport);
    } catch (...) {
      bob_error = std::current_exception();
    }
  });
  alice.join();
  bob.join();
  if (alice_error) std::rethrow_exception(alice_error);
  if (bob_error) std::rethrow_exception(bob_error);
  return outcome;
}

inline SessionOutcome run_session_inproc(const SessionConfig& config, const ChannelModel& model) {
  auto [alice_t, bob_t] = InProcTransport::make_pair();
  return run_session(config, model, *alice_t, *bob_t);
}

inline SessionOutcome run_session_tcp(const SessionConfig& config, const ChannelModel& model,
                                      std::uint16_t port = 0) {
  TcpListener listener(port);
  std::unique_ptr<Transport> bob_t;
  std::thread accepter([&] { bob_t = listener.accept(); });
  auto alice_t = TcpTransport::connect("127.0.0.1", listener.port());
  accepter.join();
  return run_session(config, model, *alice_t, *bob_t);
}

}  // namespace hdqkd
