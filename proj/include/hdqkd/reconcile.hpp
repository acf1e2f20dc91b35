#pragma once

// Cascade error correction. Bob drives the protocol against a parity oracle
// backed by Alice's key (directly, or across the classical transport); every
// parity bit the oracle discloses is tallied as leakage.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hdqkd/privacy.hpp"  // BitString

namespace hdqkd {

struct CascadeConfig {
  int passes = 4;
  std::size_t initial_block_size = 0;  // 0 = auto, ~0.73/QBER
  std::uint64_t shuffle_seed = 0;      // shared; derives the per-pass permutations

  void validate() const {
    if (passes < 1) throw std::invalid_argument("cascade needs >= 1 pass");
  }
};

inline std::size_t cascade_block_size(double qber, std::size_t key_length) {
  if (qber <= 0.0) return key_length;
  const double k = std::ceil(0.73 / qber);
  return std::clamp<std::size_t>(static_cast<std::size_t>(k), 1, key_length);
}

// Pass 0 keeps key order; later passes use a seeded Fisher-Yates shuffle.
// Returns pass-position -> key-index.
inline std::vector<std::uint32_t> cascade_permutation(std::size_t n, std::uint64_t seed,
                                                      int pass) {
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  if (pass == 0) return perm;
  std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(pass));
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(perm[i - 1], perm[pick(rng)]);
  }
  return perm;
}

using Range = std::pair<std::uint32_t, std::uint32_t>;  // [start, end) in pass coordinates

// Alice's side of cascade: answer parity queries for ranges of a pass
// permutation of her key.
class ParityServer {
 public:
  ParityServer(const BitString& key, std::uint64_t shuffle_seed)
      : key_(key), seed_(shuffle_seed) {}

  std::vector<std::uint8_t> parities(int pass, const std::vector<Range>& ranges) {
    const auto& perm = permutation(pass);
    std::vector<std::uint8_t> out;
    out.reserve(ranges.size());
    for (const auto& [start, end] : ranges) {
      if (end > key_.size() || start >= end) throw std::out_of_range("parity range out of key");
      std::uint8_t p = 0;
      for (std::uint32_t i = start; i < end; ++i) p ^= key_[perm[i]];
      out.push_back(p);
    }
    disclosed_ += ranges.size();
    return out;
  }

  std::uint64_t disclosed_bits() const { return disclosed_; }

 private:
  const std::vector<std::uint32_t>& permutation(int pass) {
    while (perms_.size() <= static_cast<std::size_t>(pass))
      perms_.push_back(cascade_permutation(key_.size(), seed_, static_cast<int>(perms_.size())));
    return perms_[static_cast<std::size_t>(pass)];
  }

  BitString key_;
  std::uint64_t seed_;
  std::vector<std::vector<std::uint32_t>> perms_;
  std::uint64_t disclosed_ = 0;
};

// Oracle seen from Bob's side; implementations forward to a local
// ParityServer or to the remote party over the transport.
class ParityOracle {
 public:
  virtual ~ParityOracle() = default;
  virtual std::vector<std::uint8_t> parities(int pass, const std::vector<Range>& ranges) = 0;
};

class LocalParityOracle : public ParityOracle {
 public:
  LocalParityOracle(const BitString& alice_key, std::uint64_t shuffle_seed)
      : server_(alice_key, shuffle_seed) {}
  std::vector<std::uint8_t> parities(int pass, const std::vector<Range>& ranges) override {
    return server_.parities(pass, ranges);
  }

 private:
  ParityServer server_;
};

struct ReconciliationResult {
  BitString corrected;
  std::uint64_t leaked_bits = 0;       // parity bits disclosed by Alice
  std::uint64_t parity_exchanges = 0;  // oracle round trips
  std::size_t corrections = 0;
  bool converged = false;              // all tracked block parities consistent
  double residual_error_estimate = 0.0;
};

inline std::uint8_t block_parity(const BitString& bits, std::size_t start, std::size_t end) {
  if (end > bits.size() || start > end) throw std::out_of_range("block_parity range");
  std::uint8_t p = 0;
  for (std::size_t i = start; i < end; ++i) p ^= bits[i];
  return p;
}

// Bob's cascade engine. Binary searches disclose ceil(log2 |block|) parities;
// corrections re-check every earlier pass block containing the flipped bit.
class CascadeEngine {
 public:
  CascadeEngine(BitString bob_key, double qber_estimate, CascadeConfig config,
                ParityOracle& oracle)
      : key_(std::move(bob_key)), config_(config), oracle_(oracle) {
    config_.validate();
    if (key_.empty()) throw std::invalid_argument("cascade: empty key");
    block0_ = config_.initial_block_size
                  ? std::min(config_.initial_block_size, key_.size())
                  : cascade_block_size(qber_estimate, key_.size());
  }

  ReconciliationResult run() {
    const std::size_t n = key_.size();
    for (int pass = 0; pass < config_.passes; ++pass) {
      PassState ps;
      ps.block_size = std::min(block0_ << pass, n);
      ps.perm = cascade_permutation(n, config_.shuffle_seed, pass);
      ps.inverse.resize(n);
      for (std::size_t i = 0; i < n; ++i) ps.inverse[ps.perm[i]] = static_cast<std::uint32_t>(i);
      const std::size_t blocks = (n + ps.block_size - 1) / ps.block_size;

      std::vector<Range> ranges;
      ranges.reserve(blocks);
      for (std::size_t b = 0; b < blocks; ++b)
        ranges.emplace_back(static_cast<std::uint32_t>(b * ps.block_size),
                            static_cast<std::uint32_t>(std::min((b + 1) * ps.block_size, n)));
      const auto alice = query(pass, ranges);
      ps.alice_parity.resize(blocks);
      ps.bob_parity.resize(blocks);
      for (std::size_t b = 0; b < blocks; ++b) {
        ps.alice_parity[b] = alice[b];
        ps.bob_parity[b] = pass_parity(ps, ranges[b].first, ranges[b].second);
        if (ps.alice_parity[b] != ps.bob_parity[b]) work_.insert({pass, b});
      }
      passes_.push_back(std::move(ps));
      drain_work();
    }

    ReconciliationResult result;
    result.corrected = key_;
    result.leaked_bits = leaked_;
    result.parity_exchanges = exchanges_;
    result.corrections = corrections_;
    result.converged = work_.empty();
    result.residual_error_estimate =
        work_.empty() ? 0.0 : static_cast<double>(work_.size()) / static_cast<double>(n);
    return result;
  }

 private:
  struct PassState {
    std::size_t block_size = 0;
    std::vector<std::uint32_t> perm;     // pass position -> key index
    std::vector<std::uint32_t> inverse;  // key index -> pass position
    std::vector<std::uint8_t> alice_parity;
    std::vector<std::uint8_t> bob_parity;
  };

  std::vector<std::uint8_t> query(int pass, const std::vector<Range>& ranges) {
    ++exchanges_;
    leaked_ += ranges.size();
    return oracle_.parities(pass, ranges);
  }

  std::uint8_t pass_parity(const PassState& ps, std::size_t start, std::size_t end) const {
    std::uint8_t p = 0;
    for (std::size_t i = start; i < end; ++i) p ^= key_[ps.perm[i]];
    return p;
  }

  void drain_work() {
    while (!work_.empty()) {
      const auto [pass, block] = *work_.begin();
      binary_locate_and_fix(pass, block);
    }
  }

  // Standard BINARY: halve the mismatching block until one bit remains.
  void binary_locate_and_fix(int pass, std::size_t block) {
    const PassState& ps = passes_[static_cast<std::size_t>(pass)];
    std::size_t start = block * ps.block_size;
    std::size_t end = std::min(start + ps.block_size, key_.size());
    while (end - start > 1) {
      const std::size_t mid = start + (end - start) / 2;
      const auto alice_left = query(pass, {{static_cast<std::uint32_t>(start),
                                            static_cast<std::uint32_t>(mid)}})[0];
      if (alice_left != pass_parity(ps, start, mid))
        end = mid;
      else
        start = mid;
    }
    flip(ps.perm[start]);
  }

  // Flip one key bit and toggle the tracked parity of every containing block.
  void flip(std::uint32_t key_index) {
    key_[key_index] ^= 1;
    ++corrections_;
    for (std::size_t p = 0; p < passes_.size(); ++p) {
      PassState& ps = passes_[p];
      const std::size_t block = ps.inverse[key_index] / ps.block_size;
      ps.bob_parity[block] ^= 1;
      if (ps.bob_parity[block] != ps.alice_parity[block])
        work_.insert({static_cast<int>(p), block});
      else
        work_.erase({static_cast<int>(p), block});
    }
  }

  BitString key_;
  CascadeConfig config_;
  ParityOracle& oracle_;
  std::size_t block0_ = 0;
  std::vector<PassState> passes_;
  std::set<std::pair<int, std::size_t>> work_;
  std::uint64_t leaked_ = 0;
  std::uint64_t exchanges_ = 0;
  std::size_t corrections_ = 0;
};

// Convenience entry point with a local oracle (both keys in hand).
inline ReconciliationResult cascade(const BitString& alice_key, const BitString& bob_key,
                                    double qber_estimate, const CascadeConfig& config) {
  if (alice_key.size() != bob_key.size())
    throw std::invalid_argument("cascade: key length mismatch");
  LocalParityOracle oracle(alice_key, config.shuffle_seed);
  CascadeEngine engine(bob_key, qber_estimate, config, oracle);
  return engine.run();
}

// Locate a single error in a block whose parity is known to mismatch,
// querying alice_parity(start, end) for sub-ranges. Returns (position,
// parity queries used).
inline std::pair<std::size_t, std::size_t> binary_locate(
    const std::function<std::uint8_t(std::size_t, std::size_t)>& alice_parity,
    const BitString& bob_bits, std::size_t start, std::size_t end) {
  if (end > bob_bits.size() || start >= end) throw std::out_of_range("binary_locate range");
  if (alice_parity(start, end) == block_parity(bob_bits, start, end))
    throw std::invalid_argument("binary_locate called on a matching-parity block");
  std::size_t queries = 0;
  while (end - start > 1) {
    const std::size_t mid = start + (end - start) / 2;
    ++queries;
    if (alice_parity(start, mid) != block_parity(bob_bits, start, mid))
      end = mid;
    else
      start = mid;
  }
  return {start, queries};
}

}  // namespace hdqkd
