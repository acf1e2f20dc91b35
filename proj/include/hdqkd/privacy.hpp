#pragma once

// Privacy amplification: Toeplitz universal hashing over GF(2) and the final
// secure-key length budget.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace hdqkd {

using BitString = std::vector<std::uint8_t>;  // one bit per element, 0/1

// Diagonals of an n_out x n_in Toeplitz matrix: T[i][j] = seed[i - j + n_in - 1].
struct ToeplitzSeed {
  BitString bits;

  static ToeplitzSeed random(std::size_t n_in, std::size_t n_out, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    ToeplitzSeed t;
    t.bits.resize(n_in + n_out - 1);
    for (auto& b : t.bits) b = coin(rng) ? 1 : 0;
    return t;
  }
};

// output[i] = XOR_j T[i][j] * input[j]; word-parallel over 64-bit blocks.
inline BitString toeplitz_hash(const BitString& input, const ToeplitzSeed& seed,
                               std::size_t n_out) {
  const std::size_t n_in = input.size();
  if (n_in == 0) throw std::invalid_argument("toeplitz_hash: empty input");
  if (seed.bits.size() != n_in + n_out - 1)
    throw std::invalid_argument("toeplitz seed length must be n_in + n_out - 1");

  const std::size_t words = (n_in + 63) / 64;
  std::vector<std::uint64_t> in_words(words, 0);
  for (std::size_t j = 0; j < n_in; ++j)
    if (input[j]) in_words[j / 64] |= std::uint64_t{1} << (j % 64);

  // Row i uses seed bits [n_out - 1 - i .. n_out - 1 - i + n_in - 1] reversed:
  // T[i][j] = seed[i - j + n_in - 1]. Packing the seed reversed turns each row
  // into a contiguous window.
  const std::size_t ns = seed.bits.size();
  const std::size_t seed_words = (ns + 63) / 64 + 1;
  std::vector<std::uint64_t> rev_seed(seed_words, 0);
  for (std::size_t k = 0; k < ns; ++k)
    if (seed.bits[ns - 1 - k]) rev_seed[k / 64] |= std::uint64_t{1} << (k % 64);

  BitString out(n_out, 0);
  for (std::size_t i = 0; i < n_out; ++i) {
    // Window of n_in seed bits starting at reversed offset (n_out - 1 - i).
    const std::size_t off = n_out - 1 - i;
    const std::size_t word = off / 64;
    const unsigned shift = static_cast<unsigned>(off % 64);
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t window = rev_seed[word + w] >> shift;
      if (shift != 0 && word + w + 1 < rev_seed.size())
        window |= rev_seed[word + w + 1] << (64 - shift);
      acc ^= window & in_words[w];
    }
    out[i] = static_cast<std::uint8_t>(std::popcount(acc) & 1);
  }
  return out;
}

struct SecureLengthBudget {
  double n_sift_symbols = 0.0;
  double bits_per_symbol = 0.0;      // I_AB
  double eve_bits_per_symbol = 0.0;  // I_AE
  long long ec_leakage_bits = 0;
  long long safety_margin_bits = 0;

  void validate() const {
    if (n_sift_symbols < 0.0 || bits_per_symbol < 0.0 || eve_bits_per_symbol < 0.0 ||
        ec_leakage_bits < 0 || safety_margin_bits < 0)
      throw std::invalid_argument("secure-length budget fields must be non-negative");
  }
};

// floor(n_sift (I_AB - I_AE)) - leakage - margin, clamped at zero.
inline std::size_t secure_length(const SecureLengthBudget& budget) {
  budget.validate();
  const double gap = budget.bits_per_symbol - budget.eve_bits_per_symbol;
  if (gap <= 0.0) return 0;
  // Nudge before the floor so products like 1000 * (2.05 - 0.35) that land
  // one ulp under an integer do not lose a whole bit.
  const long long raw = static_cast<long long>(std::floor(budget.n_sift_symbols * gap + 1e-9)) -
                        budget.ec_leakage_bits - budget.safety_margin_bits;
  return raw > 0 ? static_cast<std::size_t>(raw) : 0;
}

inline std::vector<std::uint8_t> bits_to_bytes(const BitString& bits) {
  std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (7 - i % 8));
  return bytes;
}

}  // namespace hdqkd
