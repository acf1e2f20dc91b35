#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hdqkd/privacy.hpp"

using namespace hdqkd;

namespace {

BitString random_bits(std::size_t n, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  BitString bits(n);
  for (auto& b : bits) b = coin(rng) ? 1 : 0;
  return bits;
}

// Dense matrix-vector oracle: T[i][j] = seed[i - j + n_in - 1].
BitString dense_toeplitz(const BitString& input, const ToeplitzSeed& seed, std::size_t n_out) {
  const std::size_t n_in = input.size();
  BitString out(n_out, 0);
  for (std::size_t i = 0; i < n_out; ++i) {
    std::uint8_t acc = 0;
    for (std::size_t j = 0; j < n_in; ++j)
      acc ^= static_cast<std::uint8_t>(seed.bits[i - j + n_in - 1] & input[j]);
    out[i] = acc;
  }
  return out;
}

}  // namespace

TEST_CASE("toeplitz seed length is checked") {
  std::mt19937_64 rng(1);
  const auto input = random_bits(16, rng);
  ToeplitzSeed bad{BitString(10, 1)};
  CHECK_THROWS_AS(toeplitz_hash(input, bad, 8), std::invalid_argument);
  CHECK_THROWS_AS(toeplitz_hash(BitString{}, bad, 8), std::invalid_argument);
}

TEST_CASE("zero input hashes to zero") {
  const auto seed = ToeplitzSeed::random(64, 16, 9);
  const auto out = toeplitz_hash(BitString(64, 0), seed, 16);
  for (auto b : out) CHECK(b == 0);
}

TEST_CASE("toeplitz hash is GF(2)-linear") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto seed = ToeplitzSeed::random(100, 30, rng());
    const auto a = random_bits(100, rng);
    const auto b = random_bits(100, rng);
    BitString axb(100);
    for (std::size_t i = 0; i < 100; ++i) axb[i] = a[i] ^ b[i];
    const auto ha = toeplitz_hash(a, seed, 30);
    const auto hb = toeplitz_hash(b, seed, 30);
    const auto hab = toeplitz_hash(axb, seed, 30);
    for (std::size_t i = 0; i < 30; ++i) CHECK(hab[i] == (ha[i] ^ hb[i]));
  }
}

TEST_CASE("8->3 hash matches the dense matrix oracle for 100 random seeds") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto seed = ToeplitzSeed::random(8, 3, rng());
    const auto input = random_bits(8, rng);
    CHECK(toeplitz_hash(input, seed, 3) == dense_toeplitz(input, seed, 3));
  }
}

TEST_CASE("large hashes match the dense oracle") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n_in = 700 + trial * 131, n_out = 250 + trial * 17;
    const auto seed = ToeplitzSeed::random(n_in, n_out, rng());
    const auto input = random_bits(n_in, rng);
    CHECK(toeplitz_hash(input, seed, n_out) == dense_toeplitz(input, seed, n_out));
  }
}

TEST_CASE("shared seed gives identical outputs on both sides") {
  std::mt19937_64 rng(5);
  const auto input = random_bits(500, rng);
  const auto alice_seed = ToeplitzSeed::random(500, 200, 4242);
  const auto bob_seed = ToeplitzSeed::random(500, 200, 4242);
  CHECK(toeplitz_hash(input, alice_seed, 200) == toeplitz_hash(input, bob_seed, 200));
}

TEST_CASE("output bit frequencies are balanced over random seeds") {
  std::mt19937_64 rng(6);
  const auto input = random_bits(64, rng);
  double ones = 0.0, total = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto seed = ToeplitzSeed::random(64, 16, rng());
    for (auto b : toeplitz_hash(input, seed, 16)) {
      ones += b;
      total += 1.0;
    }
  }
  CHECK(std::abs(ones / total - 0.5) < 0.02);
}

TEST_CASE("secure_length reference values") {
  SecureLengthBudget ref;
  ref.n_sift_symbols = 1.0;
  ref.bits_per_symbol = 2.05;
  ref.eve_bits_per_symbol = 0.35;
  CHECK(secure_length(ref) == 1);  // floor(1.7)
  CHECK(ref.bits_per_symbol - ref.eve_bits_per_symbol == Catch::Approx(1.7).margin(0.001));

  SecureLengthBudget equal;
  equal.n_sift_symbols = 1000;
  equal.bits_per_symbol = 1.0;
  equal.eve_bits_per_symbol = 1.0;
  CHECK(secure_length(equal) == 0);

  SecureLengthBudget worked;
  worked.n_sift_symbols = 1000;
  worked.bits_per_symbol = 2.05;
  worked.eve_bits_per_symbol = 0.35;
  worked.ec_leakage_bits = 300;
  worked.safety_margin_bits = 50;
  CHECK(secure_length(worked) == 1350);

  SecureLengthBudget drained = worked;
  drained.ec_leakage_bits = 5000;
  CHECK(secure_length(drained) == 0);

  SecureLengthBudget bad = worked;
  bad.ec_leakage_bits = -1;
  CHECK_THROWS_AS(secure_length(bad), std::invalid_argument);
}

TEST_CASE("bits_to_bytes packs big-endian within bytes") {
  CHECK(bits_to_bytes({1, 0, 1, 0, 0, 0, 0, 0}) == std::vector<std::uint8_t>{0xa0});
  CHECK(bits_to_bytes({1}) == std::vector<std::uint8_t>{0x80});
  CHECK(bits_to_bytes({0, 0, 0, 0, 0, 0, 0, 1, 1}) == std::vector<std::uint8_t>({0x01, 0x80}));
}
