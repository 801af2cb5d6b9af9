#include <doctest.h>

#include "pmkrsa/keystore.hpp"
#include "pmkrsa/rsa_variants.hpp"
#include "support.hpp"

using pmkrsa::BigUint;
using pmkrsa::ErrorCode;
using pmkrsa::KeyPair;

TEST_SUITE("rsa_variants") {
  TEST_CASE("textbook fixtures") {
    const KeyPair k = KeyPair::from_primes(61, 53, 17);
    CHECK(pmkrsa::rsa_encrypt(65, k) == BigUint(2790));
    CHECK(pmkrsa::rsa_decrypt(2790, k) == BigUint(65));
    CHECK(pmkrsa::rsa_encrypt(0, k).is_zero());
    CHECK(pmkrsa::rsa_encrypt(1, k) == BigUint(1));
    CHECK(pmkrsa::rsa_decrypt(0, k).is_zero());
    CHECK(testing::code_of([&] { pmkrsa::rsa_encrypt(3233, k); }) == ErrorCode::MessageTooLarge);
    CHECK(testing::code_of([&] { pmkrsa::rsa_decrypt(4000, k); }) == ErrorCode::MessageTooLarge);
    CHECK(testing::code_of([&] { pmkrsa::rsa_decrypt(5, k.public_part()); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("textbook round trip is exhaustive for N=3233") {
    const KeyPair k = KeyPair::from_primes(61, 53, 17);
    for (std::uint64_t m = 0; m < 3233; ++m) REQUIRE(pmkrsa::rsa_decrypt(pmkrsa::rsa_encrypt(m, k), k) == BigUint(m));
  }

  TEST_CASE("crt_combine fixtures and errors") {
    const std::vector<BigUint> residues = {4, 12};
    const std::vector<BigUint> moduli = {61, 53};
    CHECK(pmkrsa::crt_combine(residues, moduli) == BigUint(65));
    const std::vector<BigUint> zeros = {0, 0, 0};
    const std::vector<BigUint> three = {7, 11, 13};
    CHECK(pmkrsa::crt_combine(zeros, three).is_zero());
    const std::vector<BigUint> one_r = {5};
    const std::vector<BigUint> one_m = {9};
    CHECK(pmkrsa::crt_combine(one_r, one_m) == BigUint(5));
    const std::vector<BigUint> shared = {6, 9};
    const std::vector<BigUint> rs = {1, 2};
    CHECK(testing::code_of([&] { pmkrsa::crt_combine(rs, shared); }) == ErrorCode::NotCoprime);
    const std::vector<BigUint> too_big = {61, 0};
    CHECK(testing::code_of([&] { pmkrsa::crt_combine(too_big, moduli); }) == ErrorCode::InvalidArgument);
    CHECK(testing::code_of([&] { pmkrsa::crt_combine(one_r, moduli); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("crt_combine uniqueness, exhaustive for small products") {
    const std::vector<std::vector<std::uint64_t>> systems = {{7, 11, 13}, {4, 9, 25}, {8, 27, 5, 7}, {999, 1000}};
    for (const auto& mods : systems) {
      std::uint64_t product = 1;
      for (auto m : mods) product *= m;
      REQUIRE(product < 1000000);
      std::vector<BigUint> moduli(mods.begin(), mods.end());
      for (std::uint64_t x = 0; x < product; x += (product > 50000 ? 37 : 1)) {
        std::vector<BigUint> residues;
        for (auto m : mods) residues.emplace_back(x % m);
        REQUIRE(pmkrsa::crt_combine(residues, moduli) == BigUint(x));
      }
    }
  }

  TEST_CASE("CRT decryption fixture") {
    const KeyPair k = KeyPair::from_primes(61, 53, 17);
    const auto crt = pmkrsa::CrtPrivate::from_keypair(k);
    CHECK(crt.d_p == BigUint(53));
    CHECK(crt.d_q == BigUint(49));
    CHECK(crt.q_inv == BigUint(38));
    CHECK((53 * 38) % 61 == 1);
    CHECK(pmkrsa::crt_decrypt(2790, crt, k.n) == BigUint(65));
    CHECK(pmkrsa::crt_decrypt(0, crt, k.n).is_zero());
    CHECK(testing::code_of([&] { pmkrsa::crt_decrypt(3233, crt, k.n); }) == ErrorCode::MessageTooLarge);
    const pmkrsa::CrtDecryptor dec(k);
    for (std::uint64_t c = 0; c < 3233; ++c) REQUIRE(dec.decrypt(c) == pmkrsa::rsa_decrypt(c, k));
  }

  TEST_CASE("CRT decryption equals textbook decryption on random keys") {
    auto rng = testing::seeded(40);
    for (int i = 0; i < 20; ++i) {
      const KeyPair k = pmkrsa::gen_keypair(i % 2 == 0 ? 256 : 512, rng);
      const auto crt = pmkrsa::CrtPrivate::from_keypair(k);
      const pmkrsa::CrtDecryptor dec(k);
      for (int j = 0; j < 10; ++j) {
        const BigUint c = pmkrsa::random_below(rng, k.n);
        const BigUint m = pmkrsa::rsa_decrypt(c, k);
        REQUIRE(pmkrsa::crt_decrypt(c, crt, k.n) == m);
        REQUIRE(dec.decrypt(c) == m);
      }
    }
  }

  TEST_CASE("three-prime toy key") {
    const std::vector<BigUint> primes = {11, 13, 17};
    const auto key = pmkrsa::MultiPrimeKey::from_primes(primes, 7);
    CHECK(key.n == BigUint(2431));
    CHECK(7 * 823 == 3 * 1920 + 1);
    CHECK(key.d == BigUint(823));
    const pmkrsa::MultiPrimeDecryptor dec(key);
    for (std::uint64_t m = 0; m < 2431; ++m) {
      const BigUint c = pmkrsa::mod_pow(m, key.e, key.n);
      REQUIRE(pmkrsa::multiprime_decrypt(c, key) == BigUint(m));
      REQUIRE(dec.decrypt(c) == BigUint(m));
    }
    const std::vector<BigUint> repeated = {11, 11, 13};
    CHECK(testing::code_of([&] { pmkrsa::MultiPrimeKey::from_primes(repeated, 7); }) == ErrorCode::InvalidArgument);
    CHECK(testing::code_of([&] { pmkrsa::multiprime_decrypt(2431, key); }) == ErrorCode::MessageTooLarge);
  }

  TEST_CASE("two primes reduce to CRT decryption") {
    const std::vector<BigUint> primes = {61, 53};
    const auto key = pmkrsa::MultiPrimeKey::from_primes(primes, 17);
    const auto crt = pmkrsa::CrtPrivate::from_keypair(KeyPair::from_primes(61, 53, 17));
    for (std::uint64_t c = 0; c < 3233; c += 7) {
      REQUIRE(pmkrsa::multiprime_decrypt(c, key) == pmkrsa::crt_decrypt(c, crt, 3233));
    }
  }

  TEST_CASE("generated multi-prime keys") {
    auto rng = testing::seeded(41);
    for (std::size_t b : {2U, 3U, 4U}) {
      const auto key = pmkrsa::gen_multiprime(512, b, rng);
      REQUIRE(key.primes.size() == b);
      REQUIRE(key.n.bit_length() == 512);
      BigUint n(1);
      for (const auto& p : key.primes) n *= p;
      REQUIRE(n == key.n);
      const KeyPair as_pair = key.as_keypair();
      for (int i = 0; i < 20; ++i) {
        const BigUint c = pmkrsa::random_below(rng, key.n);
        REQUIRE(pmkrsa::multiprime_decrypt(c, key) == pmkrsa::mod_pow(c, key.d, key.n));
        REQUIRE(pmkrsa::rsa_decrypt(c, as_pair) == pmkrsa::multiprime_decrypt(c, key));
      }
    }
    CHECK(testing::code_of([&] { pmkrsa::gen_multiprime(512, 1, rng); }) == ErrorCode::InvalidArgument);
  }
}
