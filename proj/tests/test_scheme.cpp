#include <doctest.h>

#include <set>

#include "pmkrsa/keystore.hpp"
#include "pmkrsa/modmath.hpp"
#include "pmkrsa/scheme.hpp"
#include "support.hpp"

using pmkrsa::BigUint;
using pmkrsa::CipherPack;
using pmkrsa::DecryptOptions;
using pmkrsa::ErrorCode;
using pmkrsa::Exponentiation;
using pmkrsa::KeyBundle;
using pmkrsa::KeyPair;

namespace {

KeyBundle toy_bundle() {
  KeyPair k = KeyPair::from_primes(61, 53, 17);
  return KeyBundle{k.bits, {k}};
}

std::vector<std::uint8_t> random_bytes(pmkrsa::RandomSource& rng, std::size_t n) {
  std::vector<std::uint8_t> out(n);
  rng.fill(out);
  return out;
}

const KeyBundle& bundle_512x4() {
  static const KeyBundle bundle = [] {
    auto rng = testing::seeded(50);
    return pmkrsa::gen_bundle(4, 512, rng);
  }();
  return bundle;
}

}  // namespace

TEST_SUITE("scheme") {
  TEST_CASE("payload sizing") {
    CHECK(pmkrsa::payload_bytes(2048) == 127);
    CHECK(pmkrsa::payload_bytes(512) == 31);
    CHECK(pmkrsa::payload_bytes(32) == 1);
    CHECK(testing::code_of([] { pmkrsa::payload_bytes(31); }) == ErrorCode::InvalidArgument);
    CHECK(pmkrsa::row_of(0, 4) == 0);
    CHECK(pmkrsa::row_of(6, 4) == 2);
  }

  TEST_CASE("chunking a 300-byte message over four 2048-bit rows") {
    KeyBundle bundle;
    bundle.bits = 2048;
    bundle.rows.resize(4);
    std::vector<std::uint8_t> message(300);
    for (std::size_t i = 0; i < message.size(); ++i) message[i] = static_cast<std::uint8_t>(i * 7 + 1);
    const auto grid = pmkrsa::chunk(message, bundle);
    CHECK(grid.payload_bytes == 127);
    CHECK(grid.k() == 3);
    CHECK(grid.cols() == 1);
    CHECK(grid.rows * grid.cols() >= grid.k());
    CHECK(grid.total_len == 300);
    const std::size_t sizes[] = {127, 127, 46};
    std::size_t offset = 0;
    for (std::size_t t = 0; t < 3; ++t) {
      std::vector<std::uint8_t> expected = {0x01};
      expected.insert(expected.end(), message.begin() + static_cast<std::ptrdiff_t>(offset),
                      message.begin() + static_cast<std::ptrdiff_t>(offset + sizes[t]));
      CHECK(grid.cells[t].to_bytes_be() == expected);
      CHECK(pmkrsa::row_of(t, grid.rows) == t);
      offset += sizes[t];
    }
  }

  TEST_CASE("chunking edge cases") {
    KeyBundle bundle;
    bundle.bits = 2048;
    bundle.rows.resize(1);
    const auto empty = pmkrsa::chunk({}, bundle);
    CHECK(empty.k() == 0);
    CHECK(empty.total_len == 0);
    const std::vector<std::uint8_t> full(127, 0xff);
    const auto one = pmkrsa::chunk(full, bundle);
    CHECK(one.k() == 1);
    CHECK(one.cells[0].bit_length() == 1017);  // 0x01 followed by 127 bytes
    CHECK(one.cells[0] < BigUint::power_of_two(1024));
    const std::vector<std::uint8_t> zeros(128, 0);
    const auto zero_cells = pmkrsa::chunk(zeros, bundle);
    CHECK(zero_cells.k() == 2);
    CHECK(zero_cells.cells[1] == BigUint(256));  // 0x01 0x00
    for (const auto& c : zero_cells.cells) CHECK_FALSE(c.is_zero());
  }

  TEST_CASE("hand-traced single-cell fixture") {
    const KeyBundle bundle = toy_bundle();
    pmkrsa::ChunkGrid grid;
    grid.cells = {65};
    grid.rows = 1;
    const CipherPack pack = pmkrsa::encrypt_with_blinds(grid, {{2}}, bundle);
    CHECK(pack.c_star[0] == BigUint(3017));
    CHECK(pack.c_r[0] == BigUint(1752));
    CHECK(pmkrsa::mod_pow(130, 17, 3233) == BigUint(3017));
    CHECK(pmkrsa::mod_pow(2, 17, 3233) == BigUint(1752));
    for (auto mode : {Exponentiation::Crt, Exponentiation::Direct}) {
      DecryptOptions options;
      options.exponentiation = mode;
      CHECK(pmkrsa::recover_blinds(pack, bundle, options)[0] == BigUint(2));
      CHECK(pmkrsa::decrypt_cells(pack, bundle, options)[0] == BigUint(65));
    }
    // m* = 130, r' = 2, r'^-1 = 1617, 130 * 1617 mod 3233 = 65
    CHECK((130 * 1617) % 3233 == 65);
  }

  TEST_CASE("unit message encrypts to the encrypted blind") {
    const KeyBundle bundle = toy_bundle();
    pmkrsa::ChunkGrid grid;
    grid.cells = {1};
    grid.rows = 1;
    const CipherPack pack = pmkrsa::encrypt_with_blinds(grid, {{1234}}, bundle);
    CHECK(pack.c_star[0] == pack.c_r[0]);
    CHECK(pmkrsa::decrypt_cells(pack, bundle)[0] == BigUint(1));
  }

  TEST_CASE("blinds") {
    const KeyBundle bundle = toy_bundle();
    auto rng = testing::seeded(51);
    pmkrsa::ChunkGrid empty;
    empty.rows = 1;
    CHECK(pmkrsa::gen_blind(empty, bundle, rng).r.empty());
    pmkrsa::ChunkGrid grid;
    grid.rows = 1;
    grid.cells.assign(2000, BigUint(5));
    const auto blinds = pmkrsa::gen_blind(grid, bundle, rng);
    for (const auto& r : blinds.r) {
      REQUIRE(r >= BigUint(2));
      REQUIRE(r < BigUint(3233));
      REQUIRE(r.mod_u32(61) != 0);
      REQUIRE(r.mod_u32(53) != 0);
    }
    auto a = testing::seeded(52);
    auto b = testing::seeded(52);
    CHECK(pmkrsa::gen_blind(grid, bundle, a).r == pmkrsa::gen_blind(grid, bundle, b).r);
  }

  TEST_CASE("round trips over sizes, row counts and worker counts") {
    auto rng = testing::seeded(53);
    const KeyBundle& bundle = bundle_512x4();
    for (std::size_t len : {0U, 1U, 30U, 31U, 32U, 123U, 124U, 125U, 1000U, 4096U}) {
      const auto message = random_bytes(rng, len);
      for (unsigned workers : {1U, 3U}) {
        pmkrsa::ParallelConfig parallel{workers, 1};
        const CipherPack pack = pmkrsa::encrypt(message, bundle.public_part(), rng, parallel);
        CHECK(pack.k() == (len + 30) / 31);
        DecryptOptions options;
        options.parallel = parallel;
        REQUIRE(pmkrsa::decrypt(pack, bundle, options) == message);
        options.exponentiation = Exponentiation::Direct;
        REQUIRE(pmkrsa::decrypt(pack, bundle, options) == message);
      }
    }
    auto single_rng = testing::seeded(54);
    const KeyBundle single = pmkrsa::gen_bundle(1, 1024, single_rng);
    const auto message = random_bytes(rng, 3000);
    CHECK(pmkrsa::decrypt(pmkrsa::encrypt(message, single, rng), single) == message);
  }

  TEST_CASE("ciphertexts are independent of the worker count") {
    const KeyBundle& bundle = bundle_512x4();
    auto rng = testing::seeded(55);
    const auto message = random_bytes(rng, 2000);
    const auto grid = pmkrsa::chunk(message, bundle);
    const auto blinds = pmkrsa::gen_blind(grid, bundle, rng);
    const CipherPack one = pmkrsa::encrypt_with_blinds(grid, blinds, bundle, {1, 1});
    CHECK(pmkrsa::encrypt_with_blinds(grid, blinds, bundle, {4, 3}) == one);
    CHECK(pmkrsa::recover_blinds(one, bundle) == blinds.r);
  }

  TEST_CASE("encryption is randomized") {
    const KeyBundle& bundle = bundle_512x4();
    pmkrsa::OsEntropy os;
    const std::vector<std::uint8_t> message(200, 0x41);
    const CipherPack a = pmkrsa::encrypt(message, bundle, os);
    const CipherPack b = pmkrsa::encrypt(message, bundle, os);
    REQUIRE(a.k() == b.k());
    for (std::size_t t = 0; t < a.k(); ++t) CHECK(a.c_star[t] != b.c_star[t]);
  }

  TEST_CASE("single- and double-exponentiation forms agree") {
    auto rng = testing::seeded(56);
    const KeyPair& k = bundle_512x4().rows[0];
    for (int i = 0; i < 1000; ++i) {
      const BigUint m = pmkrsa::random_below(rng, k.n);
      const BigUint r = pmkrsa::random_below(rng, k.n);
      const BigUint lhs = pmkrsa::mod_pow(pmkrsa::mod_mul_plain(m, r, k.n), k.e, k.n);
      const BigUint rhs = pmkrsa::mod_mul_plain(pmkrsa::mod_pow(m, k.e, k.n), pmkrsa::mod_pow(r, k.e, k.n), k.n);
      REQUIRE(lhs == rhs);
    }
  }

  TEST_CASE("decrypt error paths") {
    const KeyBundle& bundle = bundle_512x4();
    auto rng = testing::seeded(57);
    const auto message = random_bytes(rng, 500);
    const CipherPack pack = pmkrsa::encrypt(message, bundle, rng);

    CHECK(testing::code_of([&] { pmkrsa::decrypt(pack, bundle.public_part()); }) == ErrorCode::InvalidArgument);

    CipherPack wrong_bits = pack;
    wrong_bits.layout.bits = 1024;
    CHECK(testing::code_of([&] { pmkrsa::decrypt(wrong_bits, bundle); }) == ErrorCode::LayoutMismatch);
    CipherPack wrong_rows = pack;
    wrong_rows.layout.rows = 3;
    CHECK(testing::code_of([&] { pmkrsa::decrypt(wrong_rows, bundle); }) == ErrorCode::LayoutMismatch);
    CipherPack wrong_len = pack;
    wrong_len.layout.total_len = 5000;
    CHECK(testing::code_of([&] { pmkrsa::decrypt(wrong_len, bundle); }) == ErrorCode::LayoutMismatch);
    CipherPack short_tail = pack;
    short_tail.layout.total_len = 499;
    CHECK(testing::code_of([&] { pmkrsa::decrypt(short_tail, bundle); }) == ErrorCode::SentinelViolation);
    CipherPack too_large = pack;
    too_large.c_star[2] = bundle.rows[2].n;
    CHECK(testing::code_of([&] { pmkrsa::decrypt(too_large, bundle); }) == ErrorCode::MessageTooLarge);
    CipherPack shared = pack;
    shared.c_r[1] = pmkrsa::mod_pow(bundle.rows[1].p, bundle.rows[1].e, bundle.rows[1].n);
    CHECK(testing::code_of([&] { pmkrsa::decrypt(shared, bundle); }) == ErrorCode::NotInvertible);

    auto other_rng = testing::seeded(58);
    const KeyBundle other = pmkrsa::gen_bundle(4, 512, other_rng);
    const auto code = testing::code_of([&] { pmkrsa::decrypt(pack, other); });
    CHECK((code == ErrorCode::SentinelViolation || code == ErrorCode::MessageTooLarge));

    CipherPack empty;
    empty.layout = {512, 4, 0};
    CHECK(pmkrsa::decrypt(empty, bundle).empty());
  }

  TEST_CASE("bit flips in c_r never crash") {
    const KeyBundle& bundle = bundle_512x4();
    auto rng = testing::seeded(59);
    const auto message = random_bytes(rng, 200);
    const CipherPack pack = pmkrsa::encrypt(message, bundle, rng);
    for (std::size_t bit = 0; bit < 500; bit += 7) {
      CipherPack flipped = pack;
      const std::size_t cell = bit % pack.k();
      flipped.c_r[cell] = pack.c_r[cell] + BigUint::power_of_two(bit % 400);
      try {
        const auto out = pmkrsa::decrypt(flipped, bundle);
        CHECK(out != message);
      } catch (const pmkrsa::Error& e) {
        const auto code = e.code();
        CHECK((code == ErrorCode::SentinelViolation || code == ErrorCode::NotInvertible ||
               code == ErrorCode::MessageTooLarge));
      }
    }
  }
}
