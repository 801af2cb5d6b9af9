#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pmkrsa/biguint.hpp"
#include "pmkrsa/parallel.hpp"
#include "pmkrsa/random.hpp"

namespace pmkrsa {

inline const BigUint kDefaultPublicExponent{65537};

/// One RSA key pair. Public-only pairs leave d, p and q at zero.
struct KeyPair {
  BigUint n;
  BigUint e;
  BigUint d;
  BigUint p;
  BigUint q;
  std::uint32_t bits = 0;

  bool has_private() const noexcept { return !d.is_zero(); }
  BigUint phi() const;  // (p-1)(q-1); private pairs only
  KeyPair public_part() const;

  /// Builds a pair from two distinct primes. bits = bit_length(p*q).
  /// Throws InvalidArgument when p == q or gcd(e, phi) != 1.
  static KeyPair from_primes(const BigUint& p, const BigUint& q, const BigUint& e);

  friend bool operator==(const KeyPair&, const KeyPair&) = default;
};

/// The i key pairs used for the i rows of a chunk grid.
struct KeyBundle {
  std::uint32_t bits = 0;
  std::vector<KeyPair> rows;

  bool is_private() const noexcept;
  KeyBundle public_part() const;
  /// Checks the shared invariants (row count, common bit length, distinct
  /// moduli, per-row consistency). Throws MalformedKeyFile.
  void validate() const;

  friend bool operator==(const KeyBundle&, const KeyBundle&) = default;
};

struct KeygenOptions {
  /// Public exponent; unset picks 65537, or the smallest odd e >= 3 coprime
  /// to phi when 65537 does not fit below phi (toy key sizes).
  std::optional<BigUint> e;
  ParallelConfig parallel;
};

/// Requires bits >= 16 and even.
KeyPair gen_keypair(std::uint32_t bits, RandomSource& rng, const KeygenOptions& options = {});

/// `rows` independent pairs. Row a draws from rng.split(a), so seeded output
/// does not depend on the worker count. A modulus equal to an earlier row's
/// is regenerated from the same row stream.
KeyBundle gen_bundle(std::size_t rows, std::uint32_t bits, RandomSource& rng, const KeygenOptions& options = {});

// Key file: "PMKK" | version u8 | kind u8 (0 public, 1 private) | bits u32 BE |
// rows u16 BE | per row, u32 BE length + big-endian magnitude for e, N and,
// for private files, d, p, q.
inline constexpr std::uint8_t kKeyFileVersion = 1;

std::vector<std::uint8_t> serialize_public(const KeyBundle& bundle);
/// Throws InvalidArgument for a public-only bundle.
std::vector<std::uint8_t> serialize_private(const KeyBundle& bundle);
/// Parses either kind. Throws MalformedKeyFile.
KeyBundle parse_bundle(std::span<const std::uint8_t> bytes);

/// First 16 hex chars of SHA-256 over the modulus bytes.
std::string modulus_fingerprint(const BigUint& n);

namespace detail {

/// Retry loop of gen_keypair with an injectable prime stream.
KeyPair keypair_from_prime_stream(std::uint32_t bits, const std::optional<BigUint>& e,
                                  const std::function<BigUint()>& next_prime);

}  // namespace detail

}  // namespace pmkrsa
