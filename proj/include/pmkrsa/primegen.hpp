#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "pmkrsa/biguint.hpp"
#include "pmkrsa/random.hpp"

namespace pmkrsa {

enum class Primality { ProbablePrime, Composite };

inline constexpr unsigned kDefaultMillerRabinRounds = 64;

/// Odd primes below 2^16, ascending.
std::span<const std::uint32_t> small_primes();

/// Values below 2^16 are decided exactly by trial division. Larger values are
/// trial-divided by the small primes, then tested with `rounds` random bases;
/// Composite is always correct.
Primality miller_rabin(const BigUint& n, unsigned rounds, RandomSource& rng);

/// Probable prime of exactly `bits` bits with the top two bits set, so the
/// product of two such primes has exactly 2*bits bits. Requires bits >= 8.
BigUint gen_prime(std::size_t bits, RandomSource& rng);

}  // namespace pmkrsa
