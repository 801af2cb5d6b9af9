#include "pmkrsa/primegen.hpp"

#include <vector>

#include "pmkrsa/error.hpp"
#include "pmkrsa/modmath.hpp"

namespace pmkrsa {

namespace {

constexpr std::uint32_t kSmallLimit = 1U << 16;
// Sieve window before drawing a fresh random start.
constexpr std::uint32_t kSieveSteps = 1U << 14;

std::vector<std::uint32_t> build_small_primes() {
  std::vector<bool> composite(kSmallLimit, false);
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 2; i < kSmallLimit; ++i) {
    if (composite[i]) continue;
    if (i != 2) out.push_back(i);
    for (std::uint64_t j = static_cast<std::uint64_t>(i) * i; j < kSmallLimit; j += i) composite[j] = true;
  }
  return out;
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

// Strong-probable-prime rounds only; n odd and > 2^16.
Primality strong_probable_prime(const BigUint& n, unsigned rounds, RandomSource& rng) {
  const BigUint n_minus_1 = n - BigUint(1);
  std::size_t s = 0;
  while (!n_minus_1.test_bit(s)) ++s;
  const BigUint d = n_minus_1 >> s;

  const MontgomeryContext ctx(n);
  const BigUint minus_one_hat = ctx.to_montgomery(n_minus_1);
  const BigUint two(2);
  for (unsigned round = 0; round < rounds; ++round) {
    const BigUint a = random_range(rng, two, n_minus_1);
    const BigUint x = ctx.pow(a, d);
    if (x == BigUint(1) || x == n_minus_1) continue;
    BigUint xh = ctx.to_montgomery(x);
    bool witness = true;
    for (std::size_t i = 1; i < s; ++i) {
      xh = ctx.multiply(xh, xh);
      if (xh == minus_one_hat) {
        witness = false;
        break;
      }
      if (xh == ctx.one()) break;
    }
    if (witness) return Primality::Composite;
  }
  return Primality::ProbablePrime;
}

}  // namespace

std::span<const std::uint32_t> small_primes() {
  static const std::vector<std::uint32_t> primes = build_small_primes();
  return primes;
}

Primality miller_rabin(const BigUint& n, unsigned rounds, RandomSource& rng) {
  if (n.bit_length() <= 16) {
    return is_prime_u64(n.low_u64()) ? Primality::ProbablePrime : Primality::Composite;
  }
  if (n.is_even()) return Primality::Composite;
  for (const std::uint32_t p : small_primes()) {
    if (n.mod_u32(p) == 0) return Primality::Composite;
  }
  return strong_probable_prime(n, rounds, rng);
}

BigUint gen_prime(std::size_t bits, RandomSource& rng) {
  if (bits < 8) throw Error(ErrorCode::InvalidArgument, "prime size must be at least 8 bits");
  const BigUint top_two = BigUint(3) << (bits - 2);

  if (bits <= 32) {
    for (;;) {
      BigUint candidate = random_bits(rng, bits);
      candidate = BigUint::from_limbs(std::vector<BigUint::Limb>{candidate.low_u64() | top_two.low_u64() | 1U});
      if (miller_rabin(candidate, kDefaultMillerRabinRounds, rng) == Primality::ProbablePrime) return candidate;
    }
  }

  const auto primes = small_primes();
  std::vector<std::uint32_t> residues(primes.size());
  for (;;) {
    BigUint base = random_bits(rng, bits - 2) + top_two;
    if (base.is_even()) base += BigUint(1);

    for (std::size_t i = 0; i < primes.size(); ++i) residues[i] = base.mod_u32(primes[i]);

    for (std::uint32_t step = 0; step < kSieveSteps; ++step) {
      const std::uint32_t delta = 2 * step;
      bool survives = true;
      for (std::size_t i = 0; i < primes.size(); ++i) {
        if ((residues[i] + delta) % primes[i] == 0) {
          survives = false;
          break;
        }
      }
      if (!survives) continue;
      BigUint candidate = base + BigUint(delta);
      if (candidate.bit_length() != bits || !candidate.test_bit(bits - 2)) break;
      if (strong_probable_prime(candidate, kDefaultMillerRabinRounds, rng) == Primality::ProbablePrime) {
        return candidate;
      }
    }
  }
}

}  // namespace pmkrsa
