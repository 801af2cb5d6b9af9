#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pmkrsa/biguint.hpp"
#include "pmkrsa/keystore.hpp"
#include "pmkrsa/modmath.hpp"
#include "pmkrsa/random.hpp"

// Single-key baselines: textbook RSA, CRT decryption and multi-prime RSA.

namespace pmkrsa {

/// m^e mod N. Throws MessageTooLarge when m >= N.
BigUint rsa_encrypt(const BigUint& m, const KeyPair& key);
/// c^d mod N. Throws MessageTooLarge when c >= N.
BigUint rsa_decrypt(const BigUint& c, const KeyPair& key);

/// Unique x below the product of `moduli` with x = residues[t] mod moduli[t].
/// Throws NotCoprime if two moduli share a factor, InvalidArgument on size
/// mismatch or a residue not reduced below its modulus.
BigUint crt_combine(std::span<const BigUint> residues, std::span<const BigUint> moduli);

struct CrtPrivate {
  BigUint p;
  BigUint q;
  BigUint d_p;    // d mod (p-1)
  BigUint d_q;    // d mod (q-1)
  BigUint q_inv;  // q^-1 mod p

  static CrtPrivate from_keypair(const KeyPair& key);
};

/// m_p = c^d_p mod p, m_q = c^d_q mod q, h = q_inv (m_p - m_q) mod p,
/// m = m_q + h q. Throws MessageTooLarge when c >= n.
BigUint crt_decrypt(const BigUint& c, const CrtPrivate& key, const BigUint& n);

/// CRT decryption with prebuilt Montgomery contexts for p and q.
class CrtDecryptor {
 public:
  explicit CrtDecryptor(const KeyPair& key);

  BigUint decrypt(const BigUint& c) const;
  const BigUint& modulus() const noexcept { return n_; }

 private:
  BigUint n_;
  CrtPrivate crt_;
  MontgomeryContext ctx_p_;
  MontgomeryContext ctx_q_;
};

/// RSA over b >= 2 distinct primes.
struct MultiPrimeKey {
  std::vector<BigUint> primes;
  BigUint n;
  BigUint e;
  BigUint d;                               // e^-1 mod prod(p_t - 1)
  std::vector<BigUint> crt_exponents;      // d mod (p_t - 1)
  std::vector<BigUint> crt_coefficients;   // (n / p_t)^-1 mod p_t

  KeyPair as_keypair() const;  // n, e, d only

  /// Throws InvalidArgument on fewer than two or repeated primes, or an
  /// exponent not coprime to phi.
  static MultiPrimeKey from_primes(std::vector<BigUint> primes, const BigUint& e);
};

/// b primes of floor(bits/b) bits, the last one taking the remaining bits,
/// regenerated until the product has exactly `bits` bits.
MultiPrimeKey gen_multiprime(std::uint32_t bits, std::size_t b, RandomSource& rng,
                             const BigUint& e = kDefaultPublicExponent);

/// Per-prime exponentiations c^(d mod (p_t-1)) mod p_t, recombined by CRT.
/// Throws MessageTooLarge when c >= n.
BigUint multiprime_decrypt(const BigUint& c, const MultiPrimeKey& key);

/// multiprime_decrypt with one prebuilt Montgomery context per prime.
class MultiPrimeDecryptor {
 public:
  explicit MultiPrimeDecryptor(MultiPrimeKey key);

  BigUint decrypt(const BigUint& c) const;
  const MultiPrimeKey& key() const noexcept { return key_; }

 private:
  MultiPrimeKey key_;
  std::vector<MontgomeryContext> contexts_;
};

}  // namespace pmkrsa
