#include "pmkrsa/rsa_variants.hpp"

#include <algorithm>

#include "pmkrsa/error.hpp"
#include "pmkrsa/primegen.hpp"

namespace pmkrsa {

namespace {

void require_below(const BigUint& value, const BigUint& n) {
  if (value >= n) throw Error(ErrorCode::MessageTooLarge, "value must be below the modulus");
}

// x = sum residues[t] * (M / m_t) * coefficients[t] mod M
BigUint crt_recombine(std::span<const BigUint> residues, std::span<const BigUint> moduli,
                      std::span<const BigUint> coefficients, const BigUint& product) {
  BigUint x;
  for (std::size_t t = 0; t < moduli.size(); ++t) {
    const BigUint partial = product / moduli[t];
    x += mod_mul_plain(residues[t] * coefficients[t], partial, product);
  }
  return x % product;
}

}  // namespace

BigUint rsa_encrypt(const BigUint& m, const KeyPair& key) {
  require_below(m, key.n);
  return mod_pow(m, key.e, key.n);
}

BigUint rsa_decrypt(const BigUint& c, const KeyPair& key) {
  require_below(c, key.n);
  if (!key.has_private()) throw Error(ErrorCode::InvalidArgument, "decryption needs a private key");
  return mod_pow(c, key.d, key.n);
}

BigUint crt_combine(std::span<const BigUint> residues, std::span<const BigUint> moduli) {
  if (residues.size() != moduli.size() || moduli.empty()) {
    throw Error(ErrorCode::InvalidArgument, "crt_combine needs one residue per modulus");
  }
  for (std::size_t t = 0; t < moduli.size(); ++t) {
    if (moduli[t].is_zero() || residues[t] >= moduli[t]) {
      throw Error(ErrorCode::InvalidArgument, "residue must be below a positive modulus");
    }
    for (std::size_t u = t + 1; u < moduli.size(); ++u) {
      if (gcd(moduli[t], moduli[u]) != BigUint(1)) {
        throw Error(ErrorCode::NotCoprime, "moduli " + std::to_string(t) + " and " + std::to_string(u) +
                                               " share a factor");
      }
    }
  }
  if (moduli.size() == 1) return residues[0];
  BigUint product(1);
  for (const auto& m : moduli) product *= m;
  std::vector<BigUint> coefficients;
  coefficients.reserve(moduli.size());
  for (const auto& m : moduli) {
    coefficients.push_back(m == BigUint(1) ? BigUint{} : mod_inv(product / m, m));
  }
  return crt_recombine(residues, moduli, coefficients, product);
}

CrtPrivate CrtPrivate::from_keypair(const KeyPair& key) {
  if (!key.has_private() || key.p.is_zero() || key.q.is_zero()) {
    throw Error(ErrorCode::InvalidArgument, "CRT needs d, p and q");
  }
  CrtPrivate out;
  out.p = key.p;
  out.q = key.q;
  out.d_p = key.d % (key.p - BigUint(1));
  out.d_q = key.d % (key.q - BigUint(1));
  out.q_inv = mod_inv(key.q, key.p);
  return out;
}

namespace {

BigUint crt_finish(const BigUint& m_p, const BigUint& m_q, const CrtPrivate& key) {
  // h = q_inv * (m_p - m_q) mod p, kept non-negative by adding p first
  const BigUint m_q_mod_p = m_q % key.p;
  const BigUint diff = m_p >= m_q_mod_p ? m_p - m_q_mod_p : m_p + key.p - m_q_mod_p;
  const BigUint h = mod_mul_plain(key.q_inv, diff, key.p);
  return m_q + h * key.q;
}

}  // namespace

BigUint crt_decrypt(const BigUint& c, const CrtPrivate& key, const BigUint& n) {
  require_below(c, n);
  const BigUint m_p = mod_pow(c, key.d_p, key.p);
  const BigUint m_q = mod_pow(c, key.d_q, key.q);
  return crt_finish(m_p, m_q, key);
}

CrtDecryptor::CrtDecryptor(const KeyPair& key)
    : n_(key.n), crt_(CrtPrivate::from_keypair(key)), ctx_p_(key.p), ctx_q_(key.q) {}

BigUint CrtDecryptor::decrypt(const BigUint& c) const {
  require_below(c, n_);
  const BigUint m_p = ctx_p_.pow(c, crt_.d_p);
  const BigUint m_q = ctx_q_.pow(c, crt_.d_q);
  return crt_finish(m_p, m_q, crt_);
}

KeyPair MultiPrimeKey::as_keypair() const {
  KeyPair out;
  out.n = n;
  out.e = e;
  out.d = d;
  out.bits = static_cast<std::uint32_t>(n.bit_length());
  return out;
}

MultiPrimeKey MultiPrimeKey::from_primes(std::vector<BigUint> primes, const BigUint& e) {
  if (primes.size() < 2) throw Error(ErrorCode::InvalidArgument, "multi-prime RSA needs b >= 2 primes");
  {
    auto sorted = primes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorCode::InvalidArgument, "primes must be distinct");
    }
  }
  MultiPrimeKey key;
  key.primes = std::move(primes);
  key.e = e;
  key.n = BigUint(1);
  BigUint phi(1);
  for (const auto& p : key.primes) {
    key.n *= p;
    phi *= p - BigUint(1);
  }
  if (e < BigUint(3) || e >= phi || gcd(e, phi) != BigUint(1)) {
    throw Error(ErrorCode::InvalidArgument, "e must lie in [3, phi) and be coprime to phi");
  }
  key.d = mod_inv(e, phi);
  for (const auto& p : key.primes) {
    key.crt_exponents.push_back(key.d % (p - BigUint(1)));
    key.crt_coefficients.push_back(mod_inv(key.n / p, p));
  }
  return key;
}

MultiPrimeKey gen_multiprime(std::uint32_t bits, std::size_t b, RandomSource& rng, const BigUint& e) {
  if (b < 2) throw Error(ErrorCode::InvalidArgument, "multi-prime RSA needs b >= 2 primes");
  const std::size_t each = bits / b;
  const std::size_t last = bits - each * (b - 1);
  if (each < 8) throw Error(ErrorCode::InvalidArgument, "primes would be shorter than 8 bits");
  for (;;) {
    std::vector<BigUint> primes;
    for (std::size_t t = 0; t + 1 < b; ++t) primes.push_back(gen_prime(each, rng));
    primes.push_back(gen_prime(last, rng));
    BigUint n(1);
    BigUint phi(1);
    for (const auto& p : primes) {
      n *= p;
      phi *= p - BigUint(1);
    }
    if (n.bit_length() != bits) continue;
    if (e >= phi || gcd(e, phi) != BigUint(1)) continue;
    auto sorted = primes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
    return MultiPrimeKey::from_primes(std::move(primes), e);
  }
}

BigUint multiprime_decrypt(const BigUint& c, const MultiPrimeKey& key) {
  require_below(c, key.n);
  std::vector<BigUint> residues;
  residues.reserve(key.primes.size());
  for (std::size_t t = 0; t < key.primes.size(); ++t) {
    residues.push_back(mod_pow(c, key.crt_exponents[t], key.primes[t]));
  }
  return crt_recombine(residues, key.primes, key.crt_coefficients, key.n);
}

MultiPrimeDecryptor::MultiPrimeDecryptor(MultiPrimeKey key) : key_(std::move(key)) {
  contexts_.reserve(key_.primes.size());
  for (const auto& p : key_.primes) contexts_.emplace_back(p);
}

BigUint MultiPrimeDecryptor::decrypt(const BigUint& c) const {
  require_below(c, key_.n);
  std::vector<BigUint> residues;
  residues.reserve(contexts_.size());
  for (std::size_t t = 0; t < contexts_.size(); ++t) residues.push_back(contexts_[t].pow(c, key_.crt_exponents[t]));
  return crt_recombine(residues, key_.primes, key_.crt_coefficients, key_.n);
}

}  // namespace pmkrsa
