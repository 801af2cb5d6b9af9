#pragma once

#include <cstddef>
#include <vector>

#include "pmkrsa/biguint.hpp"

// Modular arithmetic kernels.
//
// None of this is constant-time. It exists to study the performance of
// multi-key RSA and must not guard real secrets.

namespace pmkrsa {

BigUint gcd(BigUint a, BigUint b);

/// x in [1, modulus) with a*x = 1 (mod modulus).
/// Throws NotInvertible if gcd(a, modulus) != 1, InvalidArgument if modulus < 2.
BigUint mod_inv(const BigUint& a, const BigUint& modulus);

/// (a*b) mod modulus by full multiply then long division. Throws ZeroModulus.
BigUint mod_mul_plain(const BigUint& a, const BigUint& b, const BigUint& modulus);

/// Precomputed Montgomery state for one odd modulus N > 2.
///
/// r = 2^k with k a multiple of 64 covering bit_length(N) unless an explicit
/// k is requested. n_prime = -N^-1 mod r, r2 = r^2 mod N.
/// Immutable after construction, safe to share across threads.
class MontgomeryContext {
 public:
  /// Throws EvenModulus for even N, InvalidArgument for N <= 2.
  explicit MontgomeryContext(const BigUint& modulus);
  /// Explicit r = 2^r_bits; requires 2^r_bits > N. Non-limb-aligned widths
  /// take the generic full-width reduction path.
  MontgomeryContext(const BigUint& modulus, std::size_t r_bits);

  const BigUint& modulus() const noexcept { return modulus_; }
  std::size_t r_bits() const noexcept { return r_bits_; }
  const BigUint& n_prime() const noexcept { return n_prime_; }
  const BigUint& r2() const noexcept { return r2_; }
  /// Montgomery form of 1, i.e. r mod N.
  const BigUint& one() const noexcept { return one_; }

  /// a_hat * b_hat * r^-1 mod N. Inputs must be < N; output is < N.
  BigUint multiply(const BigUint& a_hat, const BigUint& b_hat) const;
  BigUint to_montgomery(const BigUint& x) const;
  BigUint from_montgomery(const BigUint& x_hat) const;

  /// x^e mod N by right-to-left binary square-and-multiply in Montgomery
  /// form. x may be any size; it is reduced first.
  BigUint pow(const BigUint& x, const BigUint& e) const;

 private:
  BigUint redc_generic(const BigUint& t) const;
  // Montgomery product and square over words_ limbs. scratch holds
  // 2 * words_ + 1 limbs.
  void mul_words(const BigUint::Limb* a, const BigUint::Limb* b, BigUint::Limb* out,
                 BigUint::Limb* scratch) const;
  void sqr_words(const BigUint::Limb* a, BigUint::Limb* out, BigUint::Limb* scratch) const;
  void reduce_words(BigUint::Limb* t, BigUint::Limb* out) const;
  BigUint from_words(const std::vector<BigUint::Limb>& words) const;
  std::vector<BigUint::Limb> to_words(const BigUint& x) const;

  BigUint modulus_;
  std::size_t r_bits_ = 0;
  BigUint n_prime_;
  BigUint r2_;
  BigUint one_;
  bool aligned_ = false;
  std::size_t words_ = 0;
  BigUint::Limb n0_ = 0;  // n_prime mod 2^64
  std::vector<BigUint::Limb> n_words_;
};

/// x^e mod modulus. Odd moduli use Montgomery; even moduli fall back to
/// plain multiply-and-reduce. Throws ZeroModulus when modulus < 2.
BigUint mod_pow(const BigUint& x, const BigUint& e, const BigUint& modulus);

namespace detail {

/// Full-width REDC exactly as written: m = ((t mod r) * n') mod r,
/// (t + m*N) / r, one conditional subtraction. Requires t < N*r.
BigUint redc_reference(const MontgomeryContext& ctx, const BigUint& t);

}  // namespace detail

}  // namespace pmkrsa
