#include "pmkrsa/modmath.hpp"

#include <algorithm>
#include <bit>
#include <type_traits>
#include <utility>

#include "pmkrsa/error.hpp"

#if PMKRSA_HAVE_GMP
#include <gmp.h>
#endif

namespace pmkrsa {

namespace {

using Limb = BigUint::Limb;
__extension__ typedef unsigned __int128 Wide;

#if PMKRSA_HAVE_GMP
static_assert(std::is_same_v<mp_limb_t, Limb>, "GMP limbs must be 64-bit unsigned long");
#endif

// t[0..s) += m * n[0..s); returns the carry-out limb.
Limb addmul_row(Limb* t, const Limb* n, std::size_t s, Limb m) {
#if PMKRSA_HAVE_GMP
  return mpn_addmul_1(t, n, static_cast<mp_size_t>(s), m);
#else
  Limb c = 0;
  for (std::size_t j = 0; j < s; ++j) {
    const Wide cur = static_cast<Wide>(m) * n[j] + t[j] + c;
    t[j] = static_cast<Limb>(cur);
    c = static_cast<Limb>(cur >> 64);
  }
  return c;
#endif
}

struct Signed {
  BigUint mag;
  bool negative = false;
};

Signed signed_sub(const Signed& a, const Signed& b) {
  // a - b == a + (-b)
  const bool b_neg = !b.negative;
  if (a.negative == b_neg) return {a.mag + b.mag, a.negative};
  if (a.mag >= b.mag) return {a.mag - b.mag, a.negative};
  return {b.mag - a.mag, b_neg};
}

// out = t - n over `len` limbs; returns the final borrow.
Limb sub_words(const Limb* t, const Limb* n, Limb* out, std::size_t len) {
  Limb borrow = 0;
  for (std::size_t i = 0; i < len; ++i) {
    const Limb d = t[i] - n[i] - borrow;
    borrow = (t[i] < n[i] || (t[i] == n[i] && borrow != 0)) ? 1 : 0;
    out[i] = d;
  }
  return borrow;
}

bool geq_words(const Limb* a, const Limb* b, std::size_t len) {
  for (std::size_t i = len; i-- > 0;) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return true;
}

std::vector<Limb> padded(const BigUint& x, std::size_t width) {
  std::vector<Limb> out(width, 0);
  const auto limbs = x.limbs();
  std::copy(limbs.begin(), limbs.end(), out.begin());
  return out;
}

bool is_zero_words(const std::vector<Limb>& x) {
  return std::all_of(x.begin(), x.end(), [](Limb l) { return l == 0; });
}

bool is_one_words(const std::vector<Limb>& x) {
  if (x.empty() || x[0] != 1) return false;
  return std::all_of(x.begin() + 1, x.end(), [](Limb l) { return l == 0; });
}

int cmp_words(const std::vector<Limb>& a, const std::vector<Limb>& b) {
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] > b[i] ? 1 : -1;
  }
  return 0;
}

std::size_t trailing_zeros(const std::vector<Limb>& x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0) return i * 64 + static_cast<std::size_t>(std::countr_zero(x[i]));
  }
  return 0;
}

void shr_words(std::vector<Limb>& x, std::size_t bits) {
  if (bits == 0) return;
  const std::size_t limb_shift = bits / 64;
  const unsigned bit_shift = bits % 64;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = i + limb_shift;
    Limb v = src < n ? x[src] >> bit_shift : 0;
    if (bit_shift != 0 && src + 1 < n) v |= x[src + 1] << (64 - bit_shift);
    x[i] = v;
  }
}

Limb add_words(const Limb* a, const Limb* b, Limb* out, std::size_t len) {
  Limb carry = 0;
  for (std::size_t i = 0; i < len; ++i) {
    const Wide sum = static_cast<Wide>(a[i]) + b[i] + carry;
    out[i] = static_cast<Limb>(sum);
    carry = static_cast<Limb>(sum >> 64);
  }
  return carry;
}

// x * 2^-bits mod m for x < m, m odd; x has one spare limb. minv is
// -m^-1 mod 2^64. Each step adds the multiple of m that clears the low
// bits, then shifts them out.
void divide_pow2_mod(std::vector<Limb>& x, std::size_t bits, const std::vector<Limb>& m, Limb minv) {
  const std::size_t len = x.size();
  while (bits > 0) {
    const unsigned step = static_cast<unsigned>(std::min<std::size_t>(bits, 63));
    const Limb q = (x[0] * minv) & ((Limb{1} << step) - 1);
    if (q != 0) {
      Limb carry = 0;
      for (std::size_t i = 0; i < len; ++i) {
        const Wide cur = static_cast<Wide>(q) * m[i] + x[i] + carry;
        x[i] = static_cast<Limb>(cur);
        carry = static_cast<Limb>(cur >> 64);
      }
    }
    shr_words(x, step);
    bits -= step;
  }
}

// x = x - y mod m for x, y < m.
void sub_mod(std::vector<Limb>& x, const std::vector<Limb>& y, const std::vector<Limb>& m) {
  if (sub_words(x.data(), y.data(), x.data(), x.size()) != 0) add_words(x.data(), m.data(), x.data(), x.size());
}

// Binary extended Euclid for odd m, a already reduced below m.
BigUint mod_inv_odd(const BigUint& a, const BigUint& m) {
  if (a.is_zero()) throw Error(ErrorCode::NotInvertible, "zero is not invertible");
  const std::size_t width = m.limb_count() + 1;
  auto u = padded(a, width);
  auto v = padded(m, width);
  const auto mod = padded(m, width);
  Limb minv = mod[0];
  for (int i = 0; i < 5; ++i) minv *= 2 - mod[0] * minv;
  minv = Limb{0} - minv;
  std::vector<Limb> x1(width, 0);
  std::vector<Limb> x2(width, 0);
  x1[0] = 1;
  while (!is_one_words(u) && !is_one_words(v)) {
    if (is_zero_words(u) || is_zero_words(v)) {
      throw Error(ErrorCode::NotInvertible, "value is not invertible modulo N");
    }
    if (const std::size_t tz = trailing_zeros(u); tz != 0) {
      shr_words(u, tz);
      divide_pow2_mod(x1, tz, mod, minv);
    }
    if (const std::size_t tz = trailing_zeros(v); tz != 0) {
      shr_words(v, tz);
      divide_pow2_mod(x2, tz, mod, minv);
    }
    if (cmp_words(u, v) >= 0) {
      sub_words(u.data(), v.data(), u.data(), width);
      sub_mod(x1, x2, mod);
    } else {
      sub_words(v.data(), u.data(), v.data(), width);
      sub_mod(x2, x1, mod);
    }
  }
  return BigUint::from_limbs(is_one_words(u) ? std::move(x1) : std::move(x2));
}

// N^-1 mod 2^bits for odd N by Newton/Hensel lifting.
BigUint inverse_mod_pow2(const BigUint& n, std::size_t bits) {
  Limb x = n.low_u64();  // correct to 3 bits: n*n = 1 mod 8
  for (int i = 0; i < 5; ++i) x *= 2 - n.low_u64() * x;
  BigUint inv(x);
  for (std::size_t precision = 64; precision < bits;) {
    precision = std::min(bits, precision * 2);
    const BigUint t = (n.low_bits(precision) * inv).low_bits(precision);
    const BigUint correction = (BigUint::power_of_two(precision) + BigUint(2) - t).low_bits(precision);
    inv = (inv * correction).low_bits(precision);
  }
  return inv.low_bits(bits);
}

}  // namespace

BigUint gcd(BigUint a, BigUint b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const std::size_t width = std::max(a.limb_count(), b.limb_count());
  auto u = padded(a, width);
  auto v = padded(b, width);
  const std::size_t tu = trailing_zeros(u);
  const std::size_t tv = trailing_zeros(v);
  const std::size_t common = std::min(tu, tv);
  shr_words(u, tu);
  for (;;) {
    shr_words(v, trailing_zeros(v));
    if (cmp_words(u, v) > 0) u.swap(v);
    sub_words(v.data(), u.data(), v.data(), width);
    if (is_zero_words(v)) break;
  }
  return BigUint::from_limbs(std::move(u)) << common;
}

BigUint mod_inv(const BigUint& a, const BigUint& modulus) {
  if (modulus < BigUint(2)) throw Error(ErrorCode::InvalidArgument, "mod_inv modulus must be >= 2");
  if (modulus.is_odd()) return mod_inv_odd(a % modulus, modulus);
  BigUint r0 = modulus;
  BigUint r1 = a % modulus;
  Signed t0{BigUint{}, false};
  Signed t1{BigUint{1}, false};
  while (!r1.is_zero()) {
    auto [q, r] = BigUint::divmod(r0, r1);
    r0 = std::move(r1);
    r1 = std::move(r);
    Signed next = signed_sub(t0, Signed{q * t1.mag, t1.negative});
    t0 = std::move(t1);
    t1 = std::move(next);
  }
  if (r0 != BigUint(1)) throw Error(ErrorCode::NotInvertible, "value is not invertible modulo N");
  BigUint x = t0.mag % modulus;
  if (t0.negative && !x.is_zero()) x = modulus - x;
  return x;
}

BigUint mod_mul_plain(const BigUint& a, const BigUint& b, const BigUint& modulus) {
  if (modulus.is_zero()) throw Error(ErrorCode::ZeroModulus, "modulus is zero");
  return (a * b) % modulus;
}

MontgomeryContext::MontgomeryContext(const BigUint& modulus)
    : MontgomeryContext(modulus, ((modulus.bit_length() + 63) / 64) * 64) {}

MontgomeryContext::MontgomeryContext(const BigUint& modulus, std::size_t r_bits)
    : modulus_(modulus), r_bits_(r_bits) {
  if (modulus_.is_even()) throw Error(ErrorCode::EvenModulus, "Montgomery modulus must be odd");
  if (modulus_ <= BigUint(2)) throw Error(ErrorCode::InvalidArgument, "Montgomery modulus must be > 2");
  if (r_bits_ < modulus_.bit_length()) {
    throw Error(ErrorCode::InvalidArgument, "r = 2^k must exceed the modulus");
  }
  const BigUint r = BigUint::power_of_two(r_bits_);
  n_prime_ = r - inverse_mod_pow2(modulus_, r_bits_);
  r2_ = BigUint::power_of_two(2 * r_bits_) % modulus_;
  one_ = r % modulus_;
  aligned_ = r_bits_ % 64 == 0;
  if (aligned_) {
    words_ = r_bits_ / 64;
    n0_ = n_prime_.low_u64();
    n_words_ = to_words(modulus_);
  }
}

std::vector<Limb> MontgomeryContext::to_words(const BigUint& x) const {
  const auto limbs = x.limbs();
  if (limbs.size() > words_) throw Error(ErrorCode::InvalidArgument, "operand wider than the Montgomery radix");
  std::vector<Limb> out(words_, 0);
  std::copy(limbs.begin(), limbs.end(), out.begin());
  return out;
}

BigUint MontgomeryContext::from_words(const std::vector<Limb>& words) const {
  return BigUint::from_limbs(std::span<const Limb>(words.data(), words_));
}

// Word-serial REDC of the 2s-limb value in t.
// Carries out of position i + s are held back in `pending` and folded in by
// the next row instead of rippling up the buffer.
void MontgomeryContext::reduce_words(Limb* t, Limb* out) const {
  const std::size_t s = words_;
  const Limb* n = n_words_.data();
  Limb pending = 0;
  for (std::size_t i = 0; i < s; ++i) {
    const Limb c = addmul_row(t + i, n, s, t[i] * n0_);
    const Wide cur = static_cast<Wide>(t[i + s]) + c + pending;
    t[i + s] = static_cast<Limb>(cur);
    pending = static_cast<Limb>(cur >> 64);
  }
  const Limb* hi = t + s;
  if (pending != 0 || geq_words(hi, n, s)) {
    sub_words(hi, n, out, s);
  } else {
    std::copy(hi, hi + s, out);
  }
}

#if PMKRSA_HAVE_GMP

void MontgomeryContext::mul_words(const Limb* a, const Limb* b, Limb* out, Limb* scratch) const {
  mpn_mul_n(scratch, a, b, static_cast<mp_size_t>(words_));
  reduce_words(scratch, out);
}

void MontgomeryContext::sqr_words(const Limb* a, Limb* out, Limb* scratch) const {
  mpn_sqr(scratch, a, static_cast<mp_size_t>(words_));
  reduce_words(scratch, out);
}

#else

// Coarsely integrated operand scanning with the multiply row and the
// reduction row fused into one pass over j.
void MontgomeryContext::mul_words(const Limb* a, const Limb* b, Limb* out, Limb* scratch) const {
  const std::size_t s = words_;
  const Limb* n = n_words_.data();
  const Limb n0 = n0_;
  Limb* t = scratch;
  std::fill(t, t + s + 1, Limb{0});
  for (std::size_t i = 0; i < s; ++i) {
    const Limb bi = b[i];
    Wide prod = static_cast<Wide>(a[0]) * bi + t[0];
    Limb carry_mul = static_cast<Limb>(prod >> 64);
    const Limb m = static_cast<Limb>(prod) * n0;
    Wide red = static_cast<Wide>(m) * n[0] + static_cast<Limb>(prod);
    Limb carry_red = static_cast<Limb>(red >> 64);
    for (std::size_t j = 1; j < s; ++j) {
      prod = static_cast<Wide>(a[j]) * bi + t[j] + carry_mul;
      carry_mul = static_cast<Limb>(prod >> 64);
      red = static_cast<Wide>(m) * n[j] + static_cast<Limb>(prod) + carry_red;
      carry_red = static_cast<Limb>(red >> 64);
      t[j - 1] = static_cast<Limb>(red);
    }
    const Wide top = static_cast<Wide>(t[s]) + carry_mul + carry_red;
    t[s - 1] = static_cast<Limb>(top);
    t[s] = static_cast<Limb>(top >> 64);
  }
  if (t[s] != 0 || geq_words(t, n, s)) {
    sub_words(t, n, out, s);
  } else {
    std::copy(t, t + s, out);
  }
}

// Full square (cross products once, doubled), then REDC.
void MontgomeryContext::sqr_words(const Limb* a, Limb* out, Limb* scratch) const {
  const std::size_t s = words_;
  Limb* t = scratch;
  std::fill(t, t + 2 * s + 1, Limb{0});

  for (std::size_t i = 0; i < s; ++i) {
    Limb carry = 0;
    const Limb ai = a[i];
    for (std::size_t j = i + 1; j < s; ++j) {
      const Wide cur = static_cast<Wide>(ai) * a[j] + t[i + j] + carry;
      t[i + j] = static_cast<Limb>(cur);
      carry = static_cast<Limb>(cur >> 64);
    }
    t[i + s] = carry;
  }
  for (std::size_t i = 2 * s; i-- > 1;) {
    t[i] = (t[i] << 1) | (t[i - 1] >> 63);
  }
  t[0] <<= 1;
  Limb carry = 0;
  for (std::size_t i = 0; i < s; ++i) {
    const Wide sq = static_cast<Wide>(a[i]) * a[i];
    Wide cur = static_cast<Wide>(t[2 * i]) + static_cast<Limb>(sq) + carry;
    t[2 * i] = static_cast<Limb>(cur);
    cur = static_cast<Wide>(t[2 * i + 1]) + static_cast<Limb>(sq >> 64) + static_cast<Limb>(cur >> 64);
    t[2 * i + 1] = static_cast<Limb>(cur);
    carry = static_cast<Limb>(cur >> 64);
  }
  t[2 * s] += carry;
  reduce_words(t, out);
}

#endif

BigUint MontgomeryContext::redc_generic(const BigUint& t) const {
  const BigUint m = (t.low_bits(r_bits_) * n_prime_).low_bits(r_bits_);
  BigUint u = (t + m * modulus_) >> r_bits_;
  if (u >= modulus_) u -= modulus_;
  return u;
}

BigUint MontgomeryContext::multiply(const BigUint& a_hat, const BigUint& b_hat) const {
  if (a_hat >= modulus_ || b_hat >= modulus_) {
    throw Error(ErrorCode::InvalidArgument, "Montgomery operands must be reduced below N");
  }
  if (!aligned_) return redc_generic(a_hat * b_hat);
  const auto a = to_words(a_hat);
  const auto b = to_words(b_hat);
  std::vector<Limb> out(words_);
  std::vector<Limb> scratch(2 * words_ + 1);
  mul_words(a.data(), b.data(), out.data(), scratch.data());
  return from_words(out);
}

BigUint MontgomeryContext::to_montgomery(const BigUint& x) const { return multiply(x, r2_); }

BigUint MontgomeryContext::from_montgomery(const BigUint& x_hat) const { return multiply(x_hat, BigUint(1)); }

BigUint MontgomeryContext::pow(const BigUint& x, const BigUint& e) const {
  const BigUint base = x < modulus_ ? x : x % modulus_;
  const std::size_t ebits = e.bit_length();
  if (!aligned_) {
    BigUint y = one_;
    BigUint xh = to_montgomery(base);
    for (std::size_t i = 0; i < ebits; ++i) {
      if (e.test_bit(i)) y = multiply(y, xh);
      if (i + 1 < ebits) xh = multiply(xh, xh);
    }
    return from_montgomery(y);
  }

  const std::size_t s = words_;
  std::vector<Limb> y = to_words(one_);
  std::vector<Limb> xh(s);
  std::vector<Limb> tmp(s);
  std::vector<Limb> scratch(2 * s + 1);
  {
    const auto b = to_words(base);
    const auto r2 = to_words(r2_);
    mul_words(b.data(), r2.data(), xh.data(), scratch.data());
  }
  for (std::size_t i = 0; i < ebits; ++i) {
    if (e.test_bit(i)) {
      mul_words(y.data(), xh.data(), tmp.data(), scratch.data());
      y.swap(tmp);
    }
    if (i + 1 < ebits) {
      sqr_words(xh.data(), tmp.data(), scratch.data());
      xh.swap(tmp);
    }
  }
  std::vector<Limb> unit(s, 0);
  unit[0] = 1;
  mul_words(y.data(), unit.data(), tmp.data(), scratch.data());
  return from_words(tmp);
}

BigUint mod_pow(const BigUint& x, const BigUint& e, const BigUint& modulus) {
  if (modulus < BigUint(2)) throw Error(ErrorCode::ZeroModulus, "modulus must be >= 2");
  if (modulus.is_odd() && modulus > BigUint(2)) return MontgomeryContext(modulus).pow(x, e);
  BigUint y = BigUint(1) % modulus;
  BigUint base = x % modulus;
  const std::size_t ebits = e.bit_length();
  for (std::size_t i = 0; i < ebits; ++i) {
    if (e.test_bit(i)) y = mod_mul_plain(y, base, modulus);
    if (i + 1 < ebits) base = mod_mul_plain(base, base, modulus);
  }
  return y;
}

namespace detail {

BigUint redc_reference(const MontgomeryContext& ctx, const BigUint& t) {
  const BigUint r = BigUint::power_of_two(ctx.r_bits());
  const BigUint m = ((t % r) * ctx.n_prime()) % r;
  BigUint u = (t + m * ctx.modulus()) / r;
  if (u >= ctx.modulus()) u -= ctx.modulus();
  return u;
}

}  // namespace detail

}  // namespace pmkrsa
