#include "pmkrsa/biguint.hpp"

#include <algorithm>
#include <bit>
#include <cassert>

#include "pmkrsa/error.hpp"

namespace pmkrsa {

namespace {

using Limb = BigUint::Limb;
__extension__ typedef unsigned __int128 Wide;

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Divides limbs in place by a single limb, returns the remainder.
Limb div_small_inplace(std::vector<Limb>& limbs, Limb divisor) {
  Wide rem = 0;
  for (std::size_t i = limbs.size(); i-- > 0;) {
    const Wide cur = (rem << 64) | limbs[i];
    limbs[i] = static_cast<Limb>(cur / divisor);
    rem = cur % divisor;
  }
  return static_cast<Limb>(rem);
}

}  // namespace

BigUint::BigUint(std::uint64_t value) {
  if (value != 0) limbs_.push_back(value);
}

BigUint BigUint::from_limbs(std::vector<Limb> limbs) {
  BigUint out;
  out.limbs_ = std::move(limbs);
  out.trim();
  return out;
}

BigUint BigUint::from_limbs(std::span<const Limb> limbs) {
  return from_limbs(std::vector<Limb>(limbs.begin(), limbs.end()));
}

BigUint BigUint::from_hex(std::string_view hex) {
  if (hex.empty()) throw Error(ErrorCode::InvalidArgument, "empty hex string");
  BigUint out;
  out.limbs_.assign((hex.size() + 15) / 16, 0);
  std::size_t bit = 0;
  for (std::size_t i = hex.size(); i-- > 0; bit += 4) {
    const int v = hex_value(hex[i]);
    if (v < 0) throw Error(ErrorCode::InvalidArgument, "invalid hex digit", i);
    out.limbs_[bit / 64] |= static_cast<Limb>(v) << (bit % 64);
  }
  out.trim();
  return out;
}

BigUint BigUint::from_bytes_be(std::span<const std::uint8_t> bytes) {
  BigUint out;
  out.limbs_.assign((bytes.size() + 7) / 8, 0);
  std::size_t bit = 0;
  for (std::size_t i = bytes.size(); i-- > 0; bit += 8) {
    out.limbs_[bit / 64] |= static_cast<Limb>(bytes[i]) << (bit % 64);
  }
  out.trim();
  return out;
}

BigUint BigUint::power_of_two(std::size_t bits) {
  BigUint out;
  out.limbs_.assign(bits / 64 + 1, 0);
  out.limbs_.back() = Limb{1} << (bits % 64);
  return out;
}

std::string BigUint::to_hex() const {
  if (is_zero()) return "0";
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(limbs_.size() * 16);
  for (std::size_t i = limbs_.size(); i-- > 0;) {
    for (int shift = 60; shift >= 0; shift -= 4) {
      out.push_back(kDigits[(limbs_[i] >> shift) & 0xF]);
    }
  }
  const auto first = out.find_first_not_of('0');
  return out.substr(first);
}

std::string BigUint::to_decimal() const {
  if (is_zero()) return "0";
  std::vector<Limb> work = limbs_;
  std::string out;
  constexpr Limb kChunk = 10'000'000'000'000'000'000ULL;  // 10^19
  while (!work.empty()) {
    Limb rem = div_small_inplace(work, kChunk);
    while (!work.empty() && work.back() == 0) work.pop_back();
    for (int i = 0; i < 19; ++i) {
      out.push_back(static_cast<char>('0' + rem % 10));
      rem /= 10;
      if (work.empty() && rem == 0) break;
    }
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<std::uint8_t> BigUint::to_bytes_be() const {
  return to_bytes_be((bit_length() + 7) / 8);
}

std::vector<std::uint8_t> BigUint::to_bytes_be(std::size_t width) const {
  std::vector<std::uint8_t> out(width);
  write_bytes_be(out);
  return out;
}

void BigUint::write_bytes_be(std::span<std::uint8_t> out) const {
  if ((bit_length() + 7) / 8 > out.size()) {
    throw Error(ErrorCode::InvalidArgument, "value does not fit in " + std::to_string(out.size()) + " bytes");
  }
  std::size_t bit = 0;
  for (std::size_t i = out.size(); i-- > 0; bit += 8) {
    out[i] = static_cast<std::uint8_t>(limb(bit / 64) >> (bit % 64));
  }
}

std::size_t BigUint::bit_length() const noexcept {
  if (limbs_.empty()) return 0;
  return (limbs_.size() - 1) * 64 + (64 - static_cast<std::size_t>(std::countl_zero(limbs_.back())));
}

bool BigUint::test_bit(std::size_t index) const noexcept {
  return ((limb(index / 64) >> (index % 64)) & 1U) != 0;
}

BigUint BigUint::low_bits(std::size_t bits) const {
  if (bits >= bit_length()) return *this;
  std::vector<Limb> out(limbs_.begin(), limbs_.begin() + static_cast<std::ptrdiff_t>((bits + 63) / 64));
  if (bits % 64 != 0) out.back() &= (Limb{1} << (bits % 64)) - 1;
  return from_limbs(std::move(out));
}

std::uint32_t BigUint::mod_u32(std::uint32_t divisor) const {
  if (divisor == 0) throw Error(ErrorCode::ZeroModulus, "division by zero");
  Wide rem = 0;
  for (std::size_t i = limbs_.size(); i-- > 0;) {
    rem = ((rem << 64) | limbs_[i]) % divisor;
  }
  return static_cast<std::uint32_t>(rem);
}

void BigUint::trim() noexcept {
  while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

BigUint& BigUint::operator+=(const BigUint& rhs) {
  if (rhs.limbs_.size() > limbs_.size()) limbs_.resize(rhs.limbs_.size(), 0);
  Limb carry = 0;
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    const Wide sum = static_cast<Wide>(limbs_[i]) + rhs.limb(i) + carry;
    limbs_[i] = static_cast<Limb>(sum);
    carry = static_cast<Limb>(sum >> 64);
    if (carry == 0 && i >= rhs.limbs_.size()) break;
  }
  if (carry != 0) limbs_.push_back(carry);
  return *this;
}

BigUint& BigUint::operator-=(const BigUint& rhs) {
  if (*this < rhs) throw Error(ErrorCode::InvalidArgument, "BigUint subtraction underflow");
  Limb borrow = 0;
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    const Limb r = rhs.limb(i);
    const Limb d = limbs_[i] - r - borrow;
    borrow = (limbs_[i] < r || (limbs_[i] == r && borrow != 0)) ? 1 : 0;
    limbs_[i] = d;
    if (borrow == 0 && i >= rhs.limbs_.size()) break;
  }
  trim();
  return *this;
}

BigUint operator*(const BigUint& lhs, const BigUint& rhs) {
  if (lhs.is_zero() || rhs.is_zero()) return {};
  std::vector<Limb> out(lhs.limbs_.size() + rhs.limbs_.size(), 0);
  for (std::size_t i = 0; i < lhs.limbs_.size(); ++i) {
    Limb carry = 0;
    const Limb a = lhs.limbs_[i];
    for (std::size_t j = 0; j < rhs.limbs_.size(); ++j) {
      const Wide cur = static_cast<Wide>(a) * rhs.limbs_[j] + out[i + j] + carry;
      out[i + j] = static_cast<Limb>(cur);
      carry = static_cast<Limb>(cur >> 64);
    }
    out[i + rhs.limbs_.size()] = carry;
  }
  return BigUint::from_limbs(std::move(out));
}

BigUint& BigUint::operator*=(const BigUint& rhs) { return *this = *this * rhs; }
BigUint& BigUint::operator/=(const BigUint& rhs) { return *this = divmod(*this, rhs).first; }
BigUint& BigUint::operator%=(const BigUint& rhs) { return *this = divmod(*this, rhs).second; }

BigUint& BigUint::operator<<=(std::size_t bits) {
  if (is_zero() || bits == 0) return *this;
  const std::size_t limb_shift = bits / 64;
  const unsigned bit_shift = bits % 64;
  std::vector<Limb> out(limbs_.size() + limb_shift + 1, 0);
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    out[i + limb_shift] |= limbs_[i] << bit_shift;
    if (bit_shift != 0) out[i + limb_shift + 1] = limbs_[i] >> (64 - bit_shift);
  }
  limbs_ = std::move(out);
  trim();
  return *this;
}

BigUint& BigUint::operator>>=(std::size_t bits) {
  const std::size_t limb_shift = bits / 64;
  const unsigned bit_shift = bits % 64;
  if (limb_shift >= limbs_.size()) {
    limbs_.clear();
    return *this;
  }
  const std::size_t n = limbs_.size() - limb_shift;
  for (std::size_t i = 0; i < n; ++i) {
    Limb v = limbs_[i + limb_shift] >> bit_shift;
    if (bit_shift != 0 && i + limb_shift + 1 < limbs_.size()) {
      v |= limbs_[i + limb_shift + 1] << (64 - bit_shift);
    }
    limbs_[i] = v;
  }
  limbs_.resize(n);
  trim();
  return *this;
}

std::strong_ordering operator<=>(const BigUint& lhs, const BigUint& rhs) noexcept {
  if (lhs.limbs_.size() != rhs.limbs_.size()) return lhs.limbs_.size() <=> rhs.limbs_.size();
  for (std::size_t i = lhs.limbs_.size(); i-- > 0;) {
    if (lhs.limbs_[i] != rhs.limbs_[i]) return lhs.limbs_[i] <=> rhs.limbs_[i];
  }
  return std::strong_ordering::equal;
}

// Knuth, TAOCP vol. 2, 4.3.1 Algorithm D, with 64-bit digits.
std::pair<BigUint, BigUint> BigUint::divmod(const BigUint& dividend, const BigUint& divisor) {
  if (divisor.is_zero()) throw Error(ErrorCode::ZeroModulus, "division by zero");
  if (dividend < divisor) return {BigUint{}, dividend};
  if (divisor.limbs_.size() == 1) {
    std::vector<Limb> q = dividend.limbs_;
    const Limb r = div_small_inplace(q, divisor.limbs_[0]);
    return {from_limbs(std::move(q)), BigUint(r)};
  }

  const std::size_t n = divisor.limbs_.size();
  const std::size_t m = dividend.limbs_.size() - n;
  const unsigned shift = static_cast<unsigned>(std::countl_zero(divisor.limbs_.back()));

  std::vector<Limb> v(n);
  for (std::size_t i = n; i-- > 1;) {
    v[i] = (divisor.limbs_[i] << shift) | (shift ? divisor.limbs_[i - 1] >> (64 - shift) : 0);
  }
  v[0] = divisor.limbs_[0] << shift;

  std::vector<Limb> u(dividend.limbs_.size() + 1);
  u[dividend.limbs_.size()] = shift ? dividend.limbs_.back() >> (64 - shift) : 0;
  for (std::size_t i = dividend.limbs_.size(); i-- > 1;) {
    u[i] = (dividend.limbs_[i] << shift) | (shift ? dividend.limbs_[i - 1] >> (64 - shift) : 0);
  }
  u[0] = dividend.limbs_[0] << shift;

  std::vector<Limb> q(m + 1, 0);
  const Wide base = static_cast<Wide>(1) << 64;
  for (std::size_t j = m + 1; j-- > 0;) {
    const Wide num = (static_cast<Wide>(u[j + n]) << 64) | u[j + n - 1];
    Wide qhat = num / v[n - 1];
    Wide rhat = num % v[n - 1];
    while (qhat >= base || qhat * v[n - 2] > ((rhat << 64) | u[j + n - 2])) {
      --qhat;
      rhat += v[n - 1];
      if (rhat >= base) break;
    }

    // u[j..j+n] -= qhat * v
    Limb borrow = 0;
    Limb carry = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Wide p = qhat * v[i] + carry;
      carry = static_cast<Limb>(p >> 64);
      const Limb plo = static_cast<Limb>(p);
      const Limb t = u[i + j] - plo - borrow;
      borrow = (u[i + j] < plo || (u[i + j] == plo && borrow != 0)) ? 1 : 0;
      u[i + j] = t;
    }
    const Limb top = u[j + n];
    u[j + n] = top - carry - borrow;
    const bool negative = top < carry || (top == carry && borrow != 0);

    if (negative) {
      --qhat;
      Limb c = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const Wide s = static_cast<Wide>(u[i + j]) + v[i] + c;
        u[i + j] = static_cast<Limb>(s);
        c = static_cast<Limb>(s >> 64);
      }
      u[j + n] += c;
    }
    q[j] = static_cast<Limb>(qhat);
  }

  std::vector<Limb> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = (u[i] >> shift) | (shift ? u[i + 1] << (64 - shift) : 0);
  }
  return {from_limbs(std::move(q)), from_limbs(std::move(r))};
}

}  // namespace pmkrsa
