#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pmkrsa {

/// Arbitrary-precision non-negative integer.
///
/// Magnitude is stored as 64-bit limbs, least significant first, and is kept
/// canonical after every operation: no leading zero limbs, zero has no limbs.
class BigUint {
 public:
  using Limb = std::uint64_t;
  static constexpr unsigned kLimbBits = 64;

  BigUint() = default;
  BigUint(std::uint64_t value);  // NOLINT(google-explicit-constructor)

  static BigUint from_limbs(std::vector<Limb> limbs);
  static BigUint from_limbs(std::span<const Limb> limbs);
  /// Lowercase or uppercase hex digits, no prefix, big-endian digit order.
  static BigUint from_hex(std::string_view hex);
  static BigUint from_bytes_be(std::span<const std::uint8_t> bytes);
  /// 2^bits.
  static BigUint power_of_two(std::size_t bits);

  /// Lowercase hex without prefix; "0" for zero.
  std::string to_hex() const;
  std::string to_decimal() const;
  /// Minimal big-endian encoding; empty for zero.
  std::vector<std::uint8_t> to_bytes_be() const;
  /// Zero-padded big-endian encoding of exactly `width` bytes.
  /// Throws InvalidArgument if the value does not fit.
  std::vector<std::uint8_t> to_bytes_be(std::size_t width) const;
  void write_bytes_be(std::span<std::uint8_t> out) const;

  bool is_zero() const noexcept { return limbs_.empty(); }
  bool is_odd() const noexcept { return !limbs_.empty() && (limbs_[0] & 1U) != 0; }
  bool is_even() const noexcept { return !is_odd(); }
  std::size_t bit_length() const noexcept;
  bool test_bit(std::size_t index) const noexcept;
  std::size_t limb_count() const noexcept { return limbs_.size(); }
  std::span<const Limb> limbs() const noexcept { return limbs_; }
  Limb limb(std::size_t index) const noexcept {
    return index < limbs_.size() ? limbs_[index] : 0;
  }
  std::uint64_t low_u64() const noexcept { return limb(0); }
  /// Keeps the lowest `bits` bits.
  BigUint low_bits(std::size_t bits) const;

  std::uint32_t mod_u32(std::uint32_t divisor) const;

  /// Quotient and remainder. Throws ZeroModulus on division by zero.
  static std::pair<BigUint, BigUint> divmod(const BigUint& dividend, const BigUint& divisor);

  BigUint& operator+=(const BigUint& rhs);
  /// Throws InvalidArgument on underflow.
  BigUint& operator-=(const BigUint& rhs);
  BigUint& operator*=(const BigUint& rhs);
  BigUint& operator/=(const BigUint& rhs);
  BigUint& operator%=(const BigUint& rhs);
  BigUint& operator<<=(std::size_t bits);
  BigUint& operator>>=(std::size_t bits);

  friend BigUint operator+(BigUint lhs, const BigUint& rhs) { return lhs += rhs; }
  friend BigUint operator-(BigUint lhs, const BigUint& rhs) { return lhs -= rhs; }
  friend BigUint operator*(const BigUint& lhs, const BigUint& rhs);
  friend BigUint operator/(const BigUint& lhs, const BigUint& rhs) { return divmod(lhs, rhs).first; }
  friend BigUint operator%(const BigUint& lhs, const BigUint& rhs) { return divmod(lhs, rhs).second; }
  friend BigUint operator<<(BigUint lhs, std::size_t bits) { return lhs <<= bits; }
  friend BigUint operator>>(BigUint lhs, std::size_t bits) { return lhs >>= bits; }

  friend bool operator==(const BigUint& lhs, const BigUint& rhs) = default;
  friend std::strong_ordering operator<=>(const BigUint& lhs, const BigUint& rhs) noexcept;

 private:
  void trim() noexcept;

  std::vector<Limb> limbs_;
};

}  // namespace pmkrsa
