#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>

#include "pmkrsa/biguint.hpp"

namespace pmkrsa {

/// Byte source for key material and blinding factors.
///
/// Instances are not thread-safe. Parallel code asks for an independent
/// sub-stream per task with split().
class RandomSource {
 public:
  virtual ~RandomSource() = default;

  virtual void fill(std::span<std::uint8_t> out) = 0;
  /// Independent source for sub-task `index`. Does not advance this stream.
  virtual std::unique_ptr<RandomSource> split(std::uint64_t index) const = 0;

  std::uint64_t next_u64();
};

/// Operating-system entropy (getrandom(2)).
class OsEntropy final : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
  std::unique_ptr<RandomSource> split(std::uint64_t index) const override;
};

/// Deterministic generator for reproducible fixtures.
///
/// Output block c is SHA-256(0x00 || seed || be64(c)) for c = 0, 1, 2, ...
/// and the stream is the concatenation of blocks. split(i) yields a fresh
/// generator seeded with SHA-256(0x01 || seed || be64(i)).
class SeededDrbg final : public RandomSource {
 public:
  using Seed = std::array<std::uint8_t, 32>;

  explicit SeededDrbg(const Seed& seed);
  /// 64 hex characters. Throws InvalidArgument otherwise.
  static SeededDrbg from_hex(std::string_view hex);

  void fill(std::span<std::uint8_t> out) override;
  std::unique_ptr<RandomSource> split(std::uint64_t index) const override;

  const Seed& seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  void refill();

  Seed seed_;
  std::uint64_t counter_ = 0;
  std::array<std::uint8_t, 32> block_{};
  std::size_t used_ = 32;
};

/// Uniform integer in [0, bound). Draws ceil(bits/8) big-endian bytes, masks to
/// bit_length(bound) bits, rejects values >= bound.
BigUint random_below(RandomSource& rng, const BigUint& bound);
/// Uniform integer in [low, high).
BigUint random_range(RandomSource& rng, const BigUint& low, const BigUint& high);
/// Uniform integer with at most `bits` bits.
BigUint random_bits(RandomSource& rng, std::size_t bits);

}  // namespace pmkrsa
