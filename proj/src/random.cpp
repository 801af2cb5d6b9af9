#include "pmkrsa/random.hpp"

#include <openssl/sha.h>
#include <sys/random.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <vector>

#include "pmkrsa/error.hpp"

namespace pmkrsa {

namespace {

void put_be64(std::uint8_t* out, std::uint64_t v) {
  for (int i = 7; i >= 0; --i) {
    out[i] = static_cast<std::uint8_t>(v);
    v >>= 8;
  }
}

SeededDrbg::Seed tagged_hash(std::uint8_t tag, const SeededDrbg::Seed& seed, std::uint64_t value) {
  std::array<std::uint8_t, 1 + 32 + 8> input{};
  input[0] = tag;
  std::copy(seed.begin(), seed.end(), input.begin() + 1);
  put_be64(input.data() + 33, value);
  SeededDrbg::Seed out{};
  SHA256(input.data(), input.size(), out.data());
  return out;
}

}  // namespace

std::uint64_t RandomSource::next_u64() {
  std::array<std::uint8_t, 8> buf{};
  fill(buf);
  std::uint64_t v = 0;
  for (auto b : buf) v = (v << 8) | b;
  return v;
}

void OsEntropy::fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    const ssize_t got = ::getrandom(out.data() + done, out.size() - done, 0);
    if (got < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::Io, std::string("getrandom failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(got);
  }
}

std::unique_ptr<RandomSource> OsEntropy::split(std::uint64_t /*index*/) const {
  return std::make_unique<OsEntropy>();
}

SeededDrbg::SeededDrbg(const Seed& seed) : seed_(seed) {}

SeededDrbg SeededDrbg::from_hex(std::string_view hex) {
  if (hex.size() != 64) throw Error(ErrorCode::InvalidArgument, "seed must be 64 hex characters");
  const auto bytes = BigUint::from_hex(hex).to_bytes_be(32);
  Seed seed{};
  std::copy(bytes.begin(), bytes.end(), seed.begin());
  return SeededDrbg(seed);
}

void SeededDrbg::refill() {
  block_ = tagged_hash(0x00, seed_, counter_++);
  used_ = 0;
}

void SeededDrbg::fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    if (used_ == block_.size()) refill();
    const std::size_t n = std::min(out.size() - done, block_.size() - used_);
    std::memcpy(out.data() + done, block_.data() + used_, n);
    used_ += n;
    done += n;
  }
}

std::unique_ptr<RandomSource> SeededDrbg::split(std::uint64_t index) const {
  return std::make_unique<SeededDrbg>(tagged_hash(0x01, seed_, index));
}

BigUint random_bits(RandomSource& rng, std::size_t bits) {
  if (bits == 0) return {};
  std::vector<std::uint8_t> buf((bits + 7) / 8);
  rng.fill(buf);
  const unsigned excess = static_cast<unsigned>(buf.size() * 8 - bits);
  buf[0] &= static_cast<std::uint8_t>(0xFFU >> excess);
  return BigUint::from_bytes_be(buf);
}

BigUint random_below(RandomSource& rng, const BigUint& bound) {
  if (bound.is_zero()) throw Error(ErrorCode::InvalidArgument, "random_below bound must be positive");
  const std::size_t bits = bound.bit_length();
  for (;;) {
    BigUint candidate = random_bits(rng, bits);
    if (candidate < bound) return candidate;
  }
}

BigUint random_range(RandomSource& rng, const BigUint& low, const BigUint& high) {
  if (low >= high) throw Error(ErrorCode::InvalidArgument, "random_range requires low < high");
  return low + random_below(rng, high - low);
}

}  // namespace pmkrsa
