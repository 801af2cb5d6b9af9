#include "pmkrsa/container.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "pmkrsa/error.hpp"

namespace pmkrsa {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'P', 'M', 'K', '1'};

void put_be(std::vector<std::uint8_t>& out, std::uint64_t v, int width) {
  for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_be(std::span<const std::uint8_t> bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v = (v << 8) | bytes[offset + static_cast<std::size_t>(i)];
  return v;
}

}  // namespace

std::vector<std::uint8_t> write_container(const CipherPack& pack) {
  if (pack.c_star.size() != pack.c_r.size()) {
    throw Error(ErrorCode::InvalidArgument, "c_star and c_r hold different cell counts");
  }
  if (pack.k() > 0xFFFFFFFFULL) throw Error(ErrorCode::InvalidArgument, "too many cells for one container");
  const std::size_t width = cell_width(pack.layout.bits);
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  out.reserve(kContainerHeaderSize + pack.k() * 2 * width);
  out.push_back(kContainerVersion);
  put_be(out, pack.layout.bits, 4);
  put_be(out, pack.layout.rows, 2);
  put_be(out, pack.k(), 4);
  put_be(out, pack.layout.total_len, 8);
  for (std::size_t t = 0; t < pack.k(); ++t) {
    for (const BigUint* cell : {&pack.c_star[t], &pack.c_r[t]}) {
      if (cell->bit_length() > width * 8) {
        throw Error(ErrorCode::InvalidArgument, "cell " + std::to_string(t) + " is wider than the key length");
      }
      const std::size_t at = out.size();
      out.resize(at + width);
      cell->write_bytes_be(std::span<std::uint8_t>(out).subspan(at, width));
    }
  }
  return out;
}

CipherPack parse_container(std::span<const std::uint8_t> bytes) {
  const std::size_t magic_len = std::min(bytes.size(), kMagic.size());
  const auto mismatch = std::mismatch(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(magic_len),
                                      kMagic.begin());
  if (mismatch.first != bytes.begin() + static_cast<std::ptrdiff_t>(magic_len)) {
    throw Error(ErrorCode::BadMagic, "not a PMK1 container",
                static_cast<std::size_t>(mismatch.first - bytes.begin()));
  }
  if (bytes.size() < kContainerHeaderSize) {
    if (bytes.size() > 4 && bytes[4] != kContainerVersion) {
      throw Error(ErrorCode::UnsupportedVersion, "container version " + std::to_string(bytes[4]), 4);
    }
    throw Error(ErrorCode::TruncatedBody, "header needs 23 bytes, have " + std::to_string(bytes.size()),
                bytes.size());
  }
  if (bytes[4] != kContainerVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "container version " + std::to_string(bytes[4]), 4);
  }

  CipherPack pack;
  pack.layout.bits = static_cast<std::uint32_t>(get_be(bytes, 5, 4));
  pack.layout.rows = static_cast<std::uint16_t>(get_be(bytes, 9, 2));
  const std::uint64_t k = get_be(bytes, 11, 4);
  pack.layout.total_len = get_be(bytes, 15, 8);
  if (pack.layout.bits == 0) throw Error(ErrorCode::LayoutMismatch, "container declares 0-bit keys", 5);
  if (pack.layout.rows == 0) throw Error(ErrorCode::LayoutMismatch, "container declares zero key rows", 9);

  const std::uint64_t width = cell_width(pack.layout.bits);
  const std::uint64_t body = bytes.size() - kContainerHeaderSize;
  const std::uint64_t record = 2 * width;
  const std::uint64_t complete = body / record;
  if (complete < k) {
    throw Error(ErrorCode::TruncatedBody,
                "header declares " + std::to_string(k) + " records, body holds " + std::to_string(complete),
                static_cast<std::size_t>(kContainerHeaderSize + complete * record));
  }
  const std::uint64_t expected = k * record;
  if (body > expected) {
    throw Error(ErrorCode::TrailingGarbage, std::to_string(body - expected) + " bytes after the last record",
                static_cast<std::size_t>(kContainerHeaderSize + expected));
  }

  pack.c_star.reserve(static_cast<std::size_t>(k));
  pack.c_r.reserve(static_cast<std::size_t>(k));
  std::size_t at = kContainerHeaderSize;
  const auto w = static_cast<std::size_t>(width);
  for (std::uint64_t t = 0; t < k; ++t) {
    pack.c_star.push_back(BigUint::from_bytes_be(bytes.subspan(at, w)));
    pack.c_r.push_back(BigUint::from_bytes_be(bytes.subspan(at + w, w)));
    at += 2 * w;
  }
  return pack;
}

}  // namespace pmkrsa
