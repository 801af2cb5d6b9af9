#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pmkrsa/scheme.hpp"

// Ciphertext container, all integers big-endian:
//
//   offset  size  field
//   0       4     magic "PMK1"
//   4       1     version (1)
//   5       4     bits
//   9       2     rows
//   11      4     k (cell count)
//   15      8     total_len (plaintext bytes)
//   23      ...   k records, each c*_t then c_r_t, ceil(bits/8) bytes per cell

namespace pmkrsa {

inline constexpr std::uint8_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderSize = 23;

/// ceil(bits / 8)
constexpr std::size_t cell_width(std::uint32_t bits) noexcept { return (static_cast<std::size_t>(bits) + 7) / 8; }

/// Throws InvalidArgument if a cell does not fit in cell_width(bits) bytes or
/// the c_star / c_r lists differ in length.
std::vector<std::uint8_t> write_container(const CipherPack& pack);

/// Total over arbitrary bytes: returns a pack or throws Error with one of
/// BadMagic, UnsupportedVersion, TruncatedBody, TrailingGarbage or
/// LayoutMismatch (zero bits or rows), carrying the offending byte offset.
CipherPack parse_container(std::span<const std::uint8_t> bytes);

}  // namespace pmkrsa
