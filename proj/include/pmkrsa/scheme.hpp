#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pmkrsa/biguint.hpp"
#include "pmkrsa/keystore.hpp"
#include "pmkrsa/parallel.hpp"
#include "pmkrsa/random.hpp"

// Parallelized multi-key RSA.
//
// A message is cut into k cells. Cell t is bound to key row t mod i and
// carries a fresh blind r_t for every encryption:
//
//   c*_t  = (m_t * r_t)^e_a mod N_a
//   c_r_t = r_t^e_a mod N_a
//
// Decryption recovers r_t from c_r_t and divides it back out of (c*_t)^d_a.

namespace pmkrsa {

/// Each cell is 0x01 followed by up to payload_bytes(bits) message bytes.
/// The leading 0x01 keeps every cell >= 1 (a zero cell would encrypt to 0
/// regardless of the blind) and the cell length at n/2 bits.
inline constexpr std::uint8_t kCellSentinel = 0x01;

/// floor(bits/16) - 1. Throws InvalidArgument when that is below one byte.
std::size_t payload_bytes(std::uint32_t bits);

/// Row serving cell t in a grid with `rows` rows.
constexpr std::size_t row_of(std::size_t cell, std::size_t rows) noexcept { return cell % rows; }

struct ChunkGrid {
  std::vector<BigUint> cells;
  std::size_t rows = 0;
  std::size_t payload_bytes = 0;
  std::uint64_t total_len = 0;

  std::size_t k() const noexcept { return cells.size(); }
  /// ceil(k / rows): the column count j of the i x j grid.
  std::size_t cols() const noexcept { return rows == 0 ? 0 : (cells.size() + rows - 1) / rows; }
};

struct BlindMatrix {
  std::vector<BigUint> r;
};

struct CipherLayout {
  std::uint32_t bits = 0;
  std::uint16_t rows = 0;
  std::uint64_t total_len = 0;

  friend bool operator==(const CipherLayout&, const CipherLayout&) = default;
};

struct CipherPack {
  std::vector<BigUint> c_star;
  std::vector<BigUint> c_r;
  CipherLayout layout;

  std::size_t k() const noexcept { return c_star.size(); }
  friend bool operator==(const CipherPack&, const CipherPack&) = default;
};

ChunkGrid chunk(std::span<const std::uint8_t> message, const KeyBundle& bundle);

/// r_t uniform in [2, N_a) with gcd(r_t, N_a) = 1. Drawn sequentially from
/// `rng` in cell order. Throws BlindGenerationFailed after 128 rejected draws
/// for one cell.
BlindMatrix gen_blind(const ChunkGrid& grid, const KeyBundle& bundle, RandomSource& rng);

/// Fresh blinds from `rng`, then encrypt_with_blinds.
CipherPack encrypt(std::span<const std::uint8_t> message, const KeyBundle& bundle, RandomSource& rng,
                   const ParallelConfig& parallel = {});

/// Encrypts a prepared grid under caller-chosen blinds (fixtures, tests).
CipherPack encrypt_with_blinds(const ChunkGrid& grid, const BlindMatrix& blinds, const KeyBundle& bundle,
                               const ParallelConfig& parallel = {});

enum class Exponentiation {
  Crt,     // per-prime half-size exponentiations recombined by CRT
  Direct,  // c^d mod N
};

struct DecryptOptions {
  ParallelConfig parallel;
  Exponentiation exponentiation = Exponentiation::Crt;
};

/// Recovers the message. Throws LayoutMismatch (bits, rows or cell count
/// disagree with the bundle), MessageTooLarge (a cell is not below its row
/// modulus), NotInvertible (recovered blind shares a factor with N) or
/// SentinelViolation (recovered cell is not 0x01 || payload of the expected
/// length).
std::vector<std::uint8_t> decrypt(const CipherPack& pack, const KeyBundle& bundle,
                                  const DecryptOptions& options = {});

/// Unblinded cell values m_t = (c*_t)^d * (c_r_t^d)^-1 mod N_a, sentinel
/// still attached. Checks bits, rows and cell ranges but not message length.
std::vector<BigUint> decrypt_cells(const CipherPack& pack, const KeyBundle& bundle,
                                   const DecryptOptions& options = {});

/// Per-cell recovered blind r' = c_r^d mod N_a, without unblinding.
std::vector<BigUint> recover_blinds(const CipherPack& pack, const KeyBundle& bundle,
                                    const DecryptOptions& options = {});

}  // namespace pmkrsa
