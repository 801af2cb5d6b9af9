#include "pmkrsa/scheme.hpp"

#include <algorithm>
#include <optional>

#include "pmkrsa/error.hpp"
#include "pmkrsa/modmath.hpp"
#include "pmkrsa/rsa_variants.hpp"

namespace pmkrsa {

namespace {

constexpr int kMaxBlindAttempts = 128;

// Per-row state shared read-only by all cell tasks.
struct RowEngine {
  const KeyPair* key = nullptr;
  MontgomeryContext ctx;
  std::optional<CrtDecryptor> crt;

  RowEngine(const KeyPair& k, bool with_crt) : key(&k), ctx(k.n) {
    if (with_crt) crt.emplace(k);
  }

  BigUint private_op(const BigUint& c) const { return crt ? crt->decrypt(c) : ctx.pow(c, key->d); }
};

std::vector<RowEngine> build_rows(const KeyBundle& bundle, bool decrypting, Exponentiation mode) {
  std::vector<RowEngine> rows;
  rows.reserve(bundle.rows.size());
  for (const auto& key : bundle.rows) rows.emplace_back(key, decrypting && mode == Exponentiation::Crt);
  return rows;
}

template <class Fn>
auto run_cells(std::size_t count, Fn&& fn, const ParallelConfig& parallel) {
  try {
    return par_map_index(count, std::forward<Fn>(fn), parallel);
  } catch (const TaskFailed& failed) {
    failed.rethrow_cause();
  }
}

std::size_t expected_cells(std::uint64_t total_len, std::size_t payload) {
  return static_cast<std::size_t>((total_len + payload - 1) / payload);
}

void check_layout(const CipherPack& pack, const KeyBundle& bundle) {
  if (bundle.rows.empty()) throw Error(ErrorCode::InvalidArgument, "empty key bundle");
  if (pack.layout.bits != bundle.bits) {
    throw Error(ErrorCode::LayoutMismatch, "ciphertext is for " + std::to_string(pack.layout.bits) +
                                                "-bit keys, bundle has " + std::to_string(bundle.bits));
  }
  if (pack.layout.rows != bundle.rows.size()) {
    throw Error(ErrorCode::LayoutMismatch, "ciphertext uses " + std::to_string(pack.layout.rows) +
                                                " key rows, bundle has " + std::to_string(bundle.rows.size()));
  }
  if (pack.c_star.size() != pack.c_r.size()) {
    throw Error(ErrorCode::LayoutMismatch, "c_star and c_r hold different cell counts");
  }
  for (std::size_t t = 0; t < pack.k(); ++t) {
    const BigUint& n = bundle.rows[row_of(t, bundle.rows.size())].n;
    if (pack.c_star[t] >= n || pack.c_r[t] >= n) {
      throw Error(ErrorCode::MessageTooLarge, "cell " + std::to_string(t) + " is not below its row modulus");
    }
  }
}

}  // namespace

std::size_t payload_bytes(std::uint32_t bits) {
  if (bits / 16 < 2) throw Error(ErrorCode::InvalidArgument, "key length too small for a one-byte payload");
  return bits / 16 - 1;
}

ChunkGrid chunk(std::span<const std::uint8_t> message, const KeyBundle& bundle) {
  if (bundle.rows.empty()) throw Error(ErrorCode::InvalidArgument, "empty key bundle");
  ChunkGrid grid;
  grid.rows = bundle.rows.size();
  grid.payload_bytes = payload_bytes(bundle.bits);
  grid.total_len = message.size();
  const std::size_t k = expected_cells(message.size(), grid.payload_bytes);
  grid.cells.reserve(k);
  std::vector<std::uint8_t> cell;
  for (std::size_t t = 0; t < k; ++t) {
    const std::size_t begin = t * grid.payload_bytes;
    const std::size_t len = std::min(grid.payload_bytes, message.size() - begin);
    cell.assign(1, kCellSentinel);
    cell.insert(cell.end(), message.begin() + static_cast<std::ptrdiff_t>(begin),
                message.begin() + static_cast<std::ptrdiff_t>(begin + len));
    grid.cells.push_back(BigUint::from_bytes_be(cell));
  }
  return grid;
}

BlindMatrix gen_blind(const ChunkGrid& grid, const KeyBundle& bundle, RandomSource& rng) {
  if (grid.rows != bundle.rows.size()) throw Error(ErrorCode::LayoutMismatch, "grid and bundle row counts differ");
  BlindMatrix blinds;
  blinds.r.reserve(grid.k());
  const BigUint two(2);
  for (std::size_t t = 0; t < grid.k(); ++t) {
    const BigUint& n = bundle.rows[row_of(t, grid.rows)].n;
    int attempts = 0;
    for (;;) {
      if (++attempts > kMaxBlindAttempts) {
        throw Error(ErrorCode::BlindGenerationFailed, "no unit blind found for cell " + std::to_string(t));
      }
      BigUint r = random_range(rng, two, n);
      if (gcd(r, n) == BigUint(1)) {
        blinds.r.push_back(std::move(r));
        break;
      }
    }
  }
  return blinds;
}

CipherPack encrypt_with_blinds(const ChunkGrid& grid, const BlindMatrix& blinds, const KeyBundle& bundle,
                               const ParallelConfig& parallel) {
  if (grid.rows != bundle.rows.size() || blinds.r.size() != grid.k()) {
    throw Error(ErrorCode::LayoutMismatch, "grid, blinds and bundle do not line up");
  }
  if (bundle.rows.size() > 0xFFFF) throw Error(ErrorCode::InvalidArgument, "too many key rows");
  const auto rows = build_rows(bundle, false, Exponentiation::Direct);

  struct Cell {
    BigUint c_star;
    BigUint c_r;
  };
  auto cells = run_cells(
      grid.k(),
      [&](std::size_t t) {
        const RowEngine& row = rows[row_of(t, rows.size())];
        const BigUint& n = row.key->n;
        if (grid.cells[t] >= n) throw Error(ErrorCode::MessageTooLarge, "cell exceeds row modulus");
        const BigUint blinded = mod_mul_plain(grid.cells[t], blinds.r[t], n);
        return Cell{row.ctx.pow(blinded, row.key->e), row.ctx.pow(blinds.r[t], row.key->e)};
      },
      parallel);

  CipherPack pack;
  pack.layout = {bundle.bits, static_cast<std::uint16_t>(bundle.rows.size()), grid.total_len};
  pack.c_star.reserve(cells.size());
  pack.c_r.reserve(cells.size());
  for (auto& c : cells) {
    pack.c_star.push_back(std::move(c.c_star));
    pack.c_r.push_back(std::move(c.c_r));
  }
  return pack;
}

CipherPack encrypt(std::span<const std::uint8_t> message, const KeyBundle& bundle, RandomSource& rng,
                   const ParallelConfig& parallel) {
  const ChunkGrid grid = chunk(message, bundle);
  const BlindMatrix blinds = gen_blind(grid, bundle, rng);
  return encrypt_with_blinds(grid, blinds, bundle, parallel);
}

std::vector<BigUint> recover_blinds(const CipherPack& pack, const KeyBundle& bundle, const DecryptOptions& options) {
  if (!bundle.is_private()) throw Error(ErrorCode::InvalidArgument, "decryption needs a private bundle");
  check_layout(pack, bundle);
  const auto rows = build_rows(bundle, true, options.exponentiation);
  return run_cells(
      pack.k(), [&](std::size_t t) { return rows[row_of(t, rows.size())].private_op(pack.c_r[t]); },
      options.parallel);
}

std::vector<BigUint> decrypt_cells(const CipherPack& pack, const KeyBundle& bundle, const DecryptOptions& options) {
  if (!bundle.is_private()) throw Error(ErrorCode::InvalidArgument, "decryption needs a private bundle");
  check_layout(pack, bundle);
  const auto rows = build_rows(bundle, true, options.exponentiation);
  return run_cells(
      pack.k(),
      [&](std::size_t t) {
        const RowEngine& row = rows[row_of(t, rows.size())];
        const BigUint& n = row.key->n;
        const BigUint blind = row.private_op(pack.c_r[t]);
        const BigUint blinded = row.private_op(pack.c_star[t]);
        BigUint inverse;
        try {
          inverse = mod_inv(blind, n);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NotInvertible) throw;
          throw Error(ErrorCode::NotInvertible, "recovered blind of cell " + std::to_string(t) + " is not a unit");
        }
        return mod_mul_plain(blinded, inverse, n);
      },
      options.parallel);
}

std::vector<std::uint8_t> decrypt(const CipherPack& pack, const KeyBundle& bundle, const DecryptOptions& options) {
  if (!bundle.is_private()) throw Error(ErrorCode::InvalidArgument, "decryption needs a private bundle");
  const std::size_t payload = payload_bytes(bundle.bits);
  const std::uint64_t total = pack.layout.total_len;
  if (pack.c_star.size() != expected_cells(total, payload)) {
    throw Error(ErrorCode::LayoutMismatch, "cell count does not match the recorded message length");
  }
  const auto cells = decrypt_cells(pack, bundle, options);

  std::vector<std::uint8_t> message;
  message.reserve(static_cast<std::size_t>(total));
  std::vector<std::uint8_t> bytes;
  for (std::size_t t = 0; t < cells.size(); ++t) {
    const std::size_t expected = static_cast<std::size_t>(std::min<std::uint64_t>(payload, total - t * payload));
    bytes = cells[t].to_bytes_be();
    if (bytes.size() != expected + 1 || bytes.front() != kCellSentinel) {
      throw Error(ErrorCode::SentinelViolation, "cell " + std::to_string(t) + " failed the sentinel check");
    }
    message.insert(message.end(), bytes.begin() + 1, bytes.end());
  }
  return message;
}

}  // namespace pmkrsa
