#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pmkrsa/random.hpp"

// Wall-clock benchmark harness. Every gate built on it compares ratios or
// orderings of medians, never absolute times.

namespace pmkrsa {

enum class Variant { Pmkrsa, Rsa, Crt, Multiprime };

struct VariantSpec {
  Variant kind = Variant::Pmkrsa;
  std::size_t primes = 2;  // b, used by Multiprime only

  /// "pmkrsa", "rsa", "crt" or "multiprime:b" with b >= 2.
  static VariantSpec parse(std::string_view text);
  std::string name() const;
};

enum class Phase { Keygen, Encrypt, Decrypt };
std::string_view phase_name(Phase phase) noexcept;

struct BenchConfig {
  VariantSpec variant;
  std::uint32_t bits = 2048;
  std::size_t keys = 16;  // key rows; baselines always use one key
  unsigned threads = 1;
  std::uint64_t file_bytes = 102400;
};

struct BenchOptions {
  int repetitions = 5;
  int warmup = 1;
  bool time_keygen = true;
};

struct BenchRecord {
  std::string variant;
  std::uint32_t bits = 0;
  std::size_t keys = 0;
  unsigned threads = 0;
  std::uint64_t file_bytes = 0;
  Phase phase = Phase::Decrypt;
  double median_s = 0.0;
  int repetitions = 0;
};

/// For each config: generate keys, then encrypt and decrypt one random file
/// of `file_bytes`, recording the median of `repetitions` timed runs after
/// `warmup` discarded runs. Each decryption is checked against the input;
/// a mismatch throws Internal. Records come out in config order, phases in
/// keygen, encrypt, decrypt order.
std::vector<BenchRecord> run_suite(std::span<const BenchConfig> configs, const BenchOptions& options,
                                   RandomSource& rng);

struct SpeedupReport {
  BenchRecord baseline;
  BenchRecord candidate;
  double ratio = 0.0;  // baseline.median_s / candidate.median_s
};

/// Throws MismatchedConfigs unless bits, file_bytes and phase agree.
SpeedupReport speedup(const BenchRecord& baseline, const BenchRecord& candidate);

struct TrendReport {
  std::uint32_t low_bits = 0;
  std::uint32_t high_bits = 0;
  double decrypt_ratio = 0.0;
  double decrypt_exponent = 0.0;  // log(decrypt_ratio) / log(high/low)
  std::optional<double> encrypt_ratio;
  std::optional<double> encrypt_exponent;
};

/// Growth-rate bounds for decryption time against key length. For a doubling
/// of the key these are the ratios 4 and 12.
inline constexpr double kMinDecryptExponent = 2.0;
inline constexpr double kMaxDecryptExponent = 3.584962500721156;  // log2(12)

/// Compares the 2048- and 4096-bit records when both exist, otherwise the
/// shortest and longest key lengths present. Decrypt growth must lie within
/// the exponent bounds above and, when encrypt records exist, encrypt must
/// grow strictly slower. Throws InvalidArgument when fewer than two key
/// lengths have decrypt records or a (phase, bits) pair repeats, and
/// TrendViolation quoting the measured ratios otherwise.
TrendReport trend_check(std::span<const BenchRecord> records);

/// Header: variant,bits,keys,threads,file_bytes,phase,median_s,repetitions
std::string records_to_csv(std::span<const BenchRecord> records);
std::string records_to_json(std::span<const BenchRecord> records, std::span<const SpeedupReport> speedups = {},
                            const std::optional<TrendReport>& trend = std::nullopt);

}  // namespace pmkrsa
