#include "pmkrsa/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "pmkrsa/error.hpp"
#include "pmkrsa/keystore.hpp"
#include "pmkrsa/modmath.hpp"
#include "pmkrsa/parallel.hpp"
#include "pmkrsa/rsa_variants.hpp"
#include "pmkrsa/scheme.hpp"

namespace pmkrsa {

namespace {

double median(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  return samples.size() % 2 == 1 ? samples[mid] : (samples[mid - 1] + samples[mid]) / 2.0;
}

double time_once(const std::function<void()>& body) {
  const auto start = std::chrono::steady_clock::now();
  body();
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  return elapsed.count();
}

double timed_median(const BenchOptions& options, const std::function<void()>& body) {
  for (int w = 0; w < options.warmup; ++w) body();
  std::vector<double> samples;
  for (int r = 0; r < options.repetitions; ++r) samples.push_back(time_once(body));
  return median(std::move(samples));
}

// One single-key baseline: RSA over sentinel-prefixed cells, no blinding.
struct SingleKeyCodec {
  KeyBundle layout_bundle;  // one row, used for chunking
  MontgomeryContext ctx;
  std::function<BigUint(const BigUint&)> decrypt_cell;

  std::vector<BigUint> encrypt(std::span<const std::uint8_t> file, const ParallelConfig& parallel) const {
    const ChunkGrid grid = chunk(file, layout_bundle);
    const BigUint& e = layout_bundle.rows.front().e;
    return par_map_index(grid.k(), [&](std::size_t t) { return ctx.pow(grid.cells[t], e); }, parallel);
  }

  std::vector<BigUint> decrypt(const std::vector<BigUint>& cells, const ParallelConfig& parallel) const {
    return par_map_index(cells.size(), [&](std::size_t t) { return decrypt_cell(cells[t]); }, parallel);
  }
};

SingleKeyCodec make_codec(const VariantSpec& variant, std::uint32_t bits, RandomSource& rng) {
  if (variant.kind == Variant::Multiprime) {
    auto decryptor = std::make_shared<MultiPrimeDecryptor>(gen_multiprime(bits, variant.primes, rng));
    KeyPair pair = decryptor->key().as_keypair();
    return SingleKeyCodec{KeyBundle{bits, {pair}}, MontgomeryContext(pair.n),
                          [decryptor](const BigUint& c) { return decryptor->decrypt(c); }};
  }
  KeyPair pair = gen_keypair(bits, rng);
  if (variant.kind == Variant::Crt) {
    auto decryptor = std::make_shared<CrtDecryptor>(pair);
    return SingleKeyCodec{KeyBundle{bits, {pair}}, MontgomeryContext(pair.n),
                          [decryptor](const BigUint& c) { return decryptor->decrypt(c); }};
  }
  auto ctx = std::make_shared<MontgomeryContext>(pair.n);
  const BigUint d = pair.d;
  return SingleKeyCodec{KeyBundle{bits, {pair}}, *ctx, [ctx, d](const BigUint& c) { return ctx->pow(c, d); }};
}

BenchRecord record_for(const BenchConfig& cfg, Phase phase, double median_s, int reps) {
  BenchRecord rec;
  rec.variant = cfg.variant.name();
  rec.bits = cfg.bits;
  rec.keys = cfg.variant.kind == Variant::Pmkrsa ? cfg.keys : 1;
  rec.threads = cfg.threads;
  rec.file_bytes = cfg.file_bytes;
  rec.phase = phase;
  rec.median_s = median_s;
  rec.repetitions = reps;
  return rec;
}

void check_roundtrip(bool ok, const BenchConfig& cfg) {
  if (!ok) throw Error(ErrorCode::Internal, "round trip failed for " + cfg.variant.name());
}

void run_pmkrsa(const BenchConfig& cfg, const BenchOptions& options, RandomSource& rng,
                std::span<const std::uint8_t> file, const ParallelConfig& parallel, std::vector<BenchRecord>& out) {
  KeygenOptions keygen;
  keygen.parallel = parallel;
  KeyBundle bundle;
  auto generate = [&] { bundle = gen_bundle(cfg.keys, cfg.bits, rng, keygen); };
  if (options.time_keygen) {
    out.push_back(record_for(cfg, Phase::Keygen, timed_median(options, generate), options.repetitions));
  } else {
    generate();
  }

  CipherPack pack;
  out.push_back(record_for(cfg, Phase::Encrypt,
                           timed_median(options, [&] { pack = encrypt(file, bundle, rng, parallel); }),
                           options.repetitions));
  std::vector<std::uint8_t> plain;
  DecryptOptions dec;
  dec.parallel = parallel;
  out.push_back(record_for(cfg, Phase::Decrypt, timed_median(options, [&] { plain = decrypt(pack, bundle, dec); }),
                           options.repetitions));
  check_roundtrip(std::equal(plain.begin(), plain.end(), file.begin(), file.end()), cfg);
}

void run_single_key(const BenchConfig& cfg, const BenchOptions& options, RandomSource& rng,
                    std::span<const std::uint8_t> file, const ParallelConfig& parallel,
                    std::vector<BenchRecord>& out) {
  std::optional<SingleKeyCodec> codec;
  auto generate = [&] { codec.emplace(make_codec(cfg.variant, cfg.bits, rng)); };
  if (options.time_keygen) {
    out.push_back(record_for(cfg, Phase::Keygen, timed_median(options, generate), options.repetitions));
  } else {
    generate();
  }

  std::vector<BigUint> cipher;
  out.push_back(record_for(cfg, Phase::Encrypt, timed_median(options, [&] { cipher = codec->encrypt(file, parallel); }),
                           options.repetitions));
  std::vector<BigUint> plain;
  out.push_back(record_for(cfg, Phase::Decrypt,
                           timed_median(options, [&] { plain = codec->decrypt(cipher, parallel); }),
                           options.repetitions));
  check_roundtrip(plain == chunk(file, codec->layout_bundle).cells, cfg);
}

}  // namespace

VariantSpec VariantSpec::parse(std::string_view text) {
  if (text == "pmkrsa") return {Variant::Pmkrsa, 2};
  if (text == "rsa") return {Variant::Rsa, 2};
  if (text == "crt") return {Variant::Crt, 2};
  constexpr std::string_view prefix = "multiprime:";
  if (text.starts_with(prefix)) {
    const std::string_view digits = text.substr(prefix.size());
    std::size_t b = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), b);
    if (ec == std::errc{} && end == digits.data() + digits.size() && b >= 2) return {Variant::Multiprime, b};
    throw Error(ErrorCode::InvalidArgument, "multiprime needs an integer b >= 2, got '" + std::string(digits) + "'");
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown variant '" + std::string(text) + "' (expected pmkrsa, rsa, crt or multiprime:b)");
}

std::string VariantSpec::name() const {
  switch (kind) {
    case Variant::Pmkrsa: return "pmkrsa";
    case Variant::Rsa: return "rsa";
    case Variant::Crt: return "crt";
    case Variant::Multiprime: return "multiprime:" + std::to_string(primes);
  }
  return "unknown";
}

std::string_view phase_name(Phase phase) noexcept {
  switch (phase) {
    case Phase::Keygen: return "keygen";
    case Phase::Encrypt: return "encrypt";
    case Phase::Decrypt: return "decrypt";
  }
  return "unknown";
}

std::vector<BenchRecord> run_suite(std::span<const BenchConfig> configs, const BenchOptions& options,
                                   RandomSource& rng) {
  if (options.repetitions < 3) throw Error(ErrorCode::InvalidArgument, "at least 3 repetitions are required");
  if (options.warmup < 0) throw Error(ErrorCode::InvalidArgument, "warm-up count must be non-negative");
  std::vector<BenchRecord> out;
  for (const auto& cfg : configs) {
    if (cfg.keys < 1) throw Error(ErrorCode::InvalidArgument, "keys must be >= 1");
    std::vector<std::uint8_t> file(static_cast<std::size_t>(cfg.file_bytes));
    rng.fill(file);
    ParallelConfig parallel;
    parallel.workers = cfg.threads;
    if (cfg.variant.kind == Variant::Pmkrsa) {
      run_pmkrsa(cfg, options, rng, file, parallel, out);
    } else {
      run_single_key(cfg, options, rng, file, parallel, out);
    }
  }
  return out;
}

SpeedupReport speedup(const BenchRecord& baseline, const BenchRecord& candidate) {
  if (baseline.bits != candidate.bits || baseline.file_bytes != candidate.file_bytes ||
      baseline.phase != candidate.phase) {
    throw Error(ErrorCode::MismatchedConfigs, "speed-up needs matching bits, file size and phase");
  }
  if (!(candidate.median_s > 0.0)) throw Error(ErrorCode::InvalidArgument, "candidate time must be positive");
  return SpeedupReport{baseline, candidate, baseline.median_s / candidate.median_s};
}

TrendReport trend_check(std::span<const BenchRecord> records) {
  std::map<std::uint32_t, double> decrypt;
  std::map<std::uint32_t, double> encrypt;
  for (const auto& rec : records) {
    auto* table = rec.phase == Phase::Decrypt ? &decrypt : rec.phase == Phase::Encrypt ? &encrypt : nullptr;
    if (table == nullptr) continue;
    if (!table->emplace(rec.bits, rec.median_s).second) {
      throw Error(ErrorCode::InvalidArgument, "more than one " + std::string(phase_name(rec.phase)) +
                                                  " record at " + std::to_string(rec.bits) + " bits");
    }
  }
  if (decrypt.size() < 2) throw Error(ErrorCode::InvalidArgument, "trend check needs decrypt records at two key lengths");

  TrendReport report;
  if (decrypt.contains(2048) && decrypt.contains(4096)) {
    report.low_bits = 2048;
    report.high_bits = 4096;
  } else {
    report.low_bits = decrypt.begin()->first;
    report.high_bits = decrypt.rbegin()->first;
  }
  const double scale = std::log(static_cast<double>(report.high_bits) / report.low_bits);
  report.decrypt_ratio = decrypt.at(report.high_bits) / decrypt.at(report.low_bits);
  report.decrypt_exponent = std::log(report.decrypt_ratio) / scale;
  if (encrypt.contains(report.low_bits) && encrypt.contains(report.high_bits)) {
    report.encrypt_ratio = encrypt.at(report.high_bits) / encrypt.at(report.low_bits);
    report.encrypt_exponent = std::log(*report.encrypt_ratio) / scale;
  }

  std::ostringstream why;
  why << "decrypt " << report.high_bits << "/" << report.low_bits << " ratio " << report.decrypt_ratio
      << " (growth exponent " << report.decrypt_exponent << ")";
  if (report.encrypt_ratio) why << ", encrypt ratio " << *report.encrypt_ratio;
  const bool decrypt_ok = std::isfinite(report.decrypt_exponent) &&
                          report.decrypt_exponent >= kMinDecryptExponent &&
                          report.decrypt_exponent <= kMaxDecryptExponent;
  const bool encrypt_ok = !report.encrypt_ratio || *report.encrypt_ratio < report.decrypt_ratio;
  if (!decrypt_ok || !encrypt_ok) throw Error(ErrorCode::TrendViolation, why.str());
  return report;
}

std::string records_to_csv(std::span<const BenchRecord> records) {
  std::ostringstream out;
  out << "variant,bits,keys,threads,file_bytes,phase,median_s,repetitions\n";
  out.precision(9);
  for (const auto& r : records) {
    out << r.variant << ',' << r.bits << ',' << r.keys << ',' << r.threads << ',' << r.file_bytes << ','
        << phase_name(r.phase) << ',' << std::fixed << r.median_s << std::defaultfloat << ',' << r.repetitions
        << '\n';
  }
  return out.str();
}

namespace {

nlohmann::json record_json(const BenchRecord& r) {
  return {{"variant", r.variant},       {"bits", r.bits},
          {"keys", r.keys},             {"threads", r.threads},
          {"file_bytes", r.file_bytes}, {"phase", std::string(phase_name(r.phase))},
          {"median_s", r.median_s},     {"repetitions", r.repetitions}};
}

}  // namespace

std::string records_to_json(std::span<const BenchRecord> records, std::span<const SpeedupReport> speedups,
                            const std::optional<TrendReport>& trend) {
  nlohmann::json doc;
  doc["records"] = nlohmann::json::array();
  for (const auto& r : records) doc["records"].push_back(record_json(r));
  doc["speedups"] = nlohmann::json::array();
  for (const auto& s : speedups) {
    doc["speedups"].push_back(
        {{"baseline", record_json(s.baseline)}, {"candidate", record_json(s.candidate)}, {"ratio", s.ratio}});
  }
  if (trend) {
    nlohmann::json t = {{"low_bits", trend->low_bits},
                        {"high_bits", trend->high_bits},
                        {"decrypt_ratio", trend->decrypt_ratio},
                        {"decrypt_exponent", trend->decrypt_exponent}};
    if (trend->encrypt_ratio) {
      t["encrypt_ratio"] = *trend->encrypt_ratio;
      t["encrypt_exponent"] = *trend->encrypt_exponent;
    }
    doc["trend"] = t;
  }
  return doc.dump(2);
}

}  // namespace pmkrsa
