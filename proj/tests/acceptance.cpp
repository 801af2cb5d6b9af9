// Acceptance gates. One line per criterion:
//
//   [PASS] 1 round-trip ... (detail)
//
// Every tolerance and budget is a named constant below. The binary exits
// non-zero when any selected criterion fails; N/A counts as not failing.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pmkrsa/bench.hpp"
#include "pmkrsa/container.hpp"
#include "pmkrsa/keystore.hpp"
#include "pmkrsa/modmath.hpp"
#include "pmkrsa/rsa_variants.hpp"
#include "pmkrsa/scheme.hpp"
#include "pmkrsa/selftest.hpp"
#include "support.hpp"

using namespace pmkrsa;

namespace {

// Budgets in seconds.
constexpr double kRoundTripBudget = 300.0;
constexpr double kMontgomeryBudget = 120.0;
constexpr double kPowBudget = 60.0;
constexpr double kCrtBudget = 120.0;

// Case counts.
constexpr int kRoundTripMessages = 1000;
constexpr std::size_t kMaxMessageBytes = 64 * 1024;
constexpr int kMontgomeryCases = 100000;
constexpr std::size_t kMontgomeryMaxBits = 4096;
constexpr int kPowCases = 1000;
constexpr unsigned kPowMaxExponent = 1000;
constexpr int kCrtCases = 1000;
constexpr int kEncryptionsForDistinctness = 100;
constexpr int kFuzzCases = 1000000;
constexpr int kContainerRoundTrips = 1000;

// Timing gates.
constexpr int kBenchRepetitions = 5;
constexpr double kMultiprimeMinSpeedup = 1.3;
constexpr double kMultiprimeMaxSpeedup = 3.5;
constexpr std::uint64_t kMultiprimeFileBytes = 16 * 1024;
constexpr unsigned kParallelMinCores = 4;
constexpr double kParallelMaxFraction = 0.6;
constexpr std::uint64_t kParallelFileBytes = 1024 * 1024;
constexpr double kKeyLengthMinRatio = 4.0;
constexpr double kKeyLengthMaxRatio = 12.0;
constexpr std::size_t kKeyLengthCells = 64;
constexpr double kEncryptMaxFraction = 0.2;
constexpr std::uint64_t kOrderingFileBytes = 32 * 1024;

enum class Status { Pass, Fail, NotApplicable };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome pass_if(bool ok, std::string detail) { return {ok ? Status::Pass : Status::Fail, std::move(detail)}; }

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

std::vector<std::uint8_t> random_message(RandomSource& rng, std::size_t len) {
  std::vector<std::uint8_t> out(len);
  rng.fill(out);
  return out;
}

// 1 -------------------------------------------------------------------------

Outcome round_trip() {
  const auto start = Clock::now();
  auto rng = testing::seeded(101);
  struct Setup {
    std::uint32_t bits;
    std::size_t rows;
    KeyBundle bundle;
    KeyBundle pub;
  };
  std::vector<Setup> setups;
  for (std::uint32_t bits : {512u, 1024u, 2048u}) {
    for (std::size_t rows : {1u, 4u, 16u}) {
      KeyBundle bundle = gen_bundle(rows, bits, rng);
      KeyBundle pub = bundle.public_part();
      setups.push_back({bits, rows, std::move(bundle), std::move(pub)});
    }
  }
  int failures = 0;
  std::uint64_t bytes = 0;
  for (int i = 0; i < kRoundTripMessages; ++i) {
    const Setup& s = setups[static_cast<std::size_t>(i) % setups.size()];
    const auto len = static_cast<std::size_t>(rng.next_u64() % (kMaxMessageBytes + 1));
    const auto message = random_message(rng, len);
    bytes += len;
    const auto wire = write_container(encrypt(message, s.pub, rng));
    if (decrypt(parse_container(wire), s.bundle) != message) {
      ++failures;
      std::fprintf(stderr, "round trip mismatch: message %d, %u bits, %zu rows, %zu bytes\n", i, s.bits, s.rows,
                   len);
    }
  }
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << kRoundTripMessages << " messages, " << bytes << " bytes, " << failures << " mismatches, "
         << fmt("%.1f s", elapsed) << " (budget " << kRoundTripBudget << " s)";
  return pass_if(failures == 0 && elapsed < kRoundTripBudget, detail.str());
}

// 2 -------------------------------------------------------------------------

Outcome montgomery_oracle() {
  const auto start = Clock::now();
  auto rng = testing::seeded(102);
  int mismatches = 0;
  for (int i = 0; i < kMontgomeryCases; ++i) {
    const std::size_t bits = 2 + rng.next_u64() % (kMontgomeryMaxBits - 1);
    const BigUint n = testing::odd_modulus(rng, bits);
    if (n <= BigUint(2)) continue;
    // Every tenth case uses a radix that is not a whole number of limbs.
    const bool unaligned = i % 10 == 0;
    const MontgomeryContext ctx = unaligned ? MontgomeryContext(n, bits + rng.next_u64() % 70) : MontgomeryContext(n);
    const BigUint a = random_below(rng, n);
    const BigUint b = random_below(rng, n);
    const BigUint got = ctx.from_montgomery(ctx.multiply(ctx.to_montgomery(a), ctx.to_montgomery(b)));
    testing::Mpz ref;
    mpz_mul(ref.get(), testing::Mpz(a).get(), testing::Mpz(b).get());
    mpz_mod(ref.get(), ref.get(), testing::Mpz(n).get());
    if (got != mod_mul_plain(a, b, n) || got != ref.big()) ++mismatches;
  }
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << kMontgomeryCases << " cases up to " << kMontgomeryMaxBits << " bits, " << mismatches << " mismatches, "
         << fmt("%.1f s", elapsed) << " (budget " << kMontgomeryBudget << " s)";
  return pass_if(mismatches == 0 && elapsed < kMontgomeryBudget, detail.str());
}

// 3 -------------------------------------------------------------------------

Outcome pow_oracle() {
  const auto start = Clock::now();
  auto rng = testing::seeded(103);
  int mismatches = 0;
  for (int i = 0; i < kPowCases; ++i) {
    const std::size_t bits = 2 + rng.next_u64() % 1023;
    const BigUint n = testing::exact_bits(rng, bits);  // odd and even moduli
    const BigUint x = random_bits(rng, bits + 8);      // not necessarily reduced
    const unsigned e = static_cast<unsigned>(rng.next_u64() % (kPowMaxExponent + 1));
    BigUint iterated = BigUint(1) % n;
    const BigUint base = x % n;
    for (unsigned k = 0; k < e; ++k) iterated = mod_mul_plain(iterated, base, n);
    if (mod_pow(x, BigUint(e), n) != iterated) ++mismatches;
  }
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << kPowCases << " cases, e <= " << kPowMaxExponent << ", " << mismatches << " mismatches, "
         << fmt("%.1f s", elapsed) << " (budget " << kPowBudget << " s)";
  return pass_if(mismatches == 0 && elapsed < kPowBudget, detail.str());
}

// 4 -------------------------------------------------------------------------

Outcome crt_equivalence() {
  const auto start = Clock::now();
  auto rng = testing::seeded(104);
  std::vector<KeyPair> keys;
  for (std::uint32_t bits : {256u, 512u, 768u, 1024u, 2048u}) keys.push_back(gen_keypair(bits, rng));
  std::vector<MultiPrimeKey> multi;
  for (std::uint32_t bits : {512u, 1024u, 2048u}) {
    for (std::size_t b : {2u, 3u, 4u}) multi.push_back(gen_multiprime(bits, b, rng));
  }

  // GMP powm is the independent reference for rsa_decrypt itself.
  auto reference = [](const BigUint& c, const BigUint& d, const BigUint& n) {
    testing::Mpz out;
    mpz_powm(out.get(), testing::Mpz(c).get(), testing::Mpz(d).get(), testing::Mpz(n).get());
    return out.big();
  };

  int crt_bad = 0;
  for (int i = 0; i < kCrtCases; ++i) {
    const KeyPair& key = keys[static_cast<std::size_t>(i) % keys.size()];
    const BigUint c = random_below(rng, key.n);
    const BigUint plain = rsa_decrypt(c, key);
    if (plain != reference(c, key.d, key.n) || crt_decrypt(c, CrtPrivate::from_keypair(key), key.n) != plain) {
      ++crt_bad;
    }
  }
  int multi_bad = 0;
  for (int i = 0; i < kCrtCases; ++i) {
    const MultiPrimeKey& key = multi[static_cast<std::size_t>(i) % multi.size()];
    const BigUint c = random_below(rng, key.n);
    const BigUint plain = rsa_decrypt(c, key.as_keypair());
    if (plain != reference(c, key.d, key.n) || multiprime_decrypt(c, key) != plain) ++multi_bad;
  }
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "crt " << crt_bad << "/" << kCrtCases << " mismatches, multiprime " << multi_bad << "/" << kCrtCases
         << " mismatches, " << fmt("%.1f s", elapsed) << " (budget " << kCrtBudget << " s)";
  return pass_if(crt_bad == 0 && multi_bad == 0 && elapsed < kCrtBudget, detail.str());
}

// 5 -------------------------------------------------------------------------

std::vector<std::uint8_t> read_fixture(const std::string& name) {
  std::ifstream in(std::string(PMKRSA_FIXTURE_DIR) + "/" + name, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome fixtures() {
  std::vector<std::string> failed;
  auto expect = [&](bool ok, const char* what) {
    if (!ok) failed.emplace_back(what);
  };

  const KeyPair toy = KeyPair::from_primes(61, 53, 17);
  expect(toy.n == BigUint(3233) && toy.d == BigUint(2753), "toy key is N=3233, d=2753");
  expect(rsa_encrypt(65, toy) == BigUint(2790), "encrypt(65) = 2790");
  expect(rsa_decrypt(2790, toy) == BigUint(65), "decrypt(2790) = 65");

  const KeyBundle bundle{16, {toy}};
  ChunkGrid grid;
  grid.cells = {BigUint(65)};
  grid.rows = 1;
  grid.payload_bytes = 1;
  grid.total_len = 1;
  const CipherPack pack = encrypt_with_blinds(grid, BlindMatrix{{BigUint(2)}}, bundle);
  expect(pack.c_star == std::vector<BigUint>{3017}, "c* = 3017");
  expect(pack.c_r == std::vector<BigUint>{1752}, "c_r = 1752");
  expect(decrypt_cells(pack, bundle) == std::vector<BigUint>{65}, "cell decrypts to 65");
  expect(write_container(pack) == read_fixture("toy.pmk1"), "container bytes match toy.pmk1");

  const MontgomeryContext ctx(17, 5);
  expect(ctx.n_prime() == BigUint(15), "n' = 15");
  expect(ctx.to_montgomery(7) == BigUint(3) && ctx.to_montgomery(15) == BigUint(4), "7 -> 3, 15 -> 4");
  expect(ctx.multiply(3, 4) == BigUint(11), "REDC(3 * 4) = 11");
  expect(ctx.from_montgomery(11) == BigUint(3), "from_mont(11) = 3");

  const auto builtin = run_selftest(builtin_vectors());
  expect(builtin.all_passed(), "builtin vector set");
  const auto file = read_fixture("vectors.json");
  const auto external = run_selftest(std::string_view(reinterpret_cast<const char*>(file.data()), file.size()),
                                     "vectors.json");
  expect(external.all_passed() && external.results.size() == builtin.results.size(), "vectors.json");

  std::string detail = std::to_string(builtin.results.size()) + " vectors plus hand traces";
  for (const auto& f : failed) detail += "; FAILED " + f;
  return pass_if(failed.empty(), detail);
}

// 6 -------------------------------------------------------------------------

Outcome nondeterminism() {
  auto key_rng = testing::seeded(106);
  const KeyBundle bundle = gen_bundle(4, 1024, key_rng).public_part();
  const auto message = random_message(key_rng, 4096);
  OsEntropy entropy;
  std::set<std::vector<BigUint>> seen;
  for (int i = 0; i < kEncryptionsForDistinctness; ++i) seen.insert(encrypt(message, bundle, entropy).c_star);
  return pass_if(static_cast<int>(seen.size()) == kEncryptionsForDistinctness,
                 std::to_string(seen.size()) + " distinct c* lists from " +
                     std::to_string(kEncryptionsForDistinctness) + " encryptions");
}

// Timing helpers ------------------------------------------------------------

const BenchRecord& find(const std::vector<BenchRecord>& records, std::string_view variant, std::uint32_t bits,
                        Phase phase) {
  for (const auto& r : records) {
    if (r.variant == variant && r.bits == bits && r.phase == phase) return r;
  }
  throw Error(ErrorCode::Internal, "missing bench record");
}

BenchOptions timing_options(int repetitions) {
  BenchOptions options;
  options.repetitions = repetitions;
  options.warmup = 1;
  options.time_keygen = false;
  return options;
}

// 7 -------------------------------------------------------------------------

Outcome multiprime_trend() {
  auto rng = testing::seeded(107);
  std::vector<BenchConfig> configs;
  for (const char* v : {"rsa", "crt", "multiprime:3"}) {
    configs.push_back({VariantSpec::parse(v), 2048, 1, 1, kMultiprimeFileBytes});
  }
  const auto records = run_suite(configs, timing_options(kBenchRepetitions), rng);
  const auto& multi = find(records, "multiprime:3", 2048, Phase::Decrypt);
  const double over_textbook = speedup(find(records, "rsa", 2048, Phase::Decrypt), multi).ratio;
  const double over_crt = speedup(find(records, "crt", 2048, Phase::Decrypt), multi).ratio;
  std::ostringstream detail;
  detail << "speed-up over textbook " << fmt("%.3f", over_textbook) << " (gate [" << kMultiprimeMinSpeedup << ", "
         << kMultiprimeMaxSpeedup << "]), over two-prime CRT " << fmt("%.3f", over_crt) << ", median of "
         << kBenchRepetitions;
  return pass_if(over_textbook >= kMultiprimeMinSpeedup && over_textbook <= kMultiprimeMaxSpeedup, detail.str());
}

// 8 -------------------------------------------------------------------------

Outcome parallel_trend() {
  const unsigned cores = std::thread::hardware_concurrency();
  if (cores < kParallelMinCores) {
    return {Status::NotApplicable, "host reports " + std::to_string(cores) + " core(s), gate needs " +
                                       std::to_string(kParallelMinCores)};
  }
  auto rng = testing::seeded(108);
  const KeyBundle bundle = gen_bundle(16, 2048, rng);
  const auto file = random_message(rng, kParallelFileBytes);
  auto wall = [&](unsigned threads) {
    ParallelConfig parallel;
    parallel.workers = threads;
    DecryptOptions dec;
    dec.parallel = parallel;
    std::vector<double> samples;
    for (int rep = 0; rep < 3; ++rep) {
      const auto start = Clock::now();
      const auto plain = decrypt(encrypt(file, bundle, rng, parallel), bundle, dec);
      samples.push_back(seconds_since(start));
      if (plain != file) throw Error(ErrorCode::Internal, "parallel round trip failed");
    }
    std::sort(samples.begin(), samples.end());
    return samples[1];
  };
  const double one = wall(1);
  const double four = wall(4);
  std::ostringstream detail;
  detail << "1 thread " << fmt("%.2f s", one) << ", 4 threads " << fmt("%.2f s", four) << ", fraction "
         << fmt("%.3f", four / one) << " (gate <= " << kParallelMaxFraction << ")";
  return pass_if(four <= kParallelMaxFraction * one, detail.str());
}

// 9 -------------------------------------------------------------------------

Outcome key_length_trend() {
  auto rng = testing::seeded(109);
  // Equal cell counts at both lengths, so the ratio is the per-cell cost
  // ratio. Repetitions alternate between the lengths so that drift in host
  // speed lands on both sides.
  struct Side {
    KeyBundle bundle;
    std::vector<std::uint8_t> file;
    CipherPack pack;
    std::vector<double> samples;
  };
  std::vector<Side> sides;
  for (std::uint32_t bits : {2048u, 4096u}) {
    Side side;
    side.bundle = gen_bundle(4, bits, rng);
    side.file = random_message(rng, kKeyLengthCells * payload_bytes(bits));
    side.pack = encrypt(side.file, side.bundle, rng);
    sides.push_back(std::move(side));
  }
  DecryptOptions dec;
  dec.parallel.workers = 1;
  for (int rep = 0; rep <= kBenchRepetitions; ++rep) {
    for (auto& side : sides) {
      const auto start = Clock::now();
      const auto plain = decrypt(side.pack, side.bundle, dec);
      const double elapsed = seconds_since(start);
      if (plain != side.file) throw Error(ErrorCode::Internal, "key-length round trip failed");
      if (rep > 0) side.samples.push_back(elapsed);  // first pass is warm-up
    }
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  const double low = median(sides[0].samples);
  const double high = median(sides[1].samples);
  const double ratio = high / low;
  std::ostringstream detail;
  detail << "decrypt 2048 " << fmt("%.3f s", low) << ", 4096 " << fmt("%.3f s", high) << ", ratio "
         << fmt("%.2f", ratio) << " (gate [" << kKeyLengthMinRatio << ", " << kKeyLengthMaxRatio << "]), "
         << kKeyLengthCells << " cells each, median of " << kBenchRepetitions;
  return pass_if(ratio >= kKeyLengthMinRatio && ratio <= kKeyLengthMaxRatio, detail.str());
}

// 10 ------------------------------------------------------------------------

Outcome encrypt_ordering() {
  auto rng = testing::seeded(110);
  const std::vector<BenchConfig> configs{{VariantSpec::parse("pmkrsa"), 2048, 16, 1, kOrderingFileBytes}};
  const auto records = run_suite(configs, timing_options(kBenchRepetitions), rng);
  const double enc = find(records, "pmkrsa", 2048, Phase::Encrypt).median_s;
  const double dec = find(records, "pmkrsa", 2048, Phase::Decrypt).median_s;
  std::ostringstream detail;
  detail << "encrypt " << fmt("%.4f s", enc) << ", decrypt " << fmt("%.4f s", dec) << ", fraction "
         << fmt("%.4f", enc / dec) << " (gate < " << kEncryptMaxFraction << ")";
  return pass_if(enc < kEncryptMaxFraction * dec, detail.str());
}

// 11 ------------------------------------------------------------------------

CipherPack random_pack(RandomSource& rng) {
  CipherPack pack;
  pack.layout.bits = static_cast<std::uint32_t>(1 + rng.next_u64() % 1100);
  pack.layout.rows = static_cast<std::uint16_t>(1 + rng.next_u64() % 40);
  pack.layout.total_len = rng.next_u64() % 1000000;
  const std::size_t k = rng.next_u64() % 10;
  for (std::size_t t = 0; t < k; ++t) {
    pack.c_star.push_back(random_bits(rng, pack.layout.bits));
    pack.c_r.push_back(random_bits(rng, pack.layout.bits));
  }
  return pack;
}

bool is_format_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadMagic:
    case ErrorCode::UnsupportedVersion:
    case ErrorCode::TruncatedBody:
    case ErrorCode::TrailingGarbage:
    case ErrorCode::LayoutMismatch:
      return true;
    default:
      return false;
  }
}

void mutate(std::vector<std::uint8_t>& bytes, RandomSource& rng) {
  const int edits = 1 + static_cast<int>(rng.next_u64() % 4);
  for (int e = 0; e < edits; ++e) {
    const std::uint64_t r = rng.next_u64();
    switch (r % 6) {
      case 0:  // bit flip
        if (!bytes.empty()) bytes[(r >> 8) % bytes.size()] ^= static_cast<std::uint8_t>(1U << ((r >> 4) % 8));
        break;
      case 1:  // truncate
        bytes.resize(bytes.empty() ? 0 : (r >> 8) % bytes.size());
        break;
      case 2:  // append junk
        for (std::uint64_t i = 0; i < 1 + (r >> 8) % 16; ++i) bytes.push_back(static_cast<std::uint8_t>(rng.next_u64()));
        break;
      case 3:  // overwrite a header byte
        if (!bytes.empty()) bytes[(r >> 8) % std::min<std::size_t>(bytes.size(), kContainerHeaderSize)] =
            static_cast<std::uint8_t>(r >> 32);
        break;
      case 4:  // extreme cell count or width
        if (bytes.size() >= kContainerHeaderSize) {
          const std::size_t at = (r & 0x100) ? 11 : 5;
          for (std::size_t i = 0; i < 4; ++i) bytes[at + i] = static_cast<std::uint8_t>((r >> (16 + 8 * i)) | 0x80);
        }
        break;
      default:  // replace with random bytes
        bytes.assign((r >> 8) % 64, 0);
        rng.fill(bytes);
        break;
    }
  }
}

Outcome parser_robustness() {
  auto rng = testing::seeded(111);
  std::vector<std::vector<std::uint8_t>> seeds;
  for (int i = 0; i < 64; ++i) seeds.push_back(write_container(random_pack(rng)));

  int accepted = 0;
  int typed = 0;
  int untyped = 0;
  for (int i = 0; i < kFuzzCases; ++i) {
    auto bytes = seeds[static_cast<std::size_t>(i) % seeds.size()];
    mutate(bytes, rng);
    try {
      const CipherPack pack = parse_container(bytes);
      // Anything accepted must re-serialise to the same bytes.
      if (write_container(pack) != bytes) ++untyped;
      ++accepted;
    } catch (const Error& e) {
      if (is_format_error(e.code())) {
        ++typed;
      } else {
        ++untyped;
      }
    } catch (...) {
      ++untyped;
    }
  }

  int identity_failures = 0;
  for (int i = 0; i < kContainerRoundTrips; ++i) {
    const CipherPack pack = random_pack(rng);
    if (parse_container(write_container(pack)) != pack) ++identity_failures;
  }
  std::ostringstream detail;
  detail << kFuzzCases << " mutated inputs: " << typed << " typed rejections, " << accepted << " accepted, " << untyped
         << " untyped or non-canonical; " << identity_failures << "/" << kContainerRoundTrips
         << " parse(write) identity failures";
  return pass_if(untyped == 0 && identity_failures == 0, detail.str());
}

// 12 ------------------------------------------------------------------------

// Independent of the library: 64-bit trial division and extended Euclid.
std::uint64_t smallest_factor(std::uint64_t n) {
  if (n % 2 == 0) return 2;
  for (std::uint64_t f = 3; f * f <= n; f += 2) {
    if (n % f == 0) return f;
  }
  return n;
}

std::uint64_t inverse_u64(std::uint64_t a, std::uint64_t m) {
  __extension__ typedef __int128 I128;
  I128 r0 = m, r1 = a % m, t0 = 0, t1 = 1;
  while (r1 != 0) {
    const I128 q = r0 / r1;
    const I128 r2 = r0 - q * r1;
    r0 = r1;
    r1 = r2;
    const I128 t2 = t0 - q * t1;
    t0 = t1;
    t1 = t2;
  }
  if (r0 != 1) return 0;
  return static_cast<std::uint64_t>(t0 < 0 ? t0 + m : t0);
}

Outcome toy_attack() {
  auto rng = testing::seeded(112);
  const KeyBundle victim = gen_bundle(4, 32, rng);
  const KeyBundle published = victim.public_part();
  const std::string secret = "toy-scale moduli fall to trial division";
  const std::vector<std::uint8_t> message(secret.begin(), secret.end());
  const CipherPack intercepted = parse_container(write_container(encrypt(message, published, rng)));

  KeyBundle recovered{published.bits, {}};
  for (const KeyPair& row : published.rows) {
    const std::uint64_t n = row.n.low_u64();
    const std::uint64_t p = smallest_factor(n);
    const std::uint64_t q = n / p;
    const std::uint64_t e = row.e.low_u64();
    const std::uint64_t d = inverse_u64(e, (p - 1) * (q - 1));
    if (p == n || d == 0) return {Status::Fail, "could not factor N = " + std::to_string(n)};
    KeyPair pair = row;
    pair.p = p;
    pair.q = q;
    pair.d = d;
    recovered.rows.push_back(pair);
  }
  const auto plain = decrypt(intercepted, recovered);
  const std::string got(plain.begin(), plain.end());
  return pass_if(got == secret, std::to_string(recovered.rows.size()) + " 32-bit moduli factored; recovered \"" +
                                    got + "\"");
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "round-trip correctness", round_trip},
      {2, "Montgomery oracle equivalence", montgomery_oracle},
      {3, "exponentiation oracle", pow_oracle},
      {4, "CRT and multi-prime equivalence", crt_equivalence},
      {5, "fixture vectors", fixtures},
      {6, "ciphertext non-determinism", nondeterminism},
      {7, "multi-prime speed-up trend", multiprime_trend},
      {8, "parallel scaling trend", parallel_trend},
      {9, "key-length trend", key_length_trend},
      {10, "encrypt much faster than decrypt", encrypt_ordering},
      {11, "container parser robustness", parser_robustness},
      {12, "toy-scale factoring attack", toy_attack},
  };
  return all;
}

const char* label(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::NotApplicable: return "N/A ";
  }
  return "????";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance gates"};
  std::vector<int> only;
  app.add_option("--only", only, "criterion numbers to run (default: all)")->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);

  bool failed = false;
  for (const auto& c : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome outcome{Status::Fail, ""};
    const auto start = Clock::now();
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {Status::Fail, std::string("exception: ") + e.what()};
    }
    failed = failed || outcome.status == Status::Fail;
    std::printf("[%s] %2d %s: %s [%.1f s]\n", label(outcome.status), c.id, c.title, outcome.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
