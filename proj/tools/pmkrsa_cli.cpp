// pmkrsa command-line tool. Links only the C interface.

#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmkrsa/pmkrsa.h"

namespace fs = std::filesystem;

namespace {

constexpr int kInvalidArgument = PMKRSA_E_INVALID_ARGUMENT;
constexpr int kIo = PMKRSA_E_IO;

struct Failure {
  int status;
  std::string message;
};

void check(int status) {
  if (status != PMKRSA_OK) throw Failure{status, pmkrsa_last_error()};
}

struct Buffer {
  std::uint8_t* data = nullptr;
  std::size_t len = 0;
  ~Buffer() { pmkrsa_free(data); }
};

struct CString {
  char* data = nullptr;
  ~CString() { pmkrsa_free(data); }
  std::string str() const { return data == nullptr ? std::string() : std::string(data); }
};

struct RngDeleter {
  void operator()(pmkrsa_rng* r) const { pmkrsa_rng_free(r); }
};
struct BundleDeleter {
  void operator()(pmkrsa_bundle* b) const { pmkrsa_bundle_free(b); }
};
using Rng = std::unique_ptr<pmkrsa_rng, RngDeleter>;
using Bundle = std::unique_ptr<pmkrsa_bundle, BundleDeleter>;

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kIo, "cannot open '" + path + "' for reading"};
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Failure{kIo, "read error on '" + path + "'"};
  return bytes;
}

// Writes to a sibling temporary file and renames it over `path`, so a failed
// run never leaves a partial file behind.
void write_file_atomic(const fs::path& path, const std::uint8_t* data, std::size_t len) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::string tmpl = (dir / ("." + path.filename().string() + ".XXXXXX")).string();
  const int fd = ::mkstemp(tmpl.data());
  if (fd < 0) throw Failure{kIo, "cannot create a temporary file in '" + dir.string() + "'"};
  std::size_t written = 0;
  bool ok = true;
  while (ok && written < len) {
    const ssize_t n = ::write(fd, data + written, len - written);
    if (n <= 0) ok = false;
    else written += static_cast<std::size_t>(n);
  }
  ok = ok && ::fsync(fd) == 0;
  ok = (::close(fd) == 0) && ok;
  std::error_code ec;
  if (ok) fs::rename(tmpl, path, ec);
  if (!ok || ec) {
    fs::remove(tmpl, ec);
    throw Failure{kIo, "cannot write '" + path.string() + "'"};
  }
}

Rng make_rng(const std::string& seed) {
  pmkrsa_rng* raw = nullptr;
  if (seed.empty()) {
    check(pmkrsa_rng_new_os(&raw));
  } else {
    check(pmkrsa_rng_new_seeded(seed.c_str(), &raw));
  }
  return Rng(raw);
}

Bundle load_bundle(const std::string& path) {
  const auto bytes = read_file(path);
  pmkrsa_bundle* raw = nullptr;
  check(pmkrsa_bundle_parse(bytes.data(), bytes.size(), &raw));
  return Bundle(raw);
}

std::string decimal_to_hex(const std::string& decimal) {
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(decimal.data(), decimal.data() + decimal.size(), value);
  if (ec != std::errc{} || end != decimal.data() + decimal.size()) {
    throw Failure{kInvalidArgument, "--exponent must be a decimal integer below 2^64"};
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(value));
  return buf;
}

struct Options {
  unsigned bits = 2048;
  unsigned keys = 16;
  unsigned threads = 0;
  std::vector<std::string> variants;
  std::vector<unsigned> bench_bits;
  std::vector<unsigned> bench_threads;
  std::vector<std::uint64_t> sizes;
  unsigned reps = 5;
  unsigned warmup = 1;
  bool no_keygen = false;
  std::string baseline;
  std::string key;
  std::string in;
  std::string out;
  std::string seed;
  std::string exponent;
  bool json = false;
};

int cmd_keygen(const Options& o) {
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw Failure{kIo, "output directory '" + dir.string() + "' is not usable"};

  Rng rng = make_rng(o.seed);
  const std::string e_hex = o.exponent.empty() ? std::string() : decimal_to_hex(o.exponent);
  pmkrsa_bundle* raw = nullptr;
  check(pmkrsa_bundle_generate(o.bits, o.keys, e_hex.empty() ? nullptr : e_hex.c_str(), o.threads, rng.get(), &raw));
  Bundle bundle(raw);

  Buffer pub;
  Buffer priv;
  check(pmkrsa_bundle_serialize(bundle.get(), 0, &pub.data, &pub.len));
  check(pmkrsa_bundle_serialize(bundle.get(), 1, &priv.data, &priv.len));
  write_file_atomic(dir / "public.pmkk", pub.data, pub.len);
  write_file_atomic(dir / "private.pmkk", priv.data, priv.len);
  fs::permissions(dir / "private.pmkk", fs::perms::owner_read | fs::perms::owner_write, ec);

  std::vector<std::string> fingerprints;
  for (std::size_t a = 0; a < pmkrsa_bundle_rows(bundle.get()); ++a) {
    char fp[17];
    check(pmkrsa_bundle_fingerprint(bundle.get(), a, fp));
    fingerprints.emplace_back(fp);
  }
  std::cerr << "warning: " << (dir / "private.pmkk").string()
            << " holds the private keys unencrypted; protect it accordingly\n";
  if (o.json) {
    nlohmann::json doc = {{"bits", o.bits},
                          {"keys", o.keys},
                          {"public", (dir / "public.pmkk").string()},
                          {"private", (dir / "private.pmkk").string()},
                          {"fingerprints", fingerprints}};
    std::cout << doc.dump(2) << "\n";
  } else {
    for (std::size_t a = 0; a < fingerprints.size(); ++a) std::cout << "row " << a << "  " << fingerprints[a] << "\n";
  }
  return 0;
}

int cmd_encrypt(const Options& o) {
  Bundle bundle = load_bundle(o.key);
  const auto message = read_file(o.in);
  Rng rng = make_rng(o.seed);
  Buffer out;
  check(pmkrsa_encrypt(bundle.get(), message.data(), message.size(), rng.get(), o.threads, &out.data, &out.len));
  write_file_atomic(o.out, out.data, out.len);
  if (o.json) {
    std::cout << nlohmann::json{{"in", o.in}, {"out", o.out}, {"plaintext_bytes", message.size()},
                                {"container_bytes", out.len}}
                     .dump(2)
              << "\n";
  }
  return 0;
}

int cmd_decrypt(const Options& o) {
  Bundle bundle = load_bundle(o.key);
  const auto container = read_file(o.in);
  Buffer out;
  check(pmkrsa_decrypt(bundle.get(), container.data(), container.size(), o.threads, &out.data, &out.len));
  write_file_atomic(o.out, out.data, out.len);
  if (o.json) {
    std::cout << nlohmann::json{{"in", o.in}, {"out", o.out}, {"plaintext_bytes", out.len}}.dump(2) << "\n";
  }
  return 0;
}

int cmd_selftest(const Options& o) {
  std::string vectors;
  if (!o.in.empty()) {
    const auto bytes = read_file(o.in);
    vectors.assign(bytes.begin(), bytes.end());
  }
  CString report;
  const int status = pmkrsa_selftest(o.in.empty() ? nullptr : vectors.c_str(), &report.data);
  const std::string message = status == PMKRSA_OK ? std::string() : pmkrsa_last_error();
  if (report.data == nullptr) throw Failure{status, message};
  if (o.json) {
    std::cout << report.str() << "\n";
  } else {
    const auto doc = nlohmann::json::parse(report.str());
    for (const auto& v : doc.at("vectors")) {
      std::cout << (v.at("passed").get<bool>() ? "PASS  " : "FAIL  ") << v.at("id").get<std::string>();
      if (!v.at("passed").get<bool>()) std::cout << "  (" << v.at("detail").get<std::string>() << ")";
      std::cout << "\n";
    }
  }
  if (status != PMKRSA_OK) throw Failure{status, message};
  return 0;
}

int cmd_bench(const Options& o) {
  nlohmann::json request;
  request["variants"] = o.variants.empty() ? std::vector<std::string>{"pmkrsa"} : o.variants;
  request["bits"] = o.bench_bits.empty() ? std::vector<unsigned>{o.bits} : o.bench_bits;
  request["threads"] = o.bench_threads.empty() ? std::vector<unsigned>{o.threads == 0 ? 1U : o.threads}
                                               : o.bench_threads;
  request["file_bytes"] = o.sizes.empty() ? std::vector<std::uint64_t>{102400} : o.sizes;
  request["keys"] = o.keys;
  request["repetitions"] = o.reps;
  request["warmup"] = o.warmup;
  request["time_keygen"] = !o.no_keygen;
  if (!o.baseline.empty()) request["baseline"] = o.baseline;

  Rng rng = make_rng(o.seed);
  CString report;
  CString csv;
  const int status = pmkrsa_bench(request.dump().c_str(), rng.get(), &report.data, &csv.data);
  const std::string message = status == PMKRSA_OK ? std::string() : pmkrsa_last_error();
  if (csv.data == nullptr) throw Failure{status, message};

  const std::string text = o.json ? report.str() + "\n" : csv.str();
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(o.out, reinterpret_cast<const std::uint8_t*>(text.data()), text.size());
  }
  if (!o.json && !o.baseline.empty()) {
    const auto doc = nlohmann::json::parse(report.str());
    for (const auto& s : doc.at("speedups")) {
      std::cerr << "speed-up " << s.at("candidate").at("variant").get<std::string>() << " vs "
                << s.at("baseline").at("variant").get<std::string>() << " ["
                << s.at("candidate").at("phase").get<std::string>() << ", "
                << s.at("candidate").at("bits").get<unsigned>() << " bits]: " << s.at("ratio").get<double>() << "\n";
    }
  }
  if (status != PMKRSA_OK) throw Failure{status, message};
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallelized multi-key RSA: keygen, encrypt, decrypt, selftest, bench"};
  app.require_subcommand(1);
  Options o;
  const std::set<unsigned> allowed_bits = {512, 1024, 2048, 3072, 4096, 6144, 8192};
  const std::string seed_help = "64 hex chars; deterministic DRBG instead of OS entropy (env PMKRSA_TEST_SEED)";
  const std::string threads_help = "worker threads, 0 = all cores (env PMKRSA_THREADS)";

  auto* keygen = app.add_subcommand("keygen", "generate a key bundle into <out>/public.pmkk and private.pmkk");
  keygen->add_option("--bits", o.bits, "key length in bits")->check(CLI::IsMember(allowed_bits));
  keygen->add_option("--keys", o.keys, "number of key rows")->check(CLI::Range(1, 65535));
  keygen->add_option("--threads", o.threads, threads_help)->envname("PMKRSA_THREADS");
  keygen->add_option("--out", o.out, "output directory (default: current directory)");
  keygen->add_option("--seed", o.seed, seed_help)->envname("PMKRSA_TEST_SEED");
  keygen->add_option("--exponent", o.exponent, "public exponent, decimal (default 65537)");
  keygen->add_flag("--json", o.json, "machine-readable output");

  auto* encrypt = app.add_subcommand("encrypt", "encrypt a file into a PMK1 container");
  encrypt->add_option("--key", o.key, "public or private key bundle")->required();
  encrypt->add_option("--in", o.in, "plaintext file")->required();
  encrypt->add_option("--out", o.out, "container file")->required();
  encrypt->add_option("--threads", o.threads, threads_help)->envname("PMKRSA_THREADS");
  encrypt->add_option("--seed", o.seed, seed_help)->envname("PMKRSA_TEST_SEED");
  encrypt->add_flag("--json", o.json, "machine-readable output");

  auto* decrypt = app.add_subcommand("decrypt", "decrypt a PMK1 container");
  decrypt->add_option("--key", o.key, "private key bundle")->required();
  decrypt->add_option("--in", o.in, "container file")->required();
  decrypt->add_option("--out", o.out, "plaintext file")->required();
  decrypt->add_option("--threads", o.threads, threads_help)->envname("PMKRSA_THREADS");
  decrypt->add_flag("--json", o.json, "machine-readable output");

  auto* selftest = app.add_subcommand("selftest", "run the known-answer vectors");
  selftest->add_option("--in", o.in, "vector file to run instead of the built-in set");
  selftest->add_flag("--json", o.json, "machine-readable output");

  auto* bench = app.add_subcommand("bench", "wall-clock benchmark; CSV on stdout or --out");
  bench->add_option("--variant", o.variants, "pmkrsa | rsa | crt | multiprime:b (repeatable)")->delimiter(',');
  bench->add_option("--bits", o.bench_bits, "key lengths (repeatable)")
      ->delimiter(',')
      ->check(CLI::IsMember(allowed_bits));
  bench->add_option("--keys", o.keys, "key rows for pmkrsa")->check(CLI::Range(1, 65535));
  bench->add_option("--threads", o.bench_threads, "thread counts (repeatable; env PMKRSA_THREADS)")
      ->delimiter(',')
      ->envname("PMKRSA_THREADS");
  bench->add_option("--size", o.sizes, "plaintext sizes in bytes (repeatable, default 102400)")->delimiter(',');
  bench->add_option("--reps", o.reps, "timed repetitions per phase")->check(CLI::Range(3, 1000));
  bench->add_option("--warmup", o.warmup, "discarded warm-up runs per phase");
  bench->add_flag("--no-keygen", o.no_keygen, "do not time key generation");
  bench->add_option("--baseline", o.baseline, "variant to compute speed-ups against");
  bench->add_option("--out", o.out, "write the report here instead of stdout");
  bench->add_option("--seed", o.seed, seed_help)->envname("PMKRSA_TEST_SEED");
  bench->add_flag("--json", o.json, "emit the JSON report instead of CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInvalidArgument;
  }

  try {
    if (keygen->parsed()) return cmd_keygen(o);
    if (encrypt->parsed()) return cmd_encrypt(o);
    if (decrypt->parsed()) return cmd_decrypt(o);
    if (selftest->parsed()) return cmd_selftest(o);
    if (bench->parsed()) return cmd_bench(o);
  } catch (const Failure& f) {
    const std::string name = pmkrsa_status_name(f.status);
    std::cerr << "error: " << (f.message.starts_with(name) ? f.message : name + ": " + f.message) << "\n";
    return f.status;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return PMKRSA_E_INTERNAL;
  }
  return kInvalidArgument;
}
