#include "pmkrsa/selftest.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "pmkrsa/error.hpp"
#include "pmkrsa/keystore.hpp"
#include "pmkrsa/modmath.hpp"
#include "pmkrsa/rsa_variants.hpp"
#include "pmkrsa/scheme.hpp"

namespace pmkrsa {

namespace {

using nlohmann::json;

constexpr std::string_view kBuiltin = R"json({
  "vectors": [
    {"id": "rsa-3233-encrypt", "kind": "rsa", "n": "ca1", "e": "11", "d": "ac1", "m": "41", "c": "ae6"},
    {"id": "modinv-17-3120", "kind": "modinv", "a": "11", "n": "c30", "inverse": "ac1"},
    {"id": "modinv-2-3233", "kind": "modinv", "a": "2", "n": "ca1", "inverse": "651"},
    {"id": "mont-17-r32", "kind": "montgomery", "n": "11", "r_bits": 5, "a": "7", "b": "f",
     "n_prime": "f", "a_hat": "3", "b_hat": "4", "product_hat": "b", "product": "3"},
    {"id": "crt-3233", "kind": "crt", "p": "3d", "q": "35", "d": "ac1", "d_p": "35", "d_q": "31",
     "q_inv": "26", "c": "ae6", "m": "41"},
    {"id": "crt-combine-61-53", "kind": "crt_combine", "residues": ["4", "c"], "moduli": ["3d", "35"], "x": "41"},
    {"id": "pmkrsa-toy-1", "kind": "pmkrsa", "n": "ca1", "e": "11", "d": "ac1", "p": "3d", "q": "35",
     "m": "41", "r": "2", "c_star": "bc9", "c_r": "6d8"},
    {"id": "multiprime-2431", "kind": "multiprime", "primes": ["b", "d", "11"], "e": "7", "d": "337",
     "m": "41", "c": "666"}
  ]
})json";

BigUint hex(const json& v, const char* field) {
  if (!v.contains(field) || !v.at(field).is_string()) {
    throw Error(ErrorCode::InvalidArgument, std::string("missing hex field '") + field + "'");
  }
  return BigUint::from_hex(v.at(field).get<std::string>());
}

std::vector<BigUint> hex_list(const json& v, const char* field) {
  if (!v.contains(field) || !v.at(field).is_array()) {
    throw Error(ErrorCode::InvalidArgument, std::string("missing list field '") + field + "'");
  }
  std::vector<BigUint> out;
  for (const auto& item : v.at(field)) {
    if (!item.is_string()) throw Error(ErrorCode::InvalidArgument, std::string("non-string entry in ") + field);
    out.push_back(BigUint::from_hex(item.get<std::string>()));
  }
  return out;
}

// Collects mismatches for one vector.
class Checker {
 public:
  void expect(const char* what, const BigUint& got, const BigUint& want) {
    if (got == want) return;
    if (!out_.str().empty()) out_ << "; ";
    out_ << what << " = " << got.to_hex() << ", expected " << want.to_hex();
  }
  std::string detail() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

KeyPair toy_pair(const json& v) {
  KeyPair key;
  key.n = hex(v, "n");
  key.e = hex(v, "e");
  key.d = hex(v, "d");
  key.bits = static_cast<std::uint32_t>(key.n.bit_length());
  if (v.contains("p")) key.p = hex(v, "p");
  if (v.contains("q")) key.q = hex(v, "q");
  return key;
}

void check_rsa(const json& v, Checker& c) {
  const KeyPair key = toy_pair(v);
  const BigUint m = hex(v, "m");
  const BigUint ct = hex(v, "c");
  c.expect("encrypt(m)", rsa_encrypt(m, key), ct);
  c.expect("decrypt(c)", rsa_decrypt(ct, key), m);
}

void check_modinv(const json& v, Checker& c) {
  const BigUint a = hex(v, "a");
  const BigUint n = hex(v, "n");
  const BigUint inv = mod_inv(a, n);
  c.expect("mod_inv(a, n)", inv, hex(v, "inverse"));
  c.expect("a * inverse mod n", mod_mul_plain(a, inv, n), BigUint(1));
}

void check_montgomery(const json& v, Checker& c) {
  if (!v.contains("r_bits") || !v.at("r_bits").is_number_unsigned()) {
    throw Error(ErrorCode::InvalidArgument, "missing integer field 'r_bits'");
  }
  const MontgomeryContext ctx(hex(v, "n"), v.at("r_bits").get<std::size_t>());
  c.expect("n_prime", ctx.n_prime(), hex(v, "n_prime"));
  const BigUint a_hat = ctx.to_montgomery(hex(v, "a"));
  const BigUint b_hat = ctx.to_montgomery(hex(v, "b"));
  c.expect("to_mont(a)", a_hat, hex(v, "a_hat"));
  c.expect("to_mont(b)", b_hat, hex(v, "b_hat"));
  const BigUint product_hat = ctx.multiply(a_hat, b_hat);
  c.expect("mont_mul(a_hat, b_hat)", product_hat, hex(v, "product_hat"));
  c.expect("from_mont(product)", ctx.from_montgomery(product_hat), hex(v, "product"));
}

void check_crt(const json& v, Checker& c) {
  KeyPair key;
  key.p = hex(v, "p");
  key.q = hex(v, "q");
  key.d = hex(v, "d");
  key.n = key.p * key.q;
  const CrtPrivate crt = CrtPrivate::from_keypair(key);
  c.expect("d_p", crt.d_p, hex(v, "d_p"));
  c.expect("d_q", crt.d_q, hex(v, "d_q"));
  c.expect("q_inv", crt.q_inv, hex(v, "q_inv"));
  c.expect("crt_decrypt(c)", crt_decrypt(hex(v, "c"), crt, key.n), hex(v, "m"));
}

void check_crt_combine(const json& v, Checker& c) {
  const auto residues = hex_list(v, "residues");
  const auto moduli = hex_list(v, "moduli");
  c.expect("crt_combine", crt_combine(residues, moduli), hex(v, "x"));
}

void check_pmkrsa(const json& v, Checker& c) {
  const KeyPair key = toy_pair(v);
  KeyBundle bundle{key.bits, {key}};
  ChunkGrid grid;
  grid.cells = {hex(v, "m")};
  grid.rows = 1;
  grid.payload_bytes = 1;
  grid.total_len = 1;
  const CipherPack pack = encrypt_with_blinds(grid, BlindMatrix{{hex(v, "r")}}, bundle, {});
  c.expect("c_star", pack.c_star.at(0), hex(v, "c_star"));
  c.expect("c_r", pack.c_r.at(0), hex(v, "c_r"));
  DecryptOptions options;
  options.exponentiation = key.p.is_zero() ? Exponentiation::Direct : Exponentiation::Crt;
  c.expect("recovered blind", recover_blinds(pack, bundle, options).at(0), hex(v, "r"));
  c.expect("recovered m", decrypt_cells(pack, bundle, options).at(0), hex(v, "m"));
}

void check_multiprime(const json& v, Checker& c) {
  const MultiPrimeKey key = MultiPrimeKey::from_primes(hex_list(v, "primes"), hex(v, "e"));
  c.expect("d", key.d, hex(v, "d"));
  const BigUint m = hex(v, "m");
  const BigUint ct = hex(v, "c");
  c.expect("encrypt(m)", mod_pow(m, key.e, key.n), ct);
  c.expect("multiprime_decrypt(c)", multiprime_decrypt(ct, key), m);
}

const std::map<std::string, std::function<void(const json&, Checker&)>, std::less<>>& handlers() {
  static const std::map<std::string, std::function<void(const json&, Checker&)>, std::less<>> table = {
      {"rsa", check_rsa},
      {"modinv", check_modinv},
      {"montgomery", check_montgomery},
      {"crt", check_crt},
      {"crt_combine", check_crt_combine},
      {"pmkrsa", check_pmkrsa},
      {"multiprime", check_multiprime},
  };
  return table;
}

VectorResult evaluate(const json& v, std::size_t position) {
  VectorResult result;
  result.id = v.is_object() && v.contains("id") && v.at("id").is_string() ? v.at("id").get<std::string>()
                                                                          : "#" + std::to_string(position);
  try {
    if (!v.is_object() || !v.contains("kind") || !v.at("kind").is_string()) {
      throw Error(ErrorCode::InvalidArgument, "vector has no 'kind'");
    }
    const auto kind = v.at("kind").get<std::string>();
    const auto handler = handlers().find(kind);
    if (handler == handlers().end()) throw Error(ErrorCode::InvalidArgument, "unknown kind '" + kind + "'");
    Checker checker;
    handler->second(v, checker);
    result.detail = checker.detail();
  } catch (const std::exception& e) {
    result.detail = e.what();
  }
  result.passed = result.detail.empty();
  return result;
}

}  // namespace

bool SelfTestReport::all_passed() const noexcept {
  return !results.empty() && std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

std::vector<std::string> SelfTestReport::failed_ids() const {
  std::vector<std::string> out;
  for (const auto& r : results) {
    if (!r.passed) out.push_back(r.id);
  }
  return out;
}

std::string_view builtin_vectors() { return kBuiltin; }

SelfTestReport run_selftest(std::string_view vectors_json, std::string_view source) {
  SelfTestReport report;
  json doc = json::parse(vectors_json, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("vectors") || !doc.at("vectors").is_array() ||
      doc.at("vectors").empty()) {
    report.results.push_back({std::string(source), false, "not a vector file (expected {\"vectors\": [...]})"});
    return report;
  }
  std::size_t position = 0;
  for (const auto& v : doc.at("vectors")) report.results.push_back(evaluate(v, position++));
  return report;
}

void require_pass(const SelfTestReport& report) {
  const auto failed = report.failed_ids();
  if (failed.empty() && !report.results.empty()) return;
  std::string names;
  for (const auto& id : failed) names += (names.empty() ? "" : ", ") + id;
  throw Error(ErrorCode::SelfTestFailed, "failing vectors: " + (names.empty() ? std::string("<none run>") : names));
}

}  // namespace pmkrsa
