#include "pmkrsa/keystore.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <array>

#include "pmkrsa/error.hpp"
#include "pmkrsa/modmath.hpp"
#include "pmkrsa/primegen.hpp"

namespace pmkrsa {

namespace {

constexpr std::array<std::uint8_t, 4> kKeyMagic = {'P', 'M', 'K', 'K'};
constexpr std::size_t kMaxRows = 0xFFFF;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_magnitude(std::vector<std::uint8_t>& out, const BigUint& v) {
  const auto bytes = v.to_bytes_be();
  put_u32(out, static_cast<std::uint32_t>(bytes.size()));
  out.insert(out.end(), bytes.begin(), bytes.end());
}

class KeyReader {
 public:
  explicit KeyReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::span<const std::uint8_t> take(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCode::MalformedKeyFile, std::string("truncated ") + what, pos_);
    }
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint64_t uint(std::size_t width, const char* what) {
    std::uint64_t v = 0;
    for (auto b : take(width, what)) v = (v << 8) | b;
    return v;
  }
  BigUint magnitude(const char* what) {
    const auto len = static_cast<std::size_t>(uint(4, what));
    return BigUint::from_bytes_be(take(len, what));
  }
  std::size_t pos() const noexcept { return pos_; }
  bool done() const noexcept { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> serialize(const KeyBundle& bundle, bool include_private) {
  bundle.validate();
  std::vector<std::uint8_t> out(kKeyMagic.begin(), kKeyMagic.end());
  out.push_back(kKeyFileVersion);
  out.push_back(include_private ? 1 : 0);
  put_u32(out, bundle.bits);
  out.push_back(static_cast<std::uint8_t>(bundle.rows.size() >> 8));
  out.push_back(static_cast<std::uint8_t>(bundle.rows.size()));
  for (const auto& row : bundle.rows) {
    put_magnitude(out, row.e);
    put_magnitude(out, row.n);
    if (include_private) {
      put_magnitude(out, row.d);
      put_magnitude(out, row.p);
      put_magnitude(out, row.q);
    }
  }
  return out;
}

BigUint default_exponent_for(const BigUint& phi) {
  if (kDefaultPublicExponent < phi) return kDefaultPublicExponent;
  for (BigUint e(3);; e += BigUint(2)) {
    if (gcd(e, phi) == BigUint(1)) return e;
  }
}

}  // namespace

BigUint KeyPair::phi() const {
  if (p.is_zero() || q.is_zero()) throw Error(ErrorCode::InvalidArgument, "phi needs the prime factors");
  return (p - BigUint(1)) * (q - BigUint(1));
}

KeyPair KeyPair::public_part() const {
  KeyPair out;
  out.n = n;
  out.e = e;
  out.bits = bits;
  return out;
}

KeyPair KeyPair::from_primes(const BigUint& p, const BigUint& q, const BigUint& e) {
  if (p == q) throw Error(ErrorCode::InvalidArgument, "p and q must differ");
  KeyPair out;
  out.p = p;
  out.q = q;
  out.n = p * q;
  out.e = e;
  out.bits = static_cast<std::uint32_t>(out.n.bit_length());
  const BigUint phi = out.phi();
  if (e < BigUint(3) || e >= phi || gcd(e, phi) != BigUint(1)) {
    throw Error(ErrorCode::InvalidArgument, "e must lie in [3, phi) and be coprime to phi");
  }
  out.d = mod_inv(e, phi);
  return out;
}

bool KeyBundle::is_private() const noexcept {
  return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const KeyPair& k) { return k.has_private(); });
}

KeyBundle KeyBundle::public_part() const {
  KeyBundle out;
  out.bits = bits;
  out.rows.reserve(rows.size());
  for (const auto& row : rows) out.rows.push_back(row.public_part());
  return out;
}

void KeyBundle::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::MalformedKeyFile, why); };
  if (rows.empty() || rows.size() > kMaxRows) fail("row count must be in [1, 65535]");
  const bool priv = rows.front().has_private();
  std::vector<BigUint> moduli;
  moduli.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.has_private() != priv) fail("bundle mixes public and private rows");
    if (row.bits != bits || row.n.bit_length() != bits) fail("row modulus length differs from bundle bits");
    if (row.n.is_even()) fail("modulus must be odd");
    if (row.e < BigUint(3) || row.e >= row.n) fail("public exponent out of range");
    if (priv) {
      if (row.p == row.q || row.p * row.q != row.n) fail("N != p*q");
      const BigUint phi = row.phi();
      if (mod_mul_plain(row.e, row.d, phi) != BigUint(1)) fail("e*d != 1 mod phi");
    } else if (!row.p.is_zero() || !row.q.is_zero()) {
      fail("public row carries prime factors");
    }
    moduli.push_back(row.n);
  }
  std::sort(moduli.begin(), moduli.end());
  if (std::adjacent_find(moduli.begin(), moduli.end()) != moduli.end()) fail("duplicate modulus");
}

namespace detail {

KeyPair keypair_from_prime_stream(std::uint32_t bits, const std::optional<BigUint>& e,
                                  const std::function<BigUint()>& next_prime) {
  for (;;) {
    BigUint p = next_prime();
    BigUint q = next_prime();
    if (p == q) continue;
    const BigUint n = p * q;
    if (n.bit_length() != bits) continue;
    const BigUint phi = (p - BigUint(1)) * (q - BigUint(1));
    const BigUint exponent = e ? *e : default_exponent_for(phi);
    if (exponent >= phi || gcd(exponent, phi) != BigUint(1)) continue;
    return KeyPair::from_primes(p, q, exponent);
  }
}

}  // namespace detail

KeyPair gen_keypair(std::uint32_t bits, RandomSource& rng, const KeygenOptions& options) {
  if (bits < 16 || bits % 2 != 0) throw Error(ErrorCode::InvalidArgument, "key length must be even and >= 16");
  if (options.e) {
    const BigUint& e = *options.e;
    if (e < BigUint(3) || e.is_even() || e.bit_length() > bits - 2) {
      throw Error(ErrorCode::InvalidArgument, "public exponent must be odd, >= 3 and below 2^(bits-2)");
    }
  }
  return detail::keypair_from_prime_stream(bits, options.e, [&] { return gen_prime(bits / 2, rng); });
}

KeyBundle gen_bundle(std::size_t rows, std::uint32_t bits, RandomSource& rng, const KeygenOptions& options) {
  if (rows < 1 || rows > kMaxRows) throw Error(ErrorCode::InvalidArgument, "row count must be in [1, 65535]");
  std::vector<std::unique_ptr<RandomSource>> streams;
  streams.reserve(rows);
  for (std::size_t a = 0; a < rows; ++a) streams.push_back(rng.split(a));

  KeyBundle bundle;
  bundle.bits = bits;
  try {
    bundle.rows = par_map_index(
        rows, [&](std::size_t a) { return gen_keypair(bits, *streams[a], options); }, options.parallel);
  } catch (const TaskFailed& failed) {
    failed.rethrow_cause();
  }

  for (std::size_t a = 1; a < rows; ++a) {
    auto collides = [&] {
      return std::any_of(bundle.rows.begin(), bundle.rows.begin() + static_cast<std::ptrdiff_t>(a),
                         [&](const KeyPair& k) { return k.n == bundle.rows[a].n; });
    };
    while (collides()) bundle.rows[a] = gen_keypair(bits, *streams[a], options);
  }
  return bundle;
}

std::vector<std::uint8_t> serialize_public(const KeyBundle& bundle) { return serialize(bundle, false); }

std::vector<std::uint8_t> serialize_private(const KeyBundle& bundle) {
  if (!bundle.is_private()) throw Error(ErrorCode::InvalidArgument, "bundle has no private material");
  return serialize(bundle, true);
}

KeyBundle parse_bundle(std::span<const std::uint8_t> bytes) {
  KeyReader in(bytes);
  const auto magic = in.take(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), kKeyMagic.begin())) {
    throw Error(ErrorCode::MalformedKeyFile, "bad key file magic", 0);
  }
  if (in.uint(1, "version") != kKeyFileVersion) {
    throw Error(ErrorCode::MalformedKeyFile, "unsupported key file version", 4);
  }
  const auto kind = in.uint(1, "kind");
  if (kind > 1) throw Error(ErrorCode::MalformedKeyFile, "unknown key kind", 5);
  KeyBundle bundle;
  bundle.bits = static_cast<std::uint32_t>(in.uint(4, "bits"));
  const auto rows = static_cast<std::size_t>(in.uint(2, "row count"));
  if (rows == 0) throw Error(ErrorCode::MalformedKeyFile, "bundle has no rows", 10);
  for (std::size_t a = 0; a < rows; ++a) {
    KeyPair row;
    row.bits = bundle.bits;
    row.e = in.magnitude("public exponent");
    row.n = in.magnitude("modulus");
    if (kind == 1) {
      row.d = in.magnitude("private exponent");
      row.p = in.magnitude("prime p");
      row.q = in.magnitude("prime q");
      if (row.d.is_zero()) throw Error(ErrorCode::MalformedKeyFile, "zero private exponent", in.pos());
    }
    bundle.rows.push_back(std::move(row));
  }
  if (!in.done()) throw Error(ErrorCode::MalformedKeyFile, "trailing bytes after key data", in.pos());
  bundle.validate();
  return bundle;
}

std::string modulus_fingerprint(const BigUint& n) {
  const auto bytes = n.to_bytes_be();
  std::array<std::uint8_t, SHA256_DIGEST_LENGTH> digest{};
  SHA256(bytes.data(), bytes.size(), digest.data());
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (std::size_t i = 0; i < 8; ++i) {
    out.push_back(kDigits[digest[i] >> 4]);
    out.push_back(kDigits[digest[i] & 0xF]);
  }
  return out;
}

}  // namespace pmkrsa
