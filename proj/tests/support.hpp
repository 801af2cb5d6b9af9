#pragma once

#include <gmp.h>

#include <cstdint>
#include <random>
#include <string>

#include "pmkrsa/biguint.hpp"
#include "pmkrsa/error.hpp"
#include "pmkrsa/random.hpp"

namespace testing {

// Minimal RAII wrapper over mpz_t; GMP is the independent arithmetic oracle.
class Mpz {
 public:
  Mpz() { mpz_init(v_); }
  explicit Mpz(unsigned long x) { mpz_init_set_ui(v_, x); }
  explicit Mpz(const pmkrsa::BigUint& x) { mpz_init_set_str(v_, x.to_hex().c_str(), 16); }
  Mpz(const Mpz& other) { mpz_init_set(v_, other.v_); }
  Mpz& operator=(const Mpz& other) {
    mpz_set(v_, other.v_);
    return *this;
  }
  ~Mpz() { mpz_clear(v_); }

  mpz_ptr get() { return v_; }
  mpz_srcptr get() const { return v_; }

  pmkrsa::BigUint big() const { return pmkrsa::BigUint::from_hex(str(16)); }
  std::string str(int base) const {
    char* s = mpz_get_str(nullptr, base, v_);
    std::string out(s);
    void (*free_fn)(void*, size_t);
    mp_get_memory_functions(nullptr, nullptr, &free_fn);
    free_fn(s, out.size() + 1);
    return out;
  }

 private:
  mpz_t v_;
};

inline pmkrsa::SeededDrbg seeded(std::uint8_t tag) {
  pmkrsa::SeededDrbg::Seed seed{};
  for (std::size_t i = 0; i < seed.size(); ++i) seed[i] = static_cast<std::uint8_t>(tag * 31 + i);
  return pmkrsa::SeededDrbg(seed);
}

// Random value with exactly `bits` bits (top bit set).
inline pmkrsa::BigUint exact_bits(pmkrsa::RandomSource& rng, std::size_t bits) {
  if (bits == 0) return {};
  return pmkrsa::random_bits(rng, bits - 1) + pmkrsa::BigUint::power_of_two(bits - 1);
}

// Odd modulus of exactly `bits` bits, bits >= 2.
inline pmkrsa::BigUint odd_modulus(pmkrsa::RandomSource& rng, std::size_t bits) {
  pmkrsa::BigUint n = exact_bits(rng, bits);
  if (n.is_even()) n += pmkrsa::BigUint(1);
  return n;
}

template <class Fn>
pmkrsa::ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const pmkrsa::Error& e) {
    return e.code();
  }
  return pmkrsa::ErrorCode::Ok;
}

}  // namespace testing
