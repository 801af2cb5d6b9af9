#include "pmkrsa/pmkrsa.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include <json.hpp>

#include "pmkrsa/bench.hpp"
#include "pmkrsa/container.hpp"
#include "pmkrsa/error.hpp"
#include "pmkrsa/keystore.hpp"
#include "pmkrsa/random.hpp"
#include "pmkrsa/scheme.hpp"
#include "pmkrsa/selftest.hpp"

struct pmkrsa_bundle {
  pmkrsa::KeyBundle bundle;
};

struct pmkrsa_rng {
  std::unique_ptr<pmkrsa::RandomSource> source;
};

namespace {

using pmkrsa::Error;
using pmkrsa::ErrorCode;

thread_local std::string last_error;

int fail(ErrorCode code, const std::string& message) {
  last_error = message;
  return static_cast<int>(code);
}

template <class Body>
int guarded(Body&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(ErrorCode::InvalidArgument, std::string("bad JSON request: ") + e.what());
  } catch (const std::bad_alloc&) {
    return fail(ErrorCode::Internal, "out of memory");
  } catch (const std::exception& e) {
    return fail(ErrorCode::Internal, e.what());
  } catch (...) {
    return fail(ErrorCode::Internal, "unknown failure");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

template <class T>
T* copy_out(const T* data, std::size_t count, std::size_t extra = 0) {
  void* raw = std::malloc(count * sizeof(T) + extra + 1);
  if (raw == nullptr) throw std::bad_alloc();
  if (count > 0) std::memcpy(raw, data, count * sizeof(T));
  return static_cast<T*>(raw);
}

char* copy_string(const std::string& s) {
  char* out = copy_out(s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

pmkrsa::ParallelConfig parallel_for(std::uint32_t threads) {
  pmkrsa::ParallelConfig cfg;
  cfg.workers = threads;
  return cfg;
}

template <class T>
std::vector<T> list_or(const nlohmann::json& request, const char* field, std::vector<T> fallback) {
  if (!request.contains(field)) return fallback;
  const auto& v = request.at(field);
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

}  // namespace

extern "C" {

const char* pmkrsa_last_error(void) { return last_error.c_str(); }

const char* pmkrsa_status_name(int status) {
  if (status < 0 || status > static_cast<int>(ErrorCode::Internal)) return "Unknown";
  return pmkrsa::error_code_name(static_cast<ErrorCode>(status)).data();
}

void pmkrsa_free(void* buffer) { std::free(buffer); }

int pmkrsa_rng_new_os(pmkrsa_rng** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be NULL");
    *out = new pmkrsa_rng{std::make_unique<pmkrsa::OsEntropy>()};
    return 0;
  });
}

int pmkrsa_rng_new_seeded(const char* seed_hex, pmkrsa_rng** out) {
  return guarded([&] {
    require(out != nullptr && seed_hex != nullptr, "seed and out must not be NULL");
    *out = new pmkrsa_rng{std::make_unique<pmkrsa::SeededDrbg>(pmkrsa::SeededDrbg::from_hex(seed_hex))};
    return 0;
  });
}

void pmkrsa_rng_free(pmkrsa_rng* rng) { delete rng; }

int pmkrsa_bundle_generate(uint32_t bits, uint32_t rows, const char* exponent_hex, uint32_t threads,
                           pmkrsa_rng* rng, pmkrsa_bundle** out) {
  return guarded([&] {
    require(out != nullptr && rng != nullptr, "rng and out must not be NULL");
    pmkrsa::KeygenOptions options;
    options.parallel = parallel_for(threads);
    if (exponent_hex != nullptr) options.e = pmkrsa::BigUint::from_hex(exponent_hex);
    auto handle = std::make_unique<pmkrsa_bundle>();
    handle->bundle = pmkrsa::gen_bundle(rows, bits, *rng->source, options);
    *out = handle.release();
    return 0;
  });
}

int pmkrsa_bundle_parse(const uint8_t* bytes, size_t len, pmkrsa_bundle** out) {
  return guarded([&] {
    require(out != nullptr && (bytes != nullptr || len == 0), "bytes and out must not be NULL");
    auto handle = std::make_unique<pmkrsa_bundle>();
    handle->bundle = pmkrsa::parse_bundle({bytes, len});
    *out = handle.release();
    return 0;
  });
}

int pmkrsa_bundle_serialize(const pmkrsa_bundle* bundle, int include_private, uint8_t** out, size_t* out_len) {
  return guarded([&] {
    require(bundle != nullptr && out != nullptr && out_len != nullptr, "bundle and outputs must not be NULL");
    const auto bytes = include_private != 0 ? pmkrsa::serialize_private(bundle->bundle)
                                            : pmkrsa::serialize_public(bundle->bundle);
    *out = copy_out(bytes.data(), bytes.size());
    *out_len = bytes.size();
    return 0;
  });
}

void pmkrsa_bundle_free(pmkrsa_bundle* bundle) { delete bundle; }

uint32_t pmkrsa_bundle_bits(const pmkrsa_bundle* bundle) { return bundle == nullptr ? 0 : bundle->bundle.bits; }

size_t pmkrsa_bundle_rows(const pmkrsa_bundle* bundle) { return bundle == nullptr ? 0 : bundle->bundle.rows.size(); }

int pmkrsa_bundle_is_private(const pmkrsa_bundle* bundle) {
  return bundle != nullptr && bundle->bundle.is_private() ? 1 : 0;
}

int pmkrsa_bundle_fingerprint(const pmkrsa_bundle* bundle, size_t row, char out[17]) {
  return guarded([&] {
    require(bundle != nullptr && out != nullptr, "bundle and out must not be NULL");
    require(row < bundle->bundle.rows.size(), "row index out of range");
    const std::string fp = pmkrsa::modulus_fingerprint(bundle->bundle.rows[row].n);
    std::memcpy(out, fp.c_str(), 17);
    return 0;
  });
}

int pmkrsa_encrypt(const pmkrsa_bundle* bundle, const uint8_t* message, size_t len, pmkrsa_rng* rng,
                   uint32_t threads, uint8_t** out, size_t* out_len) {
  return guarded([&] {
    require(bundle != nullptr && rng != nullptr && out != nullptr && out_len != nullptr,
            "bundle, rng and outputs must not be NULL");
    require(message != nullptr || len == 0, "message must not be NULL");
    const auto pack = pmkrsa::encrypt({message, len}, bundle->bundle, *rng->source, parallel_for(threads));
    const auto bytes = pmkrsa::write_container(pack);
    *out = copy_out(bytes.data(), bytes.size());
    *out_len = bytes.size();
    return 0;
  });
}

int pmkrsa_decrypt(const pmkrsa_bundle* bundle, const uint8_t* container, size_t len, uint32_t threads,
                   uint8_t** out, size_t* out_len) {
  return guarded([&] {
    require(bundle != nullptr && out != nullptr && out_len != nullptr, "bundle and outputs must not be NULL");
    require(container != nullptr || len == 0, "container must not be NULL");
    const auto pack = pmkrsa::parse_container({container, len});
    pmkrsa::DecryptOptions options;
    options.parallel = parallel_for(threads);
    const auto plain = pmkrsa::decrypt(pack, bundle->bundle, options);
    *out = copy_out(plain.data(), plain.size());
    *out_len = plain.size();
    return 0;
  });
}

int pmkrsa_selftest(const char* vectors_json, char** report_json) {
  return guarded([&] {
    require(report_json != nullptr, "report_json must not be NULL");
    const auto report = vectors_json == nullptr ? pmkrsa::run_selftest(pmkrsa::builtin_vectors())
                                                : pmkrsa::run_selftest(vectors_json, "vectors file");
    nlohmann::json doc;
    doc["passed"] = report.all_passed();
    doc["vectors"] = nlohmann::json::array();
    for (const auto& r : report.results) {
      doc["vectors"].push_back({{"id", r.id}, {"passed", r.passed}, {"detail", r.detail}});
    }
    *report_json = copy_string(doc.dump(2));
    pmkrsa::require_pass(report);
    return 0;
  });
}

int pmkrsa_bench(const char* request_json, pmkrsa_rng* rng, char** report_json, char** csv) {
  return guarded([&] {
    require(rng != nullptr && report_json != nullptr && csv != nullptr, "rng and outputs must not be NULL");
    const auto request = request_json == nullptr ? nlohmann::json::object() : nlohmann::json::parse(request_json);
    require(request.is_object(), "bench request must be a JSON object");

    auto variants = list_or<std::string>(request, "variants", {"pmkrsa"});
    std::string baseline;
    if (request.contains("baseline")) {
      // The baseline is benchmarked alongside the variants even when not listed.
      baseline = pmkrsa::VariantSpec::parse(request.at("baseline").get<std::string>()).name();
      const bool listed = std::any_of(variants.begin(), variants.end(), [&](const std::string& v) {
        return pmkrsa::VariantSpec::parse(v).name() == baseline;
      });
      if (!listed) variants.push_back(baseline);
    }
    const auto bits = list_or<std::uint32_t>(request, "bits", {2048});
    const auto threads = list_or<unsigned>(request, "threads", {1});
    const auto sizes = list_or<std::uint64_t>(request, "file_bytes", {102400});
    const auto keys = request.value("keys", std::size_t{16});
    pmkrsa::BenchOptions options;
    options.repetitions = request.value("repetitions", options.repetitions);
    options.warmup = request.value("warmup", options.warmup);
    options.time_keygen = request.value("time_keygen", options.time_keygen);

    std::vector<pmkrsa::BenchConfig> configs;
    for (const auto& v : variants) {
      const auto spec = pmkrsa::VariantSpec::parse(v);
      for (auto b : bits) {
        for (auto t : threads) {
          for (auto size : sizes) configs.push_back({spec, b, keys, t, size});
        }
      }
    }
    const auto records = pmkrsa::run_suite(configs, options, *rng->source);

    std::vector<pmkrsa::SpeedupReport> speedups;
    if (!baseline.empty()) {
      for (const auto& candidate : records) {
        if (candidate.variant == baseline) continue;
        for (const auto& base : records) {
          if (base.variant == baseline && base.bits == candidate.bits && base.file_bytes == candidate.file_bytes &&
              base.phase == candidate.phase && base.threads == candidate.threads) {
            speedups.push_back(pmkrsa::speedup(base, candidate));
            break;
          }
        }
      }
    }

    std::optional<pmkrsa::TrendReport> trend;
    std::string trend_error;
    if (bits.size() >= 2) {
      std::vector<pmkrsa::BenchRecord> series;
      const auto& first = configs.front();
      for (const auto& r : records) {
        if (r.variant == first.variant.name() && r.threads == first.threads && r.file_bytes == first.file_bytes) {
          series.push_back(r);
        }
      }
      try {
        trend = pmkrsa::trend_check(series);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TrendViolation) throw;
        trend_error = e.what();
      }
    }

    auto doc = nlohmann::json::parse(pmkrsa::records_to_json(records, speedups, trend));
    if (!trend_error.empty()) doc["trend_violation"] = trend_error;
    *report_json = copy_string(doc.dump(2));
    *csv = copy_string(pmkrsa::records_to_csv(records));
    if (!trend_error.empty()) return fail(ErrorCode::TrendViolation, trend_error);
    return 0;
  });
}

}  // extern "C"
