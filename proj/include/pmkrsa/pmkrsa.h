/* C interface to the pmkrsa library.
 *
 * Every fallible call returns a status code (PMKRSA_OK on success) and, on
 * failure, leaves a message retrievable with pmkrsa_last_error() on the
 * calling thread. Buffers returned through out-parameters are allocated by
 * the library and released with pmkrsa_free(). Handles are released with
 * their matching *_free function; passing NULL to any free function is a
 * no-op.
 *
 * Status codes are stable and are also the exit codes of the pmkrsa tool.
 */
#ifndef PMKRSA_H
#define PMKRSA_H

#include <stddef.h>
#include <stdint.h>

#if defined(PMKRSA_BUILDING_LIBRARY)
#define PMKRSA_API __attribute__((visibility("default")))
#else
#define PMKRSA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum pmkrsa_status {
  PMKRSA_OK = 0,
  PMKRSA_E_INVALID_ARGUMENT = 1,
  PMKRSA_E_IO = 2,
  PMKRSA_E_MALFORMED_KEY_FILE = 3,
  PMKRSA_E_BAD_MAGIC = 4,
  PMKRSA_E_UNSUPPORTED_VERSION = 5,
  PMKRSA_E_TRUNCATED_BODY = 6,
  PMKRSA_E_TRAILING_GARBAGE = 7,
  PMKRSA_E_LAYOUT_MISMATCH = 8,
  PMKRSA_E_SENTINEL_VIOLATION = 9,
  PMKRSA_E_NOT_INVERTIBLE = 10,
  PMKRSA_E_MESSAGE_TOO_LARGE = 11,
  PMKRSA_E_EVEN_MODULUS = 12,
  PMKRSA_E_ZERO_MODULUS = 13,
  PMKRSA_E_NOT_COPRIME = 14,
  PMKRSA_E_TASK_FAILED = 15,
  PMKRSA_E_MISMATCHED_CONFIGS = 16,
  PMKRSA_E_TREND_VIOLATION = 17,
  PMKRSA_E_SELFTEST_FAILED = 18,
  PMKRSA_E_BLIND_GENERATION_FAILED = 19,
  PMKRSA_E_INTERNAL = 20
};

typedef struct pmkrsa_bundle pmkrsa_bundle;
typedef struct pmkrsa_rng pmkrsa_rng;

/* Message for the most recent failure on this thread ("" if none). */
PMKRSA_API const char* pmkrsa_last_error(void);
/* Symbolic name of a status code, e.g. "SentinelViolation". */
PMKRSA_API const char* pmkrsa_status_name(int status);
PMKRSA_API void pmkrsa_free(void* buffer);

/* Random sources. A seeded source takes 64 hex characters. */
PMKRSA_API int pmkrsa_rng_new_os(pmkrsa_rng** out);
PMKRSA_API int pmkrsa_rng_new_seeded(const char* seed_hex, pmkrsa_rng** out);
PMKRSA_API void pmkrsa_rng_free(pmkrsa_rng* rng);

/* Key bundles. `exponent_hex` may be NULL for the default 65537.
 * `threads` = 0 uses every logical core. */
PMKRSA_API int pmkrsa_bundle_generate(uint32_t bits, uint32_t rows, const char* exponent_hex, uint32_t threads,
                                      pmkrsa_rng* rng, pmkrsa_bundle** out);
PMKRSA_API int pmkrsa_bundle_parse(const uint8_t* bytes, size_t len, pmkrsa_bundle** out);
PMKRSA_API int pmkrsa_bundle_serialize(const pmkrsa_bundle* bundle, int include_private, uint8_t** out,
                                       size_t* out_len);
PMKRSA_API void pmkrsa_bundle_free(pmkrsa_bundle* bundle);
PMKRSA_API uint32_t pmkrsa_bundle_bits(const pmkrsa_bundle* bundle);
PMKRSA_API size_t pmkrsa_bundle_rows(const pmkrsa_bundle* bundle);
PMKRSA_API int pmkrsa_bundle_is_private(const pmkrsa_bundle* bundle);
/* Writes 16 hex characters plus a terminating NUL into `out`. */
PMKRSA_API int pmkrsa_bundle_fingerprint(const pmkrsa_bundle* bundle, size_t row, char out[17]);

/* Encrypts `message` into a PMK1 container. */
PMKRSA_API int pmkrsa_encrypt(const pmkrsa_bundle* bundle, const uint8_t* message, size_t len, pmkrsa_rng* rng,
                              uint32_t threads, uint8_t** out, size_t* out_len);
/* Decrypts a PMK1 container with a private bundle. */
PMKRSA_API int pmkrsa_decrypt(const pmkrsa_bundle* bundle, const uint8_t* container, size_t len, uint32_t threads,
                              uint8_t** out, size_t* out_len);

/* Runs the known-answer vectors (built-in set when `vectors_json` is NULL)
 * and returns a JSON report. Status is PMKRSA_E_SELFTEST_FAILED when any
 * vector fails; the report is produced either way. */
PMKRSA_API int pmkrsa_selftest(const char* vectors_json, char** report_json);

/* Runs a benchmark described by a JSON request:
 *   {"variants": ["pmkrsa", "rsa", "multiprime:3"], "bits": [2048],
 *    "keys": 16, "threads": [1], "file_bytes": [102400],
 *    "repetitions": 5, "warmup": 1, "time_keygen": true,
 *    "baseline": "rsa"}
 * Every field is optional. Returns the JSON report and the CSV table. When
 * records span two or more key lengths a trend check runs; a violation is
 * reported as PMKRSA_E_TREND_VIOLATION with both outputs still filled. */
PMKRSA_API int pmkrsa_bench(const char* request_json, pmkrsa_rng* rng, char** report_json, char** csv);

#ifdef __cplusplus
}
#endif

#endif /* PMKRSA_H */
