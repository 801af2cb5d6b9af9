#pragma once

#include <string>
#include <string_view>
#include <vector>

// Known-answer vectors. A vector set is JSON of the form
//   {"vectors": [{"id": "...", "kind": "...", <kind-specific hex fields>}, ...]}
// with kinds rsa, modinv, montgomery, crt, crt_combine, pmkrsa, multiprime.

namespace pmkrsa {

struct VectorResult {
  std::string id;
  bool passed = false;
  std::string detail;  // empty on success
};

struct SelfTestReport {
  std::vector<VectorResult> results;

  bool all_passed() const noexcept;
  std::vector<std::string> failed_ids() const;
};

/// The vector set compiled into the library.
std::string_view builtin_vectors();

/// Evaluates every vector. Unparseable JSON yields a single failed result
/// with id `source`; a malformed vector fails under its own id.
SelfTestReport run_selftest(std::string_view vectors_json, std::string_view source = "builtin");

/// Throws SelfTestFailed naming every failing vector id.
void require_pass(const SelfTestReport& report);

}  // namespace pmkrsa
