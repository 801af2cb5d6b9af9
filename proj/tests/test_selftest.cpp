#include <doctest.h>

#include <fstream>
#include <iterator>

#include <json.hpp>

#include "pmkrsa/selftest.hpp"
#include "support.hpp"

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(PMKRSA_FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_SUITE("selftest") {
  TEST_CASE("built-in vectors pass") {
    const auto report = pmkrsa::run_selftest(pmkrsa::builtin_vectors());
    for (const auto& r : report.results) CHECK_MESSAGE(r.passed, r.id << ": " << r.detail);
    CHECK(report.all_passed());
    CHECK_NOTHROW(pmkrsa::require_pass(report));
    bool has_toy = false;
    for (const auto& r : report.results) has_toy = has_toy || r.id == "pmkrsa-toy-1";
    CHECK(has_toy);
  }

  TEST_CASE("shipped vector file matches the built-in set") {
    const auto file = nlohmann::json::parse(read_fixture("vectors.json"));
    CHECK(file == nlohmann::json::parse(pmkrsa::builtin_vectors()));
  }

  TEST_CASE("a corrupted vector is named") {
    auto doc = nlohmann::json::parse(pmkrsa::builtin_vectors());
    for (auto& v : doc["vectors"]) {
      if (v["id"] == "pmkrsa-toy-1") v["c_star"] = "bca";
    }
    const auto report = pmkrsa::run_selftest(doc.dump(), "corrupt.json");
    CHECK_FALSE(report.all_passed());
    CHECK(report.failed_ids() == std::vector<std::string>{"pmkrsa-toy-1"});
    try {
      pmkrsa::require_pass(report);
      FAIL("expected SelfTestFailed");
    } catch (const pmkrsa::Error& e) {
      CHECK(e.code() == pmkrsa::ErrorCode::SelfTestFailed);
      CHECK(std::string(e.what()).find("pmkrsa-toy-1") != std::string::npos);
    }
  }

  TEST_CASE("malformed inputs fail cleanly") {
    const auto garbage = pmkrsa::run_selftest("{not json", "broken.json");
    CHECK(garbage.failed_ids() == std::vector<std::string>{"broken.json"});
    const auto missing = pmkrsa::run_selftest(R"({"vectors": [{"id": "x", "kind": "rsa", "n": "zz"}]})");
    CHECK(missing.failed_ids() == std::vector<std::string>{"x"});
    const auto unknown = pmkrsa::run_selftest(R"({"vectors": [{"id": "y", "kind": "dual-rsa"}]})");
    CHECK(unknown.failed_ids() == std::vector<std::string>{"y"});
    CHECK(testing::code_of([&] { pmkrsa::require_pass(pmkrsa::SelfTestReport{}); }) ==
          pmkrsa::ErrorCode::SelfTestFailed);
  }
}
