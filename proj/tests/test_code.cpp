#include <random>

#include "doctest.h"
#include "morseflow/code.hpp"

using namespace morseflow;

namespace {
std::string roundtrip(const std::string& s) {
  auto p = parse_code(s);
  REQUIRE(p.ok);
  return serialize_code(p.code);
}
}  // namespace

TEST_CASE("worked codes parse and keep their canonical spelling") {
  const char* codes[] = {
      "{12]0[}[123]{3}",
      "{[]0}",
      "SN+^A[123]{12]0[}{3}",
      "SN-^A[123]{1]0[3}{2}",
      "SN+^B{(12)1]0[}{2}",
      "SN-^B{(12)]0[2}{1}",
      "BSN+^A{[1]0[]}[1]",
      "BSN+^B{[(1)]0}[1]",
      "HS+^A{12]0[}[123]{3}",
      "HS+^B{1}[123]{23]0[}",
      "HN+^A{1}[123]{23]0[}",
      "HN+^B{[12]0}[123]{3}",
      "BDS^A{120}[1][2]",
      "BDS^A{12}{1]0[3}[23]",
      "BDS^B{1}[12(3)]{23]0[}",
      "SC{12]0[}[2]",
      "BSC{12}{1}{2]0[}",
  };
  for (const char* c : codes) {
    CAPTURE(c);
    CHECK(roundtrip(c) == c);
  }
}

TEST_CASE("underscore and unsigned spellings normalize") {
  CHECK(roundtrip("SN_+^A[123]{12]0[}{3}") == "SN+^A[123]{12]0[}{3}");
  CHECK(roundtrip("BSN_-^B{(1)1]0[}[1]") == "BSN-^B{(1)1]0[}[1]");
  CHECK(roundtrip("HSC{10[2]0}[2]") == "HSC+{10[2]0}[2]");
  CHECK(roundtrip("HSC_-{10[2]0}[2]") == "HSC-{10[2]0}[2]");
}

TEST_CASE("whitespace is insignificant and blanks survive") {
  CHECK(roundtrip(" { 1 2 ] 0 [ } [ 1 2 3 ] { 3 } ") == "{12]0[}[123]{3}");
  CHECK(roundtrip("BSN+^B{10}{12]0[3( ) }") == "BSN+^B{10}{12]0[3( )}");
  CHECK(roundtrip("BSN+^B{10}{12]0[3()}") == "BSN+^B{10}{12]0[3( )}");
}

TEST_CASE("the stray-brace typo is repaired with a warning") {
  auto p = parse_code("HN+^A{1}[123]{23}0[}");
  REQUIRE(p.ok);
  CHECK(serialize_code(p.code) == "HN+^A{1}[123]{23]0[}");
  REQUIRE(p.warnings.size() == 1);
  CHECK(p.warnings[0].code == DiagCode::RepairedBracket);
}

TEST_CASE("errors carry positions") {
  auto p = parse_code("{12]0[");
  REQUIRE(!p.ok);
  CHECK(p.error.code == DiagCode::UnbalancedBracket);

  p = parse_code("[0]");
  REQUIRE(!p.ok);
  CHECK(p.error.code == DiagCode::IllegalTokenInContext);

  p = parse_code("XX{1}");
  REQUIRE(!p.ok);
  CHECK(p.error.code == DiagCode::BadPrefix);

  p = parse_code("");
  REQUIRE(!p.ok);
  CHECK(p.error.code == DiagCode::EmptyCode);

  p = parse_code("{1,2}");  // commas are reserved for two-digit codes
  REQUIRE(!p.ok);
  CHECK(p.error.code == DiagCode::CommaRuleViolation);
}

TEST_CASE("comma mode round-trips two-digit indices") {
  auto p = parse_code("{1,10]0[}[1,10]");
  REQUIRE(p.ok);
  CHECK(p.code.comma_mode);
  CHECK(serialize_code(p.code) == "{1,10]0[}[1,10]");

  // without commas, digits are independent tokens
  auto q = parse_code("{10}");
  REQUIRE(q.ok);
  REQUIRE(q.code.lists[0].items.size() == 2);
  CHECK(q.code.lists[0].items[0].num == 1);
  CHECK(q.code.lists[0].items[1].kind == TokKind::Zero);
}

TEST_CASE("start-fragment rules of the prefix table") {
  auto findings = [](const char* s) {
    auto p = parse_code(s);
    REQUIRE(p.ok);
    return validate_syntax(p.code);
  };
  CHECK(findings("SN+^A[123]{12]0[}{3}").empty());
  CHECK(!findings("SN+^A{123}[12]0[}").empty());
  CHECK(findings("BSN+^B{[(1)]0}[1]").empty());
  CHECK(findings("BSN+^A{[1]0[]}[1]").empty());
  CHECK(findings("HS+^A{12]0[}[123]{3}").empty());
  CHECK(findings("HS+^B{1}[123]{23]0[}").empty());
  CHECK(findings("HN+^A{1}[123]{23]0[}").empty());
  CHECK(findings("HN+^B{[12]0}[123]{3}").empty());
  CHECK(findings("BDS^A{120}[1][2]").empty());
  CHECK(findings("BDS^B{1}[12(3)]{23]0[}").empty());
  CHECK(findings("BSN+^B{10}{12]0[3( )}").empty());
  // HS A-code whose first 1 is not in brackets
  CHECK(!findings("HS+^A{1}[123]{23]0[}").empty());
  // HN A-code whose second 1 is not in an internal list
  CHECK(!findings("HN+^A{1}{[1]0}").empty());
}

TEST_CASE("fuzzing the parser never crashes") {
  std::mt19937 rng(20240901);
  const char alphabet[] = "{}[]()0123456789, SNBHDC+-^_ab\xff\xc3";
  for (int iter = 0; iter < 20000; iter++) {
    std::uniform_int_distribution<int> len(0, 40);
    std::string s;
    int k = len(rng);
    std::uniform_int_distribution<int> pick(0, sizeof(alphabet) - 2);
    for (int i = 0; i < k; i++) s += alphabet[pick(rng)];
    auto p = parse_code(s);
    if (p.ok) {
      // whatever parses must round-trip through its canonical spelling
      auto q = parse_code(serialize_code(p.code));
      CHECK(q.ok);
      CHECK(serialize_code(q.code) == serialize_code(p.code));
    }
  }
}
