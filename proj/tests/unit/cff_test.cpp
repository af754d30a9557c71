#include <catch_amalgamated.hpp>

#include <random>

#include "smecs/error.hpp"
#include "smecs/harvest.hpp"

using namespace smecs;

namespace {

Json cff(std::string_view text) { return parse_cff(text).data; }

ErrorCode failure(std::string_view text) {
  try {
    parse_cff(text);
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected parse_cff to fail");
  return ErrorCode::MalformedJson;
}

} // namespace

TEST_CASE("typical citation file") {
  const char *text = R"(# comment
cff-version: 1.2.0
message: "If you use this software, please cite it."
title: My Research Tool
version: 2.0.1
date-released: 2023-07-15
license: Apache-2.0
keywords:
  - simulation
  - "fluid dynamics"
authors:
  - family-names: Doe
    given-names: Jane
    orcid: https://orcid.org/0000-0002-1825-0097
  - name: "The ACME Team"
identifiers:
  - type: doi
    value: 10.5281/zenodo.1
)";
  SourceRecord r = parse_cff(text);
  CHECK(r.source == SourceKind::CffFile);
  CHECK(r.warnings.empty());
  CHECK(r.data["title"] == "My Research Tool");
  CHECK(r.data["version"] == "2.0.1");
  CHECK(r.data["date-released"] == "2023-07-15");
  CHECK(r.data["keywords"] == Json::array({"simulation", "fluid dynamics"}));
  CHECK(r.data["authors"][0]["orcid"] == "https://orcid.org/0000-0002-1825-0097");
  CHECK(r.data["authors"][1]["name"] == "The ACME Team");
  CHECK(r.data["identifiers"][0]["value"] == "10.5281/zenodo.1");
}

TEST_CASE("scalar typing") {
  Json d = cff("a: 12\nb: -3\nc: true\nd: null\ne: ~\nf: 1.5\ng: '007'\nh: False\n");
  CHECK(d["a"] == 12);
  CHECK(d["b"] == -3);
  CHECK(d["c"] == true);
  CHECK(d["d"].is_null());
  CHECK(d["e"].is_null());
  CHECK(d["f"] == "1.5");
  CHECK(d["g"] == "007");
  CHECK(d["h"] == false);
}

TEST_CASE("quoted scalars") {
  Json d = cff(R"(a: "tab\there \"q\" \u00e9"
b: 'it''s'
c: "line one
  line two"
d: plain # trailing comment
e: "# not a comment"
)");
  CHECK(d["a"] == "tab\there \"q\" \xc3\xa9");
  CHECK(d["b"] == "it's");
  CHECK(d["c"] == "line one line two");
  CHECK(d["d"] == "plain");
  CHECK(d["e"] == "# not a comment");
}

TEST_CASE("block scalars") {
  Json d = cff("lit: |\n  one\n  two\n\nfold: >\n  one\n  two\n\n  three\nstrip: |-\n  x\nkeep: |+\n  y\n\nend: 1\n");
  CHECK(d["lit"] == "one\ntwo\n");
  CHECK(d["fold"] == "one two\nthree\n");
  CHECK(d["strip"] == "x");
  CHECK(d["keep"] == "y\n\n");
  CHECK(d["end"] == 1);
}

TEST_CASE("plain multi-line scalars fold") {
  Json d = cff("abstract: This is a long\n  abstract over\n  three lines.\nnext: x\n");
  CHECK(d["abstract"] == "This is a long abstract over three lines.");
}

TEST_CASE("flow collections") {
  Json d = cff("keywords: [a, \"b c\", 3]\nref: {type: doi, value: '10.1/x'}\nempty: []\n");
  CHECK(d["keywords"] == Json::array({"a", "b c", 3}));
  CHECK(d["ref"]["type"] == "doi");
  CHECK(d["ref"]["value"] == "10.1/x");
  CHECK(d["empty"] == Json::array());
}

TEST_CASE("nested sequences and maps") {
  Json d = cff("authors:\n- family-names: A\n  affiliation: X\n-   family-names: B\nrefs:\n  - - 1\n    - 2\n");
  CHECK(d["authors"].size() == 2);
  CHECK(d["authors"][0]["affiliation"] == "X");
  CHECK(d["authors"][1]["family-names"] == "B");
  CHECK(d["refs"][0] == Json::array({1, 2}));
}

TEST_CASE("document markers and directives") {
  Json d = cff("%YAML 1.2\n---\ntitle: x\n...\n");
  CHECK(d["title"] == "x");
}

TEST_CASE("missing cff-version is a warning, not an error") {
  SourceRecord r = parse_cff("title: x\n");
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0] == kWarningMissingCffVersion);
}

TEST_CASE("structural errors") {
  CHECK(failure("") == ErrorCode::MalformedCff);
  CHECK(failure("# only a comment\n") == ErrorCode::MalformedCff);
  CHECK(failure("- a\n- b\n") == ErrorCode::MalformedCff);
  CHECK(failure("title: x\ntitle: y\n") == ErrorCode::MalformedCff);
  CHECK(failure("a:\n\t- b\n") == ErrorCode::MalformedCff);
  CHECK(failure("a: &anchor x\n") == ErrorCode::MalformedCff);
  CHECK(failure("a: *alias\n") == ErrorCode::MalformedCff);
  CHECK(failure("a: !!str x\n") == ErrorCode::MalformedCff);
  CHECK(failure("a: \"unterminated\n") == ErrorCode::MalformedCff);
  CHECK(failure("a: [1, 2\n") == ErrorCode::MalformedCff);
  CHECK(failure("a: b: c\n") == ErrorCode::MalformedCff);
}

TEST_CASE("error messages carry a line number") {
  try {
    parse_cff("title: x\nauthors:\n  - name: a\n  bad\n");
    FAIL("expected MalformedCff");
  } catch (const Error &e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("deep nesting is bounded") {
  std::string text = "a: ";
  for (int i = 0; i < 200; ++i)
    text += "[";
  CHECK(failure(text + "\n") == ErrorCode::MalformedCff);
}

TEST_CASE("the reader is total over random input") {
  const std::string seeds[] = {
      "cff-version: 1.2.0\ntitle: \"x\"\nauthors:\n  - family-names: D\n    given-names: J\n",
      "keywords: [a, {b: c}, 'd']\nabstract: |\n  text\n  more\n",
      "a:\n  b:\n    - c: 1\n      d: >-\n        folded\n"};
  const std::string noise = " \t\n:-[]{}'\"#|>&*!%,?\\u0\xc3\xa9";
  std::mt19937 rng(99);
  for (int i = 0; i < 3000; ++i) {
    std::string text = seeds[static_cast<std::size_t>(i) % 3];
    int edits = std::uniform_int_distribution<int>(1, 8)(rng);
    for (int e = 0; e < edits && !text.empty(); ++e) {
      std::size_t pos = std::uniform_int_distribution<std::size_t>(0, text.size() - 1)(rng);
      char c = noise[std::uniform_int_distribution<std::size_t>(0, noise.size() - 1)(rng)];
      switch (rng() % 3) {
      case 0: text[pos] = c; break;
      case 1: text.insert(pos, 1, c); break;
      default: text.erase(pos, 1); break;
      }
    }
    try {
      SourceRecord r = parse_cff(text);
      REQUIRE(r.data.is_object());
    } catch (const Error &e) {
      REQUIRE(e.code() == ErrorCode::MalformedCff);
    }
  }
}
