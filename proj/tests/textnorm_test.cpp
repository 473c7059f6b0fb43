// tests/textnorm_test.cpp

// Copyright 2026  The longalign Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <random>
#include <sstream>

#include "longalign/error.hpp"
#include "longalign/quality.hpp"
#include "longalign/random.hpp"
#include "longalign/textnorm.hpp"
#include "golden.hpp"
#include "test_util.hpp"

using namespace longalign;
using longalign::testing::TempDir;
using golden::cyrillic_table;
using golden::in_alignment_charset;
using golden::kStar;

namespace {

// Random text mixing ASCII, punctuation, markup, digits, accents and other scripts.
std::string random_text(std::mt19937_64& rng, std::size_t pieces) {
  static const std::vector<std::string> kPieces = {
      "a", "b", "z", "Q", " ", "  ", "\t", ",", ".", "!", "?", "'", "’", "\"", "“", "”",
      "-", "\u2014", "(", ")", "[", "]", "{", "}", "&gt;", "&amp;", "&nbsp;", "<i>", "</i>",
      "0", "1", "42", "٣", "é", "é", "Ç", "Ç", "ß", "æ", "ø", "ł", "ﬁ", "Ａ",
      "①", "​", "λ", "Ж", "中", "ʻ", "ɔ", "ñ", "Ω"};
  std::string out;
  for (std::size_t i = 0; i < pieces; ++i) out += kPieces[uniform_index(rng, kPieces.size())];
  return out;
}

}  // namespace

TEST_CASE("golden file") {
  auto cases = golden::load("tests/data/textnorm_golden.tsv");
  CHECK(cases.size() >= 40);
  for (const auto& g : cases) {
    CAPTURE(g.line);
    CAPTURE(g.input);
    CHECK(golden::check(g) == "");
  }
}

TEST_CASE("normalize is idempotent and composes with romanize into the charset") {
  std::mt19937_64 rng(31337);
  for (int i = 0; i < 2000; ++i) {
    std::string raw = random_text(rng, 1 + uniform_index(rng, 12));
    CAPTURE(raw);
    std::string once = normalize(raw).text;
    CHECK(normalize(once).text == once);
    RomanizeResult r = romanize(starify(once).text);
    CHECK(in_alignment_charset(r.text));
    CHECK(romanize(r.text).text == r.text);
    CHECK(romanize(r.text).dropped == 0);
  }
}

TEST_CASE("destarify inverts starify") {
  std::mt19937_64 rng(8080);
  for (int i = 0; i < 1000; ++i) {
    std::string text;
    std::size_t words = 1 + uniform_index(rng, 6);
    for (std::size_t w = 0; w < words; ++w) {
      if (w) text.push_back(' ');
      std::size_t chars = 1 + uniform_index(rng, 6);
      for (std::size_t k = 0; k < chars; ++k) {
        if (uniform_index(rng, 3) == 0) {
          text.push_back(static_cast<char>('0' + uniform_index(rng, 10)));
        } else {
          text.push_back(static_cast<char>('a' + uniform_index(rng, 26)));
        }
      }
    }
    NormalizedText s = starify(text);
    CHECK(destarify(s.text, s.digits) == text);
    for (const auto& [k, v] : s.digits) {
      CHECK(k >= 1);
      CHECK(k < count_stars(s.text));
    }
  }
}

TEST_CASE("destarify across spans continues the star numbering") {
  NormalizedText s = starify(normalize_verses(std::vector<std::string>{"verse 1 of 2", "and 3"}));
  CHECK(s.text == kStar + " verse " + kStar + " of " + kStar + " and " + kStar);
  CHECK(s.word_verse == std::vector<int>{-1, 0, 0, 0, 0, 1, 1});
  std::vector<std::string> spans = {kStar, "verse " + kStar + " of " + kStar, "and " + kStar};
  auto restored = destarify(spans, s.digits);
  CHECK(restored == std::vector<std::string>{"", "verse 1 of 2", "and 3"});
  CHECK(destarify(kStar + " x", {}) == "x");
}

TEST_CASE("normalize_verses skips empty verses") {
  NormalizedText n = normalize_verses(std::vector<std::string>{"A b", "...", "C"});
  CHECK(n.text == "a b c");
  CHECK(n.word_verse == std::vector<int>{0, 0, 2});
  CHECK(normalize_verses(std::vector<std::string>{}).text.empty());
}

TEST_CASE("invalid UTF-8 is rejected") {
  CHECK_THROWS_AS(normalize("ab\xff"), std::invalid_argument);
  CHECK_THROWS_AS(normalize("\xc3"), std::invalid_argument);
  CHECK_THROWS_AS(romanize("\xe2\x80"), std::invalid_argument);
}

TEST_CASE("brackets") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> verses;
    for (std::size_t v = 0; v < 1 + uniform_index(rng, 10); ++v)
      verses.push_back(random_text(rng, uniform_index(rng, 8)));
    double rate = bracket_rate(verses);
    CHECK(rate >= 0.0);
    CHECK(rate <= 1.0);
    for (const auto& v : verses) {
      std::string s = strip_brackets(v);
      CHECK(s.size() <= v.size());
      CHECK(s.find_first_of("()[]{}") == std::string::npos);
    }
  }
  CHECK(bracket_rate({}) == 0.0);
  CHECK_FALSE(brackets_flagged(0.0299999));
  CHECK(brackets_flagged(0.03));
  CHECK(brackets_flagged(0.05, 0.05));
}

TEST_CASE("romanize counts dropped characters") {
  RomanizeResult r = romanize("中文 abc");
  CHECK(r.text == "abc");
  CHECK(r.dropped == 2);
  CHECK(romanize("abc").dropped == 0);
  CHECK(romanize("").text.empty());
}

TEST_CASE("romanization table") {
  auto table = RomanizationTable::from_entries({{"s", "x"}, {"sh", "y"}});
  CHECK(romanize("shas", &table).text == "yax");
  CHECK(table.size() == 2);

  TempDir dir;
  testing::spit(dir.file("ok.tsv"), "с\ts\nт\tt\r\n\nо\to\nп\tp\n");
  auto loaded = RomanizationTable::load(dir.file("ok.tsv"));
  CHECK(loaded.size() == 4);
  CHECK(romanize("стоп", &loaded).text == "stop");

  testing::spit(dir.file("notab.tsv"), "с s\n");
  CHECK_THROWS_AS(RomanizationTable::load(dir.file("notab.tsv")), FormatError);
  testing::spit(dir.file("nosrc.tsv"), "\ts\n");
  CHECK_THROWS_AS(RomanizationTable::load(dir.file("nosrc.tsv")), FormatError);
  testing::spit(dir.file("extra.tsv"), "с\ts\tq\n");
  CHECK_THROWS_AS(RomanizationTable::load(dir.file("extra.tsv")), FormatError);
  testing::spit(dir.file("bad.tsv"), "\xff\ts\n");
  CHECK_THROWS_AS(RomanizationTable::load(dir.file("bad.tsv")), FormatError);
  CHECK_THROWS_AS(RomanizationTable::load(dir.file("missing.tsv")), FormatError);

  CHECK(Romanizer::from_scheme("builtin").scheme() == "builtin");
  CHECK(Romanizer::from_scheme("table:" + dir.file("ok.tsv"))("стоп").text == "stop");
  CHECK_THROWS_AS(Romanizer::from_scheme("uroman"), std::invalid_argument);
  CHECK_THROWS_AS(Romanizer::from_scheme("table:"), std::invalid_argument);
  CHECK_THROWS_AS(Romanizer::from_scheme("table:" + dir.file("missing.tsv")), FormatError);
}

TEST_CASE("split_words") {
  CHECK(split_words("  a b  c ") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_words("").empty());
}
