// tests/quality_test.cpp

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

#include <random>

#include "longalign/error.hpp"
#include "longalign/quality.hpp"
#include "oracles.hpp"

using namespace longalign;

namespace {

std::u32string random_string(std::mt19937_64& rng, std::size_t max_len, std::size_t alphabet) {
  static const char32_t kLetters[] = U"abcdéλ中 xyz";
  std::u32string s(uniform_index(rng, max_len + 1), U'a');
  for (auto& ch : s) ch = kLetters[uniform_index(rng, std::min<std::size_t>(alphabet, 12))];
  return s;
}

std::vector<FilterInput> with_cers(std::initializer_list<double> cers) {
  std::vector<FilterInput> out;
  int i = 0;
  for (double c : cers) out.push_back({"s" + std::to_string(i++), c, std::nullopt});
  return out;
}

}  // namespace

TEST_CASE("alignment score worked example") {
  // star at frame 0, then two frames on a
  StateChain chain(oracle::as_labels({kStarToken, 1}), 3);
  EmissionMatrix em(3, 3, kDefaultStrideMs,
                    {-3.0f, -3.0f, -0.1f,    // star frame, excluded
                     -0.2f, -1.0f, -3.0f,    // aligned a at -1.0, max -0.2
                     -0.7f, -0.5f, -2.0f});  // aligned a at -0.5, max -0.5
  FramePath path{{1, 3, 3}, 0.0};
  check_path(path, chain);
  AlignmentScore s = alignment_score(em, path, chain);
  CHECK(s.frames == 2);
  CHECK(s.aligned_log_prob == doctest::Approx(-1.5));
  CHECK(s.greedy_log_prob == doctest::Approx(-0.7));
  CHECK(s.value == doctest::Approx(-0.4));

  AlignmentScore tail = alignment_score(em, path, chain, 2, 3);
  CHECK(tail.frames == 1);
  CHECK(tail.value == doctest::Approx(0.0));
  CHECK_THROWS_AS(alignment_score(em, path, chain, 0, 1), DegenerateAlignmentError);
  CHECK_THROWS_AS(alignment_score(em, path, chain, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(alignment_score(em, path, chain, 0, 4), std::invalid_argument);
}

TEST_CASE("argmax-consistent alignment scores exactly zero") {
  std::vector<int> truth = {0, 1, 1, 0, 2, 0, 3, 3, 0};
  EmissionMatrix em = synth_emissions(truth, 5, -0.3f, 4);
  StateChain chain(oracle::as_labels({1, 2, 3}), 5);
  FramePath path = viterbi_streaming(em, chain);
  CHECK(alignment_score(em, path, chain).value == 0.0);
}

TEST_CASE("all-star alignment is degenerate") {
  StateChain chain(oracle::as_labels({kStarToken}), 3);
  EmissionMatrix em(2, 3, kDefaultStrideMs, std::vector<float>(6, -1.0f));
  FramePath path = viterbi_streaming(em, chain);
  CHECK(path.states == std::vector<std::int32_t>{1, 1});
  CHECK_THROWS_AS(alignment_score(em, path, chain), DegenerateAlignmentError);
}

TEST_CASE("score threshold keeps at or above") {
  CHECK(passes_score_threshold(-0.1));
  CHECK_FALSE(passes_score_threshold(-0.3));
  CHECK(passes_score_threshold(-0.2));
  CHECK(passes_score_threshold(0.0, 0.0));
  CHECK_FALSE(passes_score_threshold(-1e-12, 0.0));
}

TEST_CASE("scores are never positive and do not depend on the buffer") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    std::size_t V = 2 + uniform_index(rng, 6);
    std::size_t M = 1 + uniform_index(rng, 8);
    auto tokens = oracle::random_tokens(rng, M, V, 0.2);
    StateChain chain(oracle::as_labels(tokens), V);
    auto em = oracle::random_emissions(rng, 2 * M + uniform_index(rng, 30), V,
                                       i % 2 ? oracle::EmissionKind::kSmooth
                                             : oracle::EmissionKind::kQuantized);
    FramePath p1 = viterbi_streaming(em, chain, {1, 1});
    FramePath p2 = viterbi_full(em, chain);
    try {
      AlignmentScore s1 = alignment_score(em, p1, chain);
      CHECK(s1.value <= 0.0);
      CHECK(alignment_score(em, p2, chain).value == s1.value);
    } catch (const DegenerateAlignmentError&) {
      CHECK_THROWS_AS(alignment_score(em, p2, chain), DegenerateAlignmentError);
    }
  }
}

TEST_CASE("greedy decoding") {
  EmissionMatrix em(6, 3, kDefaultStrideMs,
                    {-1, -0.1f, -2,   // 1
                     -1, -0.1f, -2,   // 1 (merged)
                     -0.1f, -1, -2,   // blank
                     -1, -0.1f, -2,   // 1 again
                     -2, -0.5f, -0.5f,  // tie -> lower index 1 (merged)
                     -1, -2, -0.3f}); // 2
  GreedyDecode g = greedy_decode(em);
  CHECK(g.tokens == std::vector<int>{1, 1, 2});
  CHECK(g.log_prob == doctest::Approx(-0.1 * 4 - 0.5 - 0.3));
  CHECK(greedy_decode(em, 2, 4).tokens == std::vector<int>{1});
  CHECK(greedy_decode(em, 3, 3).tokens.empty());
}

TEST_CASE("cer examples") {
  CHECK(cer("abc", "abc") == 0.0);
  CHECK(cer("kitten", "sitting") == doctest::Approx(0.5));
  CHECK(cer("abc", "") == 1.0);
  CHECK_THROWS_AS(cer("", "abc"), std::invalid_argument);
  CHECK_THROWS_AS(cer("!!", "abc"), std::invalid_argument);  // empty after normalization
  CHECK(cer("Hello, World!", "hello world") == 0.0);
  CHECK(cer("Hello", "hello", false) == doctest::Approx(0.2));
  CHECK(cer("ab", "abcd") == 1.0);
  CHECK(cer("ab", "abcdef") == 2.0);
}

TEST_CASE("edit distance matches the full-table oracle") {
  std::mt19937_64 rng(1234);
  for (int i = 0; i < 1000; ++i) {
    auto a = random_string(rng, 15, 2 + i % 10);
    auto b = random_string(rng, 15, 2 + i % 10);
    CHECK(edit_distance(a, b) == oracle::levenshtein(a, b));
  }
  CHECK(edit_distance(U"", U"") == 0);
  CHECK(edit_distance(U"中文", U"中") == 1);
}

TEST_CASE("edit distance metric properties") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 300; ++i) {
    auto x = random_string(rng, 10, 4);
    auto y = random_string(rng, 10, 4);
    auto z = random_string(rng, 10, 4);
    CHECK(edit_distance(x, x) == 0);
    CHECK(edit_distance(x, y) == edit_distance(y, x));
    CHECK(edit_distance(x, z) <= edit_distance(x, y) + edit_distance(y, z));
    if (!x.empty()) {
      double rate = static_cast<double>(edit_distance(x, y)) / static_cast<double>(x.size());
      CHECK(rate <= std::max(1.0, static_cast<double>(y.size()) / static_cast<double>(x.size())));
    }
  }
}

TEST_CASE("sample filter") {
  auto report = filter_samples(with_cers({0.02, 0.10, 0.11}), 0.10);
  REQUIRE(report.entries.size() == 3);
  CHECK(report.entries[0].kept);
  CHECK(report.entries[1].kept);
  CHECK_FALSE(report.entries[2].kept);
  CHECK(report.entries[2].reason == "cer_above_threshold");
  CHECK(report.kept() == 2);
  CHECK(report.dropped() == 1);

  CHECK(filter_samples({}, 0.1).entries.empty());
  auto zero = filter_samples(with_cers({0.0, 0.01, 0.0}), 0.0);
  CHECK(zero.kept() == 2);
  CHECK_FALSE(zero.entries[1].kept);

  CHECK_THROWS_AS(filter_samples({}, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(filter_samples({}, 1.5), std::invalid_argument);

  std::vector<FilterInput> scored = {{"a", 0.0, -0.1}, {"b", 0.0, -0.3}, {"c", 0.5, -0.1},
                                     {"d", 0.0, std::nullopt}};
  auto s = filter_samples(scored, 0.1, -0.2);
  CHECK(s.entries[0].kept);
  CHECK(s.entries[1].reason == "low_alignment_score");
  CHECK(s.entries[2].reason == "cer_above_threshold");
  CHECK(s.entries[3].kept);
}

TEST_CASE("filtering is idempotent") {
  std::mt19937_64 rng(5);
  std::vector<FilterInput> in;
  for (int i = 0; i < 500; ++i)
    in.push_back({std::to_string(i), unit_uniform(rng) * 0.3, -unit_uniform(rng) * 0.5});
  auto first = filter_samples(in, 0.1, -0.2);
  std::vector<FilterInput> survivors;
  for (const auto& e : first.entries)
    if (e.kept) survivors.push_back({e.id, e.cer, e.score});
  auto second = filter_samples(survivors, 0.1, -0.2);
  CHECK(second.dropped() == 0);
  CHECK(first.kept() + first.dropped() == in.size());
}

TEST_CASE("recording filter") {
  auto report = filter_recordings(with_cers({0.03, 0.05, 0.08}));
  CHECK(report.entries[0].kept);
  CHECK(report.entries[1].kept);
  CHECK_FALSE(report.entries[2].kept);
  CHECK(report.entries[2].reason == "recording_cer_above_threshold");
  CHECK(filter_recordings(with_cers({0.0, 0.01, 0.049})).dropped() == 0);

  std::mt19937_64 rng(40);
  std::vector<FilterInput> mixed;
  for (int i = 0; i < 100; ++i) {
    double v = i < 40 ? 0.05 + 0.001 + unit_uniform(rng) * 0.5 : unit_uniform(rng) * 0.05;
    mixed.push_back({std::to_string(i), v, std::nullopt});
  }
  std::shuffle(mixed.begin(), mixed.end(), rng);
  CHECK(filter_recordings(mixed).dropped() == 40);
}
