// tests/corpus_test.cpp

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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "longalign/corpus.hpp"
#include "longalign/error.hpp"
#include "longalign/random.hpp"
#include "test_util.hpp"

using namespace longalign;
using longalign::testing::TempDir;

namespace {

ManifestRecord rec(std::string id, std::string book, double seconds, std::string recording = "r1",
                   std::string language = "xaa") {
  ManifestRecord r;
  r.id = std::move(id);
  r.book = std::move(book);
  r.duration_s = seconds;
  r.recording = std::move(recording);
  r.language = std::move(language);
  return r;
}

// Two verses per book, ten minutes each.
std::vector<ManifestRecord> recording_with(const std::vector<std::string>& books,
                                           const std::string& recording) {
  std::vector<ManifestRecord> out;
  for (const auto& b : books) {
    for (int v = 0; v < 2; ++v)
      out.push_back(rec(recording + "_" + b + "_" + std::to_string(v), b, 600, recording));
  }
  return out;
}

std::map<std::string, double> seconds_by_split(const std::vector<ManifestRecord>& records) {
  std::map<std::string, double> out;
  for (const auto& r : records) out[std::string(split_name(r.split))] += r.duration_s;
  return out;
}

}  // namespace

TEST_CASE("split names") {
  for (auto s : {Split::kUnassigned, Split::kTrain, Split::kDev, Split::kTest})
    CHECK(parse_split(split_name(s)) == s);
  CHECK_THROWS_AS(parse_split("validation"), std::invalid_argument);
}

TEST_CASE("manifest round trip keeps unknown keys") {
  TempDir dir;
  auto a = rec("a", "MAT", 3.5);
  a.chapter = 2;
  a.verse = 7;
  a.start_frame = 10;
  a.end_frame = 185;
  a.raw_text = "In the beginning,";
  a.text = "in the beginning";
  a.split = Split::kDev;
  a.score = -0.125;
  a.cer = 0.02;
  a.extra["speaker"] = "s1";
  auto b = rec("b", "MRK", 1.0);
  std::vector<ManifestRecord> records = {a, b};
  write_manifest(dir.file("m.jsonl"), records);
  auto back = read_manifest(dir.file("m.jsonl"));
  REQUIRE(back.size() == 2);
  CHECK(to_json(back[0]) == to_json(a));
  CHECK(to_json(back[1]) == to_json(b));
  CHECK(back[0].extra["speaker"] == "s1");
  CHECK_FALSE(back[1].score.has_value());

  CHECK_THROWS_AS(record_from_json(nlohmann::json{{"duration_s", 1.0}}), FormatError);
  CHECK_THROWS_AS(record_from_json(nlohmann::json{{"id", "x"}, {"duration_s", 0.0}}), FormatError);
  CHECK_THROWS_AS(record_from_json(nlohmann::json{{"id", "x"}, {"duration_s", 1.0}, {"split", "val"}}),
                  FormatError);
  CHECK_THROWS_AS(record_from_json(nlohmann::json::array()), FormatError);
}

TEST_CASE("book split on a full recording") {
  auto records = recording_with(new_testament_books(), "r1");
  auto out = split_by_book(records);
  std::set<std::string> train_books;
  for (const auto& r : out) {
    if (r.book == "MRK") CHECK(r.split == Split::kDev);
    else if (r.book == "JHN") CHECK(r.split == Split::kTest);
    else {
      CHECK(r.split == Split::kTrain);
      train_books.insert(r.book);
    }
  }
  CHECK(train_books.size() == 25);
  CHECK(split_by_book({}).empty());
}

TEST_CASE("same book layout gives the same split across recordings") {
  std::vector<std::string> partial = {"MAT", "MRK", "LUK", "ACT", "ROM"};
  auto records = recording_with(partial, "r1");
  auto second = recording_with(partial, "r2");
  records.insert(records.end(), second.begin(), second.end());
  auto out = split_by_book(records);
  std::map<std::string, Split> first;
  for (const auto& r : out) {
    if (r.recording == "r1") first[r.book] = r.split;
  }
  for (const auto& r : out) {
    CHECK(r.split != Split::kUnassigned);
    if (r.recording == "r2") CHECK(r.split == first[r.book]);
  }
}

TEST_CASE("fallback target") {
  CHECK(fallback_target_seconds(3600) == doctest::Approx(360));
  CHECK(fallback_target_seconds(40 * 3600) == doctest::Approx(7200));
  CHECK(fallback_target_seconds(72000) == doctest::Approx(7200));
  CHECK(fallback_target_seconds(0) == 0);
}

TEST_CASE("fallback on three equal books") {
  std::vector<ManifestRecord> records = {rec("a", "LUK", 1800), rec("b", "ACT", 1800),
                                         rec("c", "ROM", 1800)};
  auto out = fallback_split(records);
  // Target 9 min: one whole book each, canonical order.
  CHECK(out[0].split == Split::kDev);
  CHECK(out[1].split == Split::kTest);
  CHECK(out[2].split == Split::kTrain);

  // Missing JHN only: MRK still goes to dev, the first free book to test.
  auto partial = split_by_book(recording_with({"MAT", "MRK", "LUK", "ACT"}, "r1"));
  for (const auto& r : partial) {
    if (r.book == "MRK") CHECK(r.split == Split::kDev);
    else if (r.book == "MAT") CHECK(r.split == Split::kTest);
    else CHECK(r.split == Split::kTrain);
  }

  // Two books: test gets nothing rather than leaving train empty.
  auto two = fallback_split(recording_with({"MAT", "LUK"}, "r1"));
  for (const auto& r : two) CHECK(r.split == (r.book == "MAT" ? Split::kDev : Split::kTrain));
}

TEST_CASE("fallback properties on random book layouts") {
  std::mt19937_64 rng(31);
  const auto& canon = new_testament_books();
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ManifestRecord> records;
    std::map<std::string, double> book_seconds;
    double total = 0;
    for (const auto& b : canon) {
      if (uniform_index(rng, 3) == 0) continue;
      for (std::size_t v = 0; v < 1 + uniform_index(rng, 4); ++v) {
        double d = 1 + 900 * unit_uniform(rng);
        records.push_back(rec(b + std::to_string(v), b, d));
        book_seconds[b] += d;
        total += d;
      }
    }
    if (book_seconds.size() < 3) continue;
    auto out = fallback_split(records);
    const double target = fallback_target_seconds(total);

    std::map<std::string, std::set<Split>> splits_of_book;
    for (const auto& r : out) splits_of_book[r.book].insert(r.split);
    std::map<Split, std::vector<std::string>> books_in;
    for (const auto& [b, s] : splits_of_book) {
      REQUIRE(s.size() == 1);  // whole books only
      CHECK(*s.begin() != Split::kUnassigned);
      books_in[*s.begin()].push_back(b);
    }
    CHECK_FALSE(books_in[Split::kTrain].empty());
    for (auto [split, preferred] : {std::pair{Split::kDev, "MRK"}, std::pair{Split::kTest, "JHN"}}) {
      // Books in the order they were offered: the named book, then canonical.
      auto rank = [&](const std::string& b) {
        if (b == preferred) return -1L;
        return static_cast<long>(std::find(canon.begin(), canon.end(), b) - canon.begin());
      };
      auto& books = books_in[split];
      std::sort(books.begin(), books.end(),
                [&](const auto& a, const auto& b) { return rank(a) < rank(b); });
      double got = 0;
      for (const auto& b : books) got += book_seconds[b];
      // Reached the target, or ran out of books to give.
      CHECK((got >= target || books_in[Split::kTrain].size() == 1));
      // Greedy stops once the target is met, so without its last book the set
      // was still short.
      if (!books.empty()) CHECK(got - book_seconds[books.back()] < target);
    }
    CHECK(fallback_split(records)[0].split == out[0].split);
  }
}

TEST_CASE("random split") {
  std::vector<ManifestRecord> records;
  for (int i = 0; i < 100; ++i) records.push_back(rec("s" + std::to_string(i), "MAT", 10));
  RandomSplitOptions opt;
  opt.seed = 3;
  auto result = split_random(records, opt);
  CHECK(result.dropped_languages.empty());
  REQUIRE(result.records.size() == 100);
  std::map<Split, int> counts;
  std::set<std::string> ids;
  for (const auto& r : result.records) {
    ++counts[r.split];
    ids.insert(r.id);
  }
  CHECK(ids.size() == 100);
  CHECK(counts[Split::kTrain] == 80);
  CHECK(counts[Split::kDev] == 10);
  CHECK(counts[Split::kTest] == 10);

  auto again = split_random(records, opt);
  for (std::size_t i = 0; i < 100; ++i) CHECK(again.records[i].split == result.records[i].split);
  opt.seed = 4;
  auto other = split_random(records, opt);
  bool differs = false;
  for (std::size_t i = 0; i < 100; ++i) differs |= other.records[i].split != result.records[i].split;
  CHECK(differs);

  // Input order does not matter.
  auto reversed = records;
  std::reverse(reversed.begin(), reversed.end());
  opt.seed = 3;
  auto rev = split_random(reversed, opt);
  std::map<std::string, Split> by_id;
  for (const auto& r : result.records) by_id[r.id] = r.split;
  for (const auto& r : rev.records) CHECK(by_id[r.id] == r.split);
}

TEST_CASE("random split drops languages under five minutes of train") {
  std::vector<ManifestRecord> records;
  for (int i = 0; i < 24; ++i) records.push_back(rec("a" + std::to_string(i), "-", 10, "ra", "aaa"));
  for (int i = 0; i < 100; ++i) records.push_back(rec("b" + std::to_string(i), "-", 10, "rb", "bbb"));
  // 40 samples of 10 s: train gets 32 of them, 320 s.
  for (int i = 0; i < 40; ++i) records.push_back(rec("c" + std::to_string(i), "-", 10, "rc", "ccc"));
  // 35 samples: train gets 28, 280 s.
  for (int i = 0; i < 35; ++i) records.push_back(rec("d" + std::to_string(i), "-", 10, "rd", "ddd"));
  auto result = split_random(records);
  CHECK(result.dropped_languages == std::vector<std::string>{"aaa", "ddd"});
  CHECK(result.records.size() == 140);
  for (const auto& r : result.records) CHECK((r.language == "bbb" || r.language == "ccc"));

  RandomSplitOptions bad;
  bad.train = 0.9;
  CHECK_THROWS_AS(split_random(records, bad), std::invalid_argument);
}

TEST_CASE("sampling weights") {
  std::vector<double> n = {9, 1};
  auto w = sampling_weights(n, 0.5);
  CHECK(w[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.25).epsilon(1e-12));
  w = sampling_weights(n, 1.0);
  CHECK(w[0] == doctest::Approx(0.9));
  CHECK(w[1] == doctest::Approx(0.1));
  w = sampling_weights(n, 0.0);
  CHECK(w[0] == doctest::Approx(0.5));
  CHECK(w[1] == doctest::Approx(0.5));

  std::vector<double> with_zero = {4, 0, 1};
  w = sampling_weights(with_zero, 0.0);
  CHECK(w == std::vector<double>{0.5, 0.0, 0.5});

  std::vector<double> zeros = {0, 0}, negative = {1, -1};
  CHECK_THROWS_AS(sampling_weights(zeros, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(sampling_weights(negative, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(sampling_weights(n, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(sampling_weights(n, -0.1), std::invalid_argument);
}

TEST_CASE("sampling weight properties") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> n(1 + uniform_index(rng, 12));
    for (auto& x : n) x = std::exp(12 * unit_uniform(rng));
    double beta = unit_uniform(rng);
    auto w = sampling_weights(n, beta);
    double sum = 0;
    for (double p : w) sum += p;
    CHECK(std::abs(sum - 1.0) <= 1e-12);

    std::vector<double> scaled = n;
    double c = 0.001 + 1000 * unit_uniform(rng);
    for (auto& x : scaled) x *= c;
    auto ws = sampling_weights(scaled, beta);
    for (std::size_t i = 0; i < n.size(); ++i) {
      CHECK(ws[i] == doctest::Approx(w[i]).epsilon(1e-9));
      for (std::size_t j = 0; j < n.size(); ++j) {
        if (n[i] >= n[j]) CHECK(w[i] >= w[j]);
      }
    }
    // Oracle: unnormalized n^beta divided by its sum.
    double z = 0;
    for (double x : n) z += std::pow(x, beta);
    for (std::size_t i = 0; i < n.size(); ++i)
      CHECK(w[i] == doctest::Approx(std::pow(n[i], beta) / z).epsilon(1e-9));
  }
}

TEST_CASE("two-stage weights") {
  SamplingSpec spec;
  spec.entries = {{"A", "a1", 4}, {"B", "b1", 9}, {"A", "a2", 1}};
  spec.beta_language = 0.5;
  spec.beta_dataset = 1.0;
  auto w = two_stage_weights(spec);
  REQUIRE(w.size() == 3);
  // Within A: sqrt(4) : sqrt(1) = 2/3, 1/3. Datasets by totals 5 : 9.
  CHECK(w[0].language == "a1");
  CHECK(w[0].probability == doctest::Approx(10.0 / 42.0));
  CHECK(w[1].probability == doctest::Approx(9.0 / 14.0));
  CHECK(w[2].language == "a2");
  CHECK(w[2].probability == doctest::Approx(5.0 / 42.0));

  spec.beta_dataset = 0.0;
  w = two_stage_weights(spec);
  CHECK(w[0].probability + w[2].probability == doctest::Approx(0.5));
  CHECK(w[1].probability == doctest::Approx(0.5));

  SamplingSpec one;
  one.entries = {{"D", "x", 9}, {"D", "y", 1}};
  w = two_stage_weights(one);
  CHECK(w[0].probability == doctest::Approx(0.75));
  CHECK(w[1].probability == doctest::Approx(0.25));
  CHECK(one.beta_language == 0.5);
  CHECK(one.beta_dataset == 0.5);

  CHECK_THROWS_AS(two_stage_weights(SamplingSpec{}), std::invalid_argument);
}

TEST_CASE("two-stage weights sum to one") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 500; ++trial) {
    SamplingSpec spec;
    for (std::size_t i = 0; i < 1 + uniform_index(rng, 15); ++i)
      spec.entries.push_back({"d" + std::to_string(uniform_index(rng, 4)), "l" + std::to_string(i),
                              std::exp(10 * unit_uniform(rng))});
    spec.beta_language = unit_uniform(rng);
    spec.beta_dataset = unit_uniform(rng);
    double sum = 0;
    for (const auto& w : two_stage_weights(spec)) sum += w.probability;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}
