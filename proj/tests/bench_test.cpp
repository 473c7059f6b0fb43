// tests/bench_test.cpp

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
#include <sstream>
#include <string>

#include "longalign/bench.hpp"

using namespace longalign;

TEST_CASE("peak entries follow the accounting model") {
  BenchConfig cfg;
  cfg.frame_counts = {1000, 2000, 4000};
  cfg.labels = 50;
  cfg.buffer_rows = 100;
  cfg.repeats = 1;
  auto report = run_scaling_bench(cfg);
  REQUIRE(report.rows.size() == 3);
  for (const auto& row : report.rows) {
    CHECK(row.states == 101);
    CHECK(row.paths_equal);
    // 2S + B*S with S = 101, B = 100.
    CHECK(row.streaming_peak == 102 * 101);
    CHECK(row.full_peak == row.frames * 101);
  }
  CHECK(report.rows[1].full_peak == 2 * report.rows[0].full_peak);
  CHECK(report.rows[2].streaming_peak == report.rows[0].streaming_peak);
}

TEST_CASE("threads and small buffers give the same rows") {
  BenchConfig cfg;
  cfg.frame_counts = {777};
  cfg.labels = 20;
  cfg.buffer_rows = 3;
  cfg.threads = 3;
  cfg.repeats = 1;
  auto row = run_scaling_bench(cfg).rows.at(0);
  CHECK(row.paths_equal);
  CHECK(row.streaming_peak == (2 + 3) * 41);
}

TEST_CASE("report formats") {
  BenchConfig cfg;
  cfg.frame_counts = {200};
  cfg.labels = 5;
  cfg.repeats = 1;
  auto report = run_scaling_bench(cfg);
  auto j = to_json(report);
  CHECK(j["labels"] == 5);
  CHECK(j["rows"][0]["frames"] == 200);
  CHECK(j["rows"][0]["paths_equal"] == true);
  CHECK(j["rows"][0]["memory_ratio"].get<double>() == doctest::Approx(200.0 / 102.0));
  std::ostringstream csv;
  write_csv(report, csv);
  const std::string text = csv.str();
  CHECK(text.rfind("frames,states,buffer_rows,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);

  cfg.run_full = false;
  auto streaming_only = to_json(run_scaling_bench(cfg));
  CHECK_FALSE(streaming_only["rows"][0].contains("full_peak_entries"));
}

TEST_CASE("bench rejects bad configurations") {
  BenchConfig cfg;
  cfg.repeats = 1;
  cfg.labels = 50;
  cfg.frame_counts = {50};  // fewer frames than 101 states need
  CHECK_THROWS_AS(run_scaling_bench(cfg), std::invalid_argument);
  cfg.frame_counts = {100};
  cfg.labels = 0;
  CHECK_THROWS_AS(run_scaling_bench(cfg), std::invalid_argument);
  cfg.labels = 5;
  cfg.buffer_rows = 0;
  CHECK_THROWS_AS(run_scaling_bench(cfg), std::invalid_argument);
  cfg.buffer_rows = 10;
  cfg.vocab_size = 1;
  CHECK_THROWS_AS(run_scaling_bench(cfg), std::invalid_argument);
}
