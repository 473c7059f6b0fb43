// include/longalign/bench.hpp

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

#ifndef LONGALIGN_BENCH_HPP_
#define LONGALIGN_BENCH_HPP_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include "json.hpp"

namespace longalign {

struct BenchConfig {
  std::vector<std::size_t> frame_counts = {10000, 20000, 40000};
  std::size_t labels = 50;      // M; the chain has 2M + 1 states
  std::size_t vocab_size = 28;  // blank + a-z + apostrophe
  std::size_t buffer_rows = 100;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  /// Timed runs per implementation; the fastest is reported.
  unsigned repeats = 5;
  bool run_full = true;
};

struct BenchRow {
  std::size_t frames = 0;
  std::size_t states = 0;
  std::size_t buffer_rows = 0;
  double streaming_ms = 0.0;
  double full_ms = 0.0;
  std::size_t streaming_peak = 0;  // tracked trellis entries
  std::size_t full_peak = 0;
  bool paths_equal = true;
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchRow> rows;
};

/// Times streaming and full-trellis Viterbi on synthetic emissions for each
/// frame count. Throws std::runtime_error if the two paths ever differ.
BenchReport run_scaling_bench(const BenchConfig& config);

nlohmann::ordered_json to_json(const BenchReport& report);
void write_csv(const BenchReport& report, std::ostream& out);

}  // namespace longalign

#endif  // LONGALIGN_BENCH_HPP_
