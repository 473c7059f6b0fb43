// src/bench.cpp

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

#include "longalign/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "longalign/emissions.hpp"
#include "longalign/random.hpp"
#include "longalign/trellis.hpp"

namespace longalign {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

}  // namespace

BenchReport run_scaling_bench(const BenchConfig& config) {
  if (config.labels == 0) throw std::invalid_argument("bench needs at least one label");
  if (config.vocab_size < 2) throw std::invalid_argument("bench vocab size must be >= 2");
  if (config.buffer_rows == 0) throw std::invalid_argument("buffer_rows must be >= 1");

  std::mt19937_64 rng(mix_seed(config.seed, hash_name("bench-labels")));
  LabelSequence labels;
  for (std::size_t i = 0; i < config.labels; ++i) {
    int tok = 1 + static_cast<int>(uniform_index(rng, config.vocab_size - 1));
    labels.push_back({tok, static_cast<int>(i), 0});
  }
  StateChain chain(labels, config.vocab_size);
  const float peak = std::log(0.7f);

  BenchReport report;
  report.config = config;
  for (std::size_t frames : config.frame_counts) {
    if (frames < (chain.size() + 1) / 2)
      throw std::invalid_argument("bench frame count " + std::to_string(frames) +
                                  " is too short for " + std::to_string(chain.size()) + " states");

    // Each label owns an equal block: two token frames, the rest blank.
    std::vector<int> truth(frames, kBlankToken);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      std::size_t begin = i * frames / labels.size();
      std::size_t end = (i + 1) * frames / labels.size();
      for (std::size_t t = begin; t < std::min(end, begin + 2); ++t) truth[t] = labels[i].token;
    }
    EmissionMatrix emissions =
        synth_emissions(truth, config.vocab_size, peak, mix_seed(config.seed, frames));

    BenchRow row;
    row.frames = frames;
    row.states = chain.size();
    row.buffer_rows = config.buffer_rows;

    StreamingOptions options{config.buffer_rows, config.threads};
    FramePath streaming;
    row.streaming_ms = std::numeric_limits<double>::infinity();
    for (unsigned r = 0; r < std::max(1u, config.repeats); ++r) {
      TrellisCounter counter;
      auto start = Clock::now();
      streaming = viterbi_streaming(emissions, chain, options, &counter);
      row.streaming_ms = std::min(row.streaming_ms, elapsed_ms(start));
      row.streaming_peak = counter.peak();
    }

    if (config.run_full) {
      FramePath full;
      row.full_ms = std::numeric_limits<double>::infinity();
      for (unsigned r = 0; r < std::max(1u, config.repeats); ++r) {
        TrellisCounter counter;
        auto start = Clock::now();
        full = viterbi_full(emissions, chain, &counter);
        row.full_ms = std::min(row.full_ms, elapsed_ms(start));
        row.full_peak = counter.peak();
      }
      row.paths_equal = full.states == streaming.states;
      if (!row.paths_equal)
        throw std::runtime_error("streaming and full Viterbi disagree at T=" +
                                 std::to_string(frames));
    }
    report.rows.push_back(row);
  }
  return report;
}

nlohmann::ordered_json to_json(const BenchReport& report) {
  nlohmann::ordered_json j;
  j["labels"] = report.config.labels;
  j["vocab_size"] = report.config.vocab_size;
  j["buffer_rows"] = report.config.buffer_rows;
  j["threads"] = report.config.threads;
  j["repeats"] = report.config.repeats;
  j["seed"] = report.config.seed;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json o;
    o["frames"] = r.frames;
    o["states"] = r.states;
    o["streaming_ms"] = r.streaming_ms;
    o["streaming_peak_entries"] = r.streaming_peak;
    if (report.config.run_full) {
      o["full_ms"] = r.full_ms;
      o["full_peak_entries"] = r.full_peak;
      o["memory_ratio"] = static_cast<double>(r.full_peak) / static_cast<double>(r.streaming_peak);
      o["paths_equal"] = r.paths_equal;
    }
    rows.push_back(o);
  }
  j["rows"] = rows;
  return j;
}

void write_csv(const BenchReport& report, std::ostream& out) {
  out << "frames,states,buffer_rows,streaming_ms,full_ms,streaming_peak,full_peak,paths_equal\n";
  for (const auto& r : report.rows) {
    out << r.frames << ',' << r.states << ',' << r.buffer_rows << ',' << r.streaming_ms << ','
        << r.full_ms << ',' << r.streaming_peak << ',' << r.full_peak << ','
        << (r.paths_equal ? 1 : 0) << '\n';
  }
}

}  // namespace longalign
