// src/quality.cpp

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

#include "longalign/quality.hpp"

#include <unicode/utf8.h>

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "longalign/error.hpp"
#include "longalign/textnorm.hpp"

namespace longalign {

AlignmentScore alignment_score(const EmissionMatrix& emissions, const FramePath& path,
                               const StateChain& chain, std::size_t begin, std::size_t end) {
  if (path.states.size() != emissions.frames())
    throw std::invalid_argument("path length does not match emission frames");
  if (begin >= end || end > emissions.frames())
    throw std::invalid_argument("invalid frame range for scoring");

  AlignmentScore score;
  for (std::size_t t = begin; t < end; ++t) {
    auto s = static_cast<std::size_t>(path.states[t]);
    if (chain.is_star(s)) continue;
    auto row = emissions.row(t);
    score.aligned_log_prob += chain.logprob(row, s);
    score.greedy_log_prob += *std::max_element(row.begin(), row.end());
    ++score.frames;
  }
  if (score.frames == 0)
    throw DegenerateAlignmentError("degenerate alignment: every frame maps to the star token");
  score.value = (score.aligned_log_prob - score.greedy_log_prob) / static_cast<double>(score.frames);
  return score;
}

AlignmentScore alignment_score(const EmissionMatrix& emissions, const FramePath& path,
                               const StateChain& chain) {
  return alignment_score(emissions, path, chain, 0, emissions.frames());
}

GreedyDecode greedy_decode(const EmissionMatrix& emissions, std::size_t begin, std::size_t end) {
  if (begin > end || end > emissions.frames())
    throw std::invalid_argument("invalid frame range for greedy decoding");
  GreedyDecode out;
  int prev = kBlankToken;
  for (std::size_t t = begin; t < end; ++t) {
    auto row = emissions.row(t);
    auto best = std::max_element(row.begin(), row.end());
    int tok = static_cast<int>(best - row.begin());
    out.log_prob += *best;
    if (tok != kBlankToken && tok != prev) out.tokens.push_back(tok);
    prev = tok;
  }
  return out;
}

GreedyDecode greedy_decode(const EmissionMatrix& emissions) {
  return greedy_decode(emissions, 0, emissions.frames());
}

std::u32string to_code_points(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) throw std::invalid_argument("invalid UTF-8 at byte " + std::to_string(i));
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  // Single row over the shorter string.
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({sub, up + 1, row[j - 1] + 1});
      diag = up;
    }
  }
  return row[b.size()];
}

double cer(std::string_view reference, std::string_view hypothesis, bool normalize_text) {
  std::u32string ref, hyp;
  if (normalize_text) {
    ref = to_code_points(normalize(reference).text);
    hyp = to_code_points(normalize(hypothesis).text);
  } else {
    ref = to_code_points(reference);
    hyp = to_code_points(hypothesis);
  }
  if (ref.empty()) throw std::invalid_argument("CER undefined for an empty reference");
  return static_cast<double>(edit_distance(ref, hyp)) / static_cast<double>(ref.size());
}

std::size_t FilterReport::kept() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const FilterEntry& e) { return e.kept; }));
}

namespace {

void check_threshold(double threshold, const char* name) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

FilterReport filter_samples(std::span<const FilterInput> samples, double cer_threshold,
                            std::optional<double> score_threshold) {
  check_threshold(cer_threshold, "cer threshold");
  FilterReport report;
  report.entries.reserve(samples.size());
  for (const auto& s : samples) {
    FilterEntry e{s.id, s.cer, s.score, true, {}};
    if (score_threshold && s.score && !passes_score_threshold(*s.score, *score_threshold)) {
      e.kept = false;
      e.reason = "low_alignment_score";
    } else if (s.cer > cer_threshold) {
      e.kept = false;
      e.reason = "cer_above_threshold";
    }
    report.entries.push_back(std::move(e));
  }
  return report;
}

FilterReport filter_recordings(std::span<const FilterInput> recordings,
                               double recording_threshold) {
  check_threshold(recording_threshold, "recording threshold");
  FilterReport report;
  report.entries.reserve(recordings.size());
  for (const auto& r : recordings) {
    FilterEntry e{r.id, r.cer, r.score, true, {}};
    if (r.cer > recording_threshold) {
      e.kept = false;
      e.reason = "recording_cer_above_threshold";
    }
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace longalign
