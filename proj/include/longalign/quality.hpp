// include/longalign/quality.hpp

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

#ifndef LONGALIGN_QUALITY_HPP_
#define LONGALIGN_QUALITY_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "longalign/emissions.hpp"
#include "longalign/trellis.hpp"

namespace longalign {

inline constexpr double kDefaultScoreThreshold = -0.2;
inline constexpr double kDefaultCerThreshold = 0.10;
inline constexpr double kDefaultRecordingThreshold = 0.05;

/// Length-normalized gap between the forced path and greedy decoding:
///
///   score = (log P(aligned) - log P(greedy)) / T
///
/// where both sums and T run over non-star frames only. 0 means the forced
/// path takes the per-frame argmax everywhere.
struct AlignmentScore {
  double aligned_log_prob = 0.0;
  double greedy_log_prob = 0.0;
  std::size_t frames = 0;
  double value = 0.0;
};

/// Scores frames [begin, end) of the path. Throws DegenerateAlignmentError
/// when every frame in range sits on a star state.
AlignmentScore alignment_score(const EmissionMatrix& emissions, const FramePath& path,
                               const StateChain& chain, std::size_t begin, std::size_t end);
AlignmentScore alignment_score(const EmissionMatrix& emissions, const FramePath& path,
                               const StateChain& chain);

/// Drop iff the score falls below the threshold.
inline bool passes_score_threshold(double score, double threshold = kDefaultScoreThreshold) {
  return score >= threshold;
}

struct GreedyDecode {
  std::vector<int> tokens;  // collapsed, blanks removed
  double log_prob = 0.0;    // sum of per-frame maxima
};

/// Per-frame argmax (lowest index on ties), then CTC collapse.
GreedyDecode greedy_decode(const EmissionMatrix& emissions, std::size_t begin, std::size_t end);
GreedyDecode greedy_decode(const EmissionMatrix& emissions);

/// UTF-8 -> Unicode scalar values. Throws std::invalid_argument on malformed input.
std::u32string to_code_points(std::string_view utf8);

/// Unit-cost Levenshtein distance.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

/// Character error rate: edit_distance / |reference| over code points. With
/// `normalize_text`, both sides go through textnorm::normalize first. Throws
/// std::invalid_argument when the (normalized) reference is empty.
double cer(std::string_view reference, std::string_view hypothesis, bool normalize_text = true);

struct FilterInput {
  std::string id;
  double cer = 0.0;
  std::optional<double> score;
};

struct FilterEntry {
  std::string id;
  double cer = 0.0;
  std::optional<double> score;
  bool kept = true;
  std::string reason;  // empty when kept
};

struct FilterReport {
  std::vector<FilterEntry> entries;

  std::size_t kept() const;
  std::size_t dropped() const { return entries.size() - kept(); }
};

/// Drops a sample iff its CER is strictly above the threshold. When
/// `score_threshold` is set, samples carrying a score below it are dropped
/// too (reason "low_alignment_score").
FilterReport filter_samples(std::span<const FilterInput> samples,
                            double cer_threshold = kDefaultCerThreshold,
                            std::optional<double> score_threshold = std::nullopt);

/// Drops a recording iff its development-set CER is strictly above the threshold.
FilterReport filter_recordings(std::span<const FilterInput> recordings,
                               double recording_threshold = kDefaultRecordingThreshold);

}  // namespace longalign

#endif  // LONGALIGN_QUALITY_HPP_
