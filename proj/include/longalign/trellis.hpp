// include/longalign/trellis.hpp

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

// CTC forced alignment over a blank-interleaved state chain.
//
// Two Viterbi implementations share one recursion and one tie-break:
//
//   viterbi_streaming  keeps two score rows and a B-row backtrack buffer that
//                      is flushed to bulk storage every B frames, so the live
//                      working set is O(S) regardless of T.
//   viterbi_full       keeps the whole T x S score trellis and recomputes
//                      predecessors while backtracking. Used as the oracle.
//
// Tie-break: at the last frame the higher of the two terminal states wins on
// equal scores; while backtracking, among equal-scoring predecessors the one
// with the smallest state index wins.

#ifndef LONGALIGN_TRELLIS_HPP_
#define LONGALIGN_TRELLIS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "longalign/emissions.hpp"

namespace longalign {

/// Token id of the virtual star label. Reads log-prob 0 at every frame.
inline constexpr int kStarToken = -1;
/// Text form of the star label ("⟨∗⟩").
inline constexpr std::string_view kStarSymbol = "⟨∗⟩";

struct Label {
  int token = kBlankToken;
  int word = 0;   // index of the transcript word this label belongs to
  int verse = 0;  // -1 for the chapter preamble star

  bool is_star() const { return token == kStarToken; }
  friend bool operator==(const Label&, const Label&) = default;
};

using LabelSequence = std::vector<Label>;

/// Splits `text` on spaces and maps each word to tokens, longest match first.
/// kStarSymbol is recognized as a standalone star label. Words are numbered
/// from `first_word`. Throws std::invalid_argument on characters that no token
/// covers.
LabelSequence labels_from_text(std::string_view text, const TokenTable& table, int verse = 0,
                               int first_word = 0);

/// <b>, l1, <b>, l2, ..., lM, <b>. Label i sits at state 2i + 1.
class StateChain {
 public:
  StateChain() = default;
  /// Throws std::invalid_argument on an empty sequence or token ids that are
  /// neither the star nor in [1, vocab_size).
  StateChain(LabelSequence labels, std::size_t vocab_size);

  std::size_t size() const { return tokens_.size(); }
  std::size_t label_count() const { return labels_.size(); }
  std::size_t vocab_size() const { return vocab_size_; }
  const LabelSequence& labels() const { return labels_; }

  int token(std::size_t state) const { return tokens_[state]; }
  bool is_blank(std::size_t state) const { return state % 2 == 0; }
  bool is_star(std::size_t state) const { return tokens_[state] == kStarToken; }
  /// Whether state - 2 may jump straight to `state` (skipping a blank).
  bool can_skip_into(std::size_t state) const { return skip_[state] != 0; }
  const Label& label_at(std::size_t state) const { return labels_[state / 2]; }

  /// Fewest frames any path needs: one per label plus one blank between each
  /// pair of equal adjacent labels.
  std::size_t min_frames() const { return min_frames_; }

  /// Log-prob of `state` under one emission row; star reads 0.
  double logprob(std::span<const float> row, std::size_t state) const {
    int tok = tokens_[state];
    return tok == kStarToken ? 0.0 : static_cast<double>(row[static_cast<std::size_t>(tok)]);
  }

 private:
  LabelSequence labels_;
  std::vector<int> tokens_;
  std::vector<std::uint8_t> skip_;
  std::size_t vocab_size_ = 0;
  std::size_t min_frames_ = 0;
};

/// Same as the StateChain constructor, with the table's vocabulary size.
StateChain build_state_chain(LabelSequence labels, const TokenTable& table);

struct FramePath {
  std::vector<std::int32_t> states;  // one per frame
  double log_prob = 0.0;
};

/// Logical trellis-cell accounting. Each score or backtrack cell held in
/// alignment working memory counts as one entry.
class TrellisCounter {
 public:
  void acquire(std::size_t entries) {
    live_ += entries;
    if (live_ > peak_) peak_ = live_;
  }
  void release(std::size_t entries) { live_ -= entries; }
  std::size_t live() const { return live_; }
  std::size_t peak() const { return peak_; }

 private:
  std::size_t live_ = 0;
  std::size_t peak_ = 0;
};

struct StreamingOptions {
  std::size_t buffer_rows = 100;
  /// Worker threads for the per-frame state update; 1 runs inline.
  unsigned threads = 1;
};

FramePath viterbi_streaming(const EmissionMatrix& emissions, const StateChain& chain,
                            const StreamingOptions& options = {},
                            TrellisCounter* counter = nullptr);

FramePath viterbi_full(const EmissionMatrix& emissions, const StateChain& chain,
                       TrellisCounter* counter = nullptr);

/// Throws std::invalid_argument naming the first violated path invariant.
void check_path(const FramePath& path, const StateChain& chain);

/// Sum of emission log-probs along the path (star frames contribute 0).
double path_log_prob(const EmissionMatrix& emissions, const FramePath& path,
                     const StateChain& chain);

/// Drops blank states and merges runs of the same state.
LabelSequence collapse(const FramePath& path, const StateChain& chain);

enum class SpanLevel { kToken, kWord, kVerse };

SpanLevel parse_span_level(std::string_view name);
std::string_view span_level_name(SpanLevel level);

struct TokenSpan {
  std::size_t label = 0;  // position in the label sequence
  int token = kBlankToken;
  std::size_t first_frame = 0;
  std::size_t last_frame = 0;  // inclusive
  double score = 0.0;          // mean frame log-prob; 0 for star
  bool star = false;
};

struct SegmentSpan {
  int group = 0;               // label position, word index, or verse index
  int verse = 0;
  std::size_t first_label = 0;
  std::size_t last_label = 0;  // inclusive
  std::size_t begin = 0;       // frame range [begin, end)
  std::size_t end = 0;
  double score = 0.0;  // mean log-prob over emitting non-star frames
  bool star = false;   // every label in the group is the star
};

struct SpanSet {
  std::vector<TokenSpan> tokens;
  std::vector<SegmentSpan> segments;
};

/// Token spans cover exactly each label occurrence's frames. Segment
/// boundaries sit at the midpoint of the blank gap between consecutive
/// groups (odd frame goes right), so segments tile [0, T).
SpanSet extract_spans(const FramePath& path, const StateChain& chain,
                      const EmissionMatrix& emissions, SpanLevel level);

}  // namespace longalign

#endif  // LONGALIGN_TRELLIS_HPP_
