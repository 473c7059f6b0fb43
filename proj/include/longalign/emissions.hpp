// include/longalign/emissions.hpp

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

#ifndef LONGALIGN_EMISSIONS_HPP_
#define LONGALIGN_EMISSIONS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace longalign {

inline constexpr int kBlankToken = 0;
inline constexpr float kDefaultStrideMs = 20.0f;
/// Frames per 15 s acoustic-model chunk at the default stride.
inline constexpr std::size_t kChunkFrames = 750;

/// T x V grid of natural-log posteriors, row-major, blank at column 0.
///
/// Immutable after construction. Values are <= 0 or -inf; rows are not
/// required to be normalized.
class EmissionMatrix {
 public:
  EmissionMatrix() = default;
  /// Validates the invariants; throws std::invalid_argument on violation.
  EmissionMatrix(std::size_t frames, std::size_t vocab_size, float stride_ms,
                 std::vector<float> logprobs);

  std::size_t frames() const { return frames_; }
  std::size_t vocab_size() const { return vocab_size_; }
  float stride_ms() const { return stride_ms_; }

  std::span<const float> row(std::size_t t) const {
    return {logprobs_.data() + t * vocab_size_, vocab_size_};
  }
  float at(std::size_t t, std::size_t v) const { return logprobs_[t * vocab_size_ + v]; }
  std::span<const float> values() const { return logprobs_; }

  double frame_to_seconds(std::size_t frame) const {
    return static_cast<double>(frame) * stride_ms_ / 1000.0;
  }

  friend bool operator==(const EmissionMatrix&, const EmissionMatrix&) = default;

 private:
  std::size_t frames_ = 0;
  std::size_t vocab_size_ = 0;
  float stride_ms_ = kDefaultStrideMs;
  std::vector<float> logprobs_;
};

/// Index <-> token string map. Index 0 is the blank and has no string; the
/// star token is virtual and never stored here.
class TokenTable {
 public:
  TokenTable() = default;
  /// `tokens[i]` gets index i + 1. Throws std::invalid_argument on duplicates
  /// or tokens outside [a-z'].
  explicit TokenTable(std::vector<std::string> tokens);

  /// The 27-symbol alignment charset: a..z then apostrophe.
  static TokenTable alignment_charset();
  /// One token per line; line 1 is index 1.
  static TokenTable load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  /// Includes the blank.
  std::size_t size() const { return tokens_.size() + 1; }
  const std::string& token(int index) const;
  std::optional<int> index_of(std::string_view token) const;
  std::size_t longest_token() const { return longest_; }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::size_t longest_ = 0;
};

/// Reads the little-endian "CTCE" file format. Throws FormatError.
EmissionMatrix load_emissions(const std::filesystem::path& path);
void save_emissions(const EmissionMatrix& emissions, const std::filesystem::path& path);

/// Deterministic near-one-hot emissions whose per-frame argmax follows
/// `true_path`.
///
/// Frame t puts probability exp(peak_logprob) on true_path[t] and spreads the
/// remainder over the other V - 1 columns with pseudo-random weights. The
/// generator is stateless per frame: row t depends only on (seed,
/// frame_offset + t, true_path[t]), so generating 15 s chunks with matching
/// offsets and concatenating them reproduces the whole-file matrix.
EmissionMatrix synth_emissions(std::span<const int> true_path, std::size_t vocab_size,
                               float peak_logprob, std::uint64_t seed,
                               std::size_t frame_offset = 0,
                               float stride_ms = kDefaultStrideMs);

/// Row-wise concatenation of non-overlapping chunks.
EmissionMatrix concat_chunks(std::span<const EmissionMatrix> chunks);

}  // namespace longalign

#endif  // LONGALIGN_EMISSIONS_HPP_
