// include/longalign/textnorm.hpp

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

// Transcript clean-up ahead of alignment:
//
//   strip_brackets (opt-in)  ->  normalize  ->  starify  ->  romanize
//
// normalize:  NFKC, lowercase, drop HTML tags/entities, replace punctuation
//             (Unicode general category P*, apostrophe excepted) and
//             whitespace with single spaces.
// starify:    prepend one star per chapter, replace each decimal-digit run
//             with one star, and remember the run for destarify.
// romanize:   map to [a-z'] plus space and the star symbol.

#ifndef LONGALIGN_TEXTNORM_HPP_
#define LONGALIGN_TEXTNORM_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace longalign {

inline constexpr double kDefaultBracketThreshold = 0.03;

struct NormalizedText {
  std::string text;               // space-separated words
  std::vector<int> word_verse;    // verse index per word; -1 for the chapter preamble
  std::map<std::size_t, std::string> digits;  // star ordinal -> original digit run
};

/// Throws std::invalid_argument on malformed UTF-8.
NormalizedText normalize(std::string_view text);

/// Normalizes each verse and joins them, recording which verse each word came
/// from. Verses that normalize to nothing contribute no words.
NormalizedText normalize_verses(std::span<const std::string> verses);

std::vector<std::string> split_words(std::string_view text);

/// Fraction of verses containing any of ( ) [ ] { }. 0 for no verses.
double bracket_rate(std::span<const std::string> verses);

inline bool brackets_flagged(double rate, double threshold = kDefaultBracketThreshold) {
  return rate >= threshold;
}

/// Removes outermost bracket pairs with their contents; unmatched brackets are
/// removed alone. Collapses the whitespace left behind.
std::string strip_brackets(std::string_view text);

NormalizedText starify(const NormalizedText& text);
NormalizedText starify(std::string_view normalized);

/// Replaces the stars in `text`, numbered from `first_star`, with their digit
/// runs. Stars without a run (the chapter preamble) are removed.
std::string destarify(std::string_view text, const std::map<std::size_t, std::string>& digits,
                      std::size_t first_star = 0);

/// destarify over consecutive span texts; star numbering continues across spans.
std::vector<std::string> destarify(std::span<const std::string> span_texts,
                                   const std::map<std::size_t, std::string>& digits);

std::size_t count_stars(std::string_view text);

/// Source-grapheme -> replacement table, applied longest match first.
class RomanizationTable {
 public:
  /// UTF-8 TSV: source TAB replacement. Throws FormatError.
  static RomanizationTable load(const std::filesystem::path& path);
  static RomanizationTable from_entries(std::map<std::string, std::string> entries);

  /// Longest source matching `text` at byte offset `pos`; 0 if none.
  std::size_t match(std::string_view text, std::size_t pos, const std::string** replacement) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::string> entries_;
  std::size_t longest_ = 0;
};

struct RomanizeResult {
  std::string text;
  std::size_t dropped = 0;  // characters with no mapping
};

/// Builtin scheme when `table` is null: NFD, strip combining marks, curated
/// fallback for Latin letters without a decomposition. With a table, table
/// matches take precedence and their output passes through the builtin.
RomanizeResult romanize(std::string_view text, const RomanizationTable* table = nullptr);

/// "builtin" or "table:<path>".
class Romanizer {
 public:
  static Romanizer from_scheme(std::string_view scheme);
  RomanizeResult operator()(std::string_view text) const {
    return romanize(text, table_ ? table_.get() : nullptr);
  }
  const std::string& scheme() const { return scheme_; }

 private:
  std::string scheme_ = "builtin";
  std::shared_ptr<const RomanizationTable> table_;
};

}  // namespace longalign

#endif  // LONGALIGN_TEXTNORM_HPP_
