// include/longalign/synthetic.hpp

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

// Synthetic chapter recordings with known ground truth: an unscripted spoken
// preamble, verses whose spoken words are known frame by frame, numbers
// written as digits but spoken as words, and optionally verses whose
// transcript was swapped for unrelated text.

#ifndef LONGALIGN_SYNTHETIC_HPP_
#define LONGALIGN_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "longalign/emissions.hpp"

namespace longalign {

struct SyntheticVerse {
  std::string transcript;  // what the text says (raw: case, punctuation, digits)
  std::string spoken;      // what the audio says, in the alignment charset
  bool corrupted = false;  // transcript replaced by unrelated text
  std::size_t onset_frame = 0;  // first frame of the first spoken token
  std::size_t begin_frame = 0;  // first frame of the verse's audio
  std::size_t end_frame = 0;    // one past the last token frame
};

struct SyntheticChapter {
  std::string id;
  std::string language;
  std::string recording;
  std::string book;
  int chapter = 0;
  std::size_t preamble_frames = 0;  // frames before verse 1 starts speaking
  std::vector<SyntheticVerse> verses;
  std::vector<int> true_path;       // per-frame token id
  EmissionMatrix emissions;
};

struct SyntheticChapterOptions {
  std::size_t verses = 6;
  std::size_t min_words = 4;
  std::size_t max_words = 9;
  std::size_t preamble_words = 3;  // 0 disables the preamble
  double digit_probability = 0.15; // chance a verse carries a number
  std::vector<std::size_t> corrupt_verses;  // indices whose transcript is swapped
  bool decorate = true;            // capitalization, punctuation, diacritics
  float peak_logprob = -0.05f;
};

SyntheticChapter make_synthetic_chapter(const std::string& id, std::uint64_t seed,
                                        const SyntheticChapterOptions& options = {});

struct SyntheticCorpusOptions {
  std::vector<std::string> languages = {"xaa", "xbb", "xcc"};
  std::vector<std::string> books = {"MAT", "MRK", "LUK", "JHN"};
  std::size_t chapters_per_book = 2;
  /// Languages (by index) whose recording lacks JHN, to exercise the fallback split.
  std::vector<std::size_t> partial_languages = {2};
  double corrupt_probability = 0.12;
  SyntheticChapterOptions chapter;
  std::uint64_t seed = 7;
};

struct SyntheticCorpus {
  std::vector<SyntheticChapter> chapters;
};

SyntheticCorpus make_synthetic_corpus(const SyntheticCorpusOptions& options = {});

/// Writes emissions/<id>.ctce, tokens.txt, chapters.jsonl (pipeline input) and
/// truth.jsonl (ground truth per chapter) under `dir`.
void write_synthetic_corpus(const SyntheticCorpus& corpus, const std::string& dir);

}  // namespace longalign

#endif  // LONGALIGN_SYNTHETIC_HPP_
