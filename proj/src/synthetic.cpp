// src/synthetic.cpp

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

#include "longalign/synthetic.hpp"

#include <algorithm>
#include <filesystem>
#include <random>

#include "json.hpp"
#include "longalign/jsonl.hpp"
#include "longalign/random.hpp"

namespace longalign {

namespace {

constexpr std::size_t kVocab = 28;  // blank, a-z, apostrophe

int token_of(char c) { return c == '\'' ? 27 : c - 'a' + 1; }

std::size_t between(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + uniform_index(rng, hi - lo + 1);
}

bool chance(std::mt19937_64& rng, double p) { return unit_uniform(rng) < p; }

std::string random_word(std::mt19937_64& rng) {
  static constexpr std::string_view kLetters = "abcdefghijklmnopqrstuvwxyz";
  std::string w;
  std::size_t len = between(rng, 2, 7);
  for (std::size_t i = 0; i < len; ++i) w.push_back(kLetters[uniform_index(rng, kLetters.size())]);
  if (len > 3 && chance(rng, 0.05)) w += "'s";
  return w;
}

std::vector<std::string> random_words(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  std::vector<std::string> words(between(rng, lo, hi));
  for (auto& w : words) w = random_word(rng);
  return words;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

// Capitalization, an accent or two, commas and a full stop. All of it goes
// away again under normalize + romanize.
std::string decorate(const std::vector<std::string>& words, std::mt19937_64& rng) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::string w = words[i];
    if (!out.empty()) out.push_back(' ');
    if (i == 0 && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
    std::string styled;
    for (char c : w) {
      if (c == 'e' && chance(rng, 0.15)) {
        styled += "é";
      } else {
        styled.push_back(c);
      }
    }
    out += styled;
    if (i + 1 < words.size() && chance(rng, 0.15)) out.push_back(',');
  }
  out.push_back('.');
  return out;
}

class PathBuilder {
 public:
  explicit PathBuilder(std::mt19937_64& rng) : rng_(rng) {}

  void blanks(std::size_t lo, std::size_t hi) { path_.insert(path_.end(), between(rng_, lo, hi), 0); }

  // Speaks one word; returns the first token frame.
  std::size_t word(const std::string& w) {
    std::size_t onset = path_.size();
    for (std::size_t i = 0; i < w.size(); ++i) {
      int tok = token_of(w[i]);
      if (i > 0 && (w[i] == w[i - 1] || chance(rng_, 0.3))) path_.push_back(0);
      if (i == 0) onset = path_.size();
      path_.insert(path_.end(), between(rng_, 1, 2), tok);
    }
    return onset;
  }

  std::size_t size() const { return path_.size(); }
  std::vector<int> take() { return std::move(path_); }

 private:
  std::mt19937_64& rng_;
  std::vector<int> path_;
};

}  // namespace

SyntheticChapter make_synthetic_chapter(const std::string& id, std::uint64_t seed,
                                        const SyntheticChapterOptions& options) {
  std::mt19937_64 rng(mix_seed(seed, hash_name(id)));
  SyntheticChapter ch;
  ch.id = id;

  PathBuilder audio(rng);
  audio.blanks(2, 4);
  if (options.preamble_words > 0) {
    for (std::size_t i = 0; i < options.preamble_words; ++i) {
      if (i > 0) audio.blanks(1, 3);
      audio.word(random_word(rng));
    }
    ch.preamble_frames = audio.size();
    audio.blanks(4, 8);
  }

  for (std::size_t v = 0; v < options.verses; ++v) {
    SyntheticVerse verse;
    std::vector<std::string> spoken = random_words(rng, options.min_words, options.max_words);
    std::vector<std::string> written = spoken;
    if (chance(rng, options.digit_probability)) {
      std::size_t at = uniform_index(rng, spoken.size() + 1);
      std::string digits = std::to_string(between(rng, 1, 999));
      spoken.insert(spoken.begin() + static_cast<std::ptrdiff_t>(at), random_word(rng));
      written.insert(written.begin() + static_cast<std::ptrdiff_t>(at), digits);
    }
    verse.corrupted = std::find(options.corrupt_verses.begin(), options.corrupt_verses.end(), v) !=
                      options.corrupt_verses.end();
    if (verse.corrupted) written = random_words(rng, options.min_words, options.max_words);

    verse.spoken = join(spoken);
    verse.transcript = options.decorate ? decorate(written, rng) : join(written);
    verse.begin_frame = audio.size();
    for (std::size_t w = 0; w < spoken.size(); ++w) {
      if (w > 0) audio.blanks(1, 3);
      std::size_t onset = audio.word(spoken[w]);
      if (w == 0) verse.onset_frame = onset;
    }
    verse.end_frame = audio.size();
    ch.verses.push_back(std::move(verse));
    audio.blanks(4, 8);
  }

  ch.true_path = audio.take();
  ch.emissions = synth_emissions(ch.true_path, kVocab, options.peak_logprob,
                                 mix_seed(seed, hash_name(id + "/emissions")));
  return ch;
}

SyntheticCorpus make_synthetic_corpus(const SyntheticCorpusOptions& options) {
  SyntheticCorpus corpus;
  for (std::size_t l = 0; l < options.languages.size(); ++l) {
    const auto& lang = options.languages[l];
    bool partial = std::find(options.partial_languages.begin(), options.partial_languages.end(),
                             l) != options.partial_languages.end();
    std::mt19937_64 rng(mix_seed(options.seed, hash_name(lang)));
    for (const auto& book : options.books) {
      if (partial && book == "JHN") continue;
      for (std::size_t c = 1; c <= options.chapters_per_book; ++c) {
        SyntheticChapterOptions chapter_options = options.chapter;
        chapter_options.corrupt_verses.clear();
        for (std::size_t v = 0; v < chapter_options.verses; ++v) {
          if (chance(rng, options.corrupt_probability)) chapter_options.corrupt_verses.push_back(v);
        }
        std::string id = lang + "_" + book + "_" + std::to_string(c);
        auto ch = make_synthetic_chapter(id, options.seed, chapter_options);
        ch.language = lang;
        ch.recording = lang + "_rec1";
        ch.book = book;
        ch.chapter = static_cast<int>(c);
        corpus.chapters.push_back(std::move(ch));
      }
    }
  }
  return corpus;
}

void write_synthetic_corpus(const SyntheticCorpus& corpus, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "emissions");
  TokenTable::alignment_charset().save(fs::path(dir) / "tokens.txt");

  std::vector<nlohmann::ordered_json> chapters, truth;
  for (const auto& ch : corpus.chapters) {
    std::string rel = "emissions/" + ch.id + ".ctce";
    save_emissions(ch.emissions, fs::path(dir) / rel);

    nlohmann::ordered_json c;
    c["id"] = ch.id;
    c["language"] = ch.language;
    c["recording"] = ch.recording;
    c["book"] = ch.book;
    c["chapter"] = ch.chapter;
    c["emissions"] = rel;
    auto verses = nlohmann::ordered_json::array();
    for (const auto& v : ch.verses) verses.push_back(v.transcript);
    c["verses"] = verses;
    chapters.push_back(c);

    nlohmann::ordered_json t;
    t["id"] = ch.id;
    t["frames"] = ch.true_path.size();
    t["preamble_frames"] = ch.preamble_frames;
    auto tv = nlohmann::ordered_json::array();
    for (const auto& v : ch.verses) {
      tv.push_back({{"onset_frame", v.onset_frame},
                    {"begin_frame", v.begin_frame},
                    {"end_frame", v.end_frame},
                    {"corrupted", v.corrupted},
                    {"spoken", v.spoken}});
    }
    t["verses"] = tv;
    truth.push_back(t);
  }
  write_jsonl((fs::path(dir) / "chapters.jsonl").string(), chapters);
  write_jsonl((fs::path(dir) / "truth.jsonl").string(), truth);
}

}  // namespace longalign
