// include/longalign/corpus.hpp

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

// Manifest records, train/dev/test assignment and multilingual sampling
// weights.

#ifndef LONGALIGN_CORPUS_HPP_
#define LONGALIGN_CORPUS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace longalign {

enum class Split { kUnassigned, kTrain, kDev, kTest };

std::string_view split_name(Split split);
Split parse_split(std::string_view name);

struct ManifestRecord {
  std::string id;
  std::string language;
  std::string recording;
  std::string book;  // book code, or a generic document id
  int chapter = 0;
  int verse = -1;
  double duration_s = 0.0;
  std::string emissions;  // emission file reference
  std::optional<std::size_t> start_frame;
  std::optional<std::size_t> end_frame;
  std::string raw_text;
  std::string text;
  Split split = Split::kUnassigned;
  std::optional<double> score;
  std::optional<double> cer;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();  // unrecognized keys, passed through
};

nlohmann::ordered_json to_json(const ManifestRecord& record);
/// Throws FormatError on missing id or non-positive duration.
ManifestRecord record_from_json(const nlohmann::json& j);

std::vector<ManifestRecord> read_manifest(const std::string& path);
void write_manifest(const std::string& path, std::span<const ManifestRecord> records);

/// Conventional New Testament order (USFM codes).
const std::vector<std::string>& new_testament_books();

struct BookSplitOptions {
  std::string dev_book = "MRK";
  std::string test_book = "JHN";
  std::vector<std::string> book_order = new_testament_books();
};

/// Per recording: dev_book -> dev, test_book -> test, everything else ->
/// train. Recordings lacking either book go through fallback_split.
std::vector<ManifestRecord> split_by_book(std::vector<ManifestRecord> records,
                                          const BookSplitOptions& options = {});

/// min(10% of total, 2 h).
double fallback_target_seconds(double total_seconds);

/// Per recording, assigns whole books to dev and then test until each holds
/// at least fallback_target_seconds of audio (overshoot allowed). The named
/// dev/test book is tried first, then books in canonical order; one book is
/// always left for train.
std::vector<ManifestRecord> fallback_split(std::vector<ManifestRecord> records,
                                           const BookSplitOptions& options = {});

struct RandomSplitOptions {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
  double min_train_seconds = 300.0;
  std::uint64_t seed = 0;
};

struct RandomSplitResult {
  std::vector<ManifestRecord> records;  // surviving languages only
  std::vector<std::string> dropped_languages;
};

/// Per language: shuffle, cut by the fractions, then drop languages whose
/// train portion is shorter than min_train_seconds.
RandomSplitResult split_random(std::vector<ManifestRecord> records,
                               const RandomSplitOptions& options = {});

/// p_l = (n_l / N)^beta / sum_k (n_k / N)^beta. Entries with n_l = 0 get 0.
std::vector<double> sampling_weights(std::span<const double> durations, double beta);

inline constexpr double kDefaultBetaLanguage = 0.5;
inline constexpr double kDefaultBetaDataset = 0.5;

struct SamplingSpec {
  struct Entry {
    std::string dataset;
    std::string language;
    double duration_s = 0.0;
  };
  std::vector<Entry> entries;
  double beta_language = kDefaultBetaLanguage;
  double beta_dataset = kDefaultBetaDataset;
};

struct SamplingWeight {
  std::string dataset;
  std::string language;
  double probability = 0.0;
};

/// Languages balanced within each dataset with beta_language, then datasets
/// balanced over their totals with beta_dataset. Output follows input order.
std::vector<SamplingWeight> two_stage_weights(const SamplingSpec& spec);

}  // namespace longalign

#endif  // LONGALIGN_CORPUS_HPP_
