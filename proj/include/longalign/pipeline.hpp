// include/longalign/pipeline.hpp

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

// Corpus build driver. Each stage reads the previous stage's file from the
// output directory and writes its own, so any stage can be rerun alone:
//
//   normalize  input manifest       -> normalized.jsonl
//   align      normalized.jsonl     -> alignments.jsonl, paths.jsonl
//   score      alignments, paths    -> scores.jsonl
//   filter     scores.jsonl         -> filter_report.jsonl, recording_report.jsonl,
//                                      filtered.jsonl
//   split      filtered.jsonl       -> manifest.jsonl, split_info.json
//   report     all of the above     -> summary.json
//
// The input manifest holds one chapter per line:
//   {id, language, recording, book, chapter, emissions, verses: [raw text, ...]}
// with `emissions` resolved against the manifest's directory.

#ifndef LONGALIGN_PIPELINE_HPP_
#define LONGALIGN_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "longalign/corpus.hpp"
#include "longalign/segment.hpp"

namespace longalign {

struct PipelineConfig {
  std::string input_manifest;
  std::string token_table;           // empty: the builtin a-z + apostrophe charset
  std::string romanize = "builtin";  // builtin | table:<path>
  double score_threshold = -0.2;
  double cer_threshold = 0.10;
  double recording_threshold = 0.05;
  double bracket_threshold = 0.03;
  bool strip_brackets = false;       // strip in recordings whose bracket rate is flagged
  std::size_t buffer_rows = 100;
  std::string split_mode = "book";   // book | fallback | random
  std::string level = "verse";       // extra alignment output at token or word level
  double min_train_seconds = 300.0;  // random split language floor
  std::string hypotheses;            // optional JSONL {id, hypothesis}
  std::uint64_t seed = 0;
  std::string output_dir = "longalign_out";
  unsigned jobs = 1;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const PipelineConfig& config);
nlohmann::ordered_json to_json(const PipelineConfig& config);
/// Unknown keys are rejected. Missing keys keep their defaults.
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::string& path);
void save_config(const PipelineConfig& config, const std::string& path);

enum class Stage { kNormalize, kAlign, kScore, kFilter, kSplit, kReport };
inline constexpr Stage kAllStages[] = {Stage::kNormalize, Stage::kAlign,  Stage::kScore,
                                       Stage::kFilter,    Stage::kSplit,  Stage::kReport};
std::string_view stage_name(Stage stage);
Stage parse_stage(std::string_view name);

namespace files {
inline constexpr std::string_view kNormalized = "normalized.jsonl";
inline constexpr std::string_view kAlignments = "alignments.jsonl";
inline constexpr std::string_view kPaths = "paths.jsonl";
inline constexpr std::string_view kScores = "scores.jsonl";
inline constexpr std::string_view kFilterReport = "filter_report.jsonl";
inline constexpr std::string_view kRecordingReport = "recording_report.jsonl";
inline constexpr std::string_view kFiltered = "filtered.jsonl";
inline constexpr std::string_view kManifest = "manifest.jsonl";
inline constexpr std::string_view kSplitInfo = "split_info.json";
inline constexpr std::string_view kSummary = "summary.json";
inline constexpr std::string_view kConfig = "config.json";
inline constexpr std::string_view kPartial = "PARTIAL";
}  // namespace files

/// Runs one stage. On failure writes a PARTIAL marker naming the stage and
/// throws StageError.
void run_stage(const PipelineConfig& config, Stage stage);

/// Runs every stage in order and returns the summary.
nlohmann::ordered_json run_pipeline(const PipelineConfig& config);

/// Joins speech runs, cuts them into 5.5-30 s pieces and emits one manifest
/// record per piece (start_s and end_s carried in `extra`).
std::vector<ManifestRecord> segment_recording(std::span<const LabeledSegment> segments,
                                              const std::string& recording,
                                              const std::string& language, std::uint64_t seed);

std::vector<LabeledSegment> read_segment_labels(const std::string& path);

}  // namespace longalign

#endif  // LONGALIGN_PIPELINE_HPP_
