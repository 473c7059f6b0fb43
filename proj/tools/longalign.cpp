// tools/longalign.cpp

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

// Command-line front end: one subcommand per pipeline stage plus standalone
// utilities (segment, sample-weights, bench, synth).

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "longalign/bench.hpp"
#include "longalign/corpus.hpp"
#include "longalign/error.hpp"
#include "longalign/jsonl.hpp"
#include "longalign/pipeline.hpp"
#include "longalign/random.hpp"
#include "longalign/synthetic.hpp"
#include "longalign/textnorm.hpp"

namespace {

using longalign::PipelineConfig;
using ojson = nlohmann::ordered_json;

struct Overrides {
  std::optional<std::string> input, output_dir, token_table, romanize, split_mode, level, hypotheses;
  std::optional<double> score_threshold, cer_threshold, recording_threshold, bracket_threshold;
  std::optional<double> min_train_seconds;
  std::optional<std::size_t> buffer_rows;
  bool strip_brackets = false;
};

struct Globals {
  std::string config;
  std::optional<unsigned> jobs;
  std::optional<std::uint64_t> seed;
};

void add_io_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--input", o.input, "Chapter manifest (JSONL)");
  cmd->add_option("--output-dir,-o", o.output_dir, "Directory for stage files");
}

PipelineConfig make_config(const Globals& g, const Overrides& o) {
  PipelineConfig c = g.config.empty() ? PipelineConfig{} : longalign::load_config(g.config);
  if (g.jobs) c.jobs = *g.jobs;
  if (g.seed) c.seed = *g.seed;
  if (o.input) c.input_manifest = *o.input;
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.token_table) c.token_table = *o.token_table;
  if (o.romanize) c.romanize = *o.romanize;
  if (o.split_mode) c.split_mode = *o.split_mode;
  if (o.level) c.level = *o.level;
  if (o.hypotheses) c.hypotheses = *o.hypotheses;
  if (o.score_threshold) c.score_threshold = *o.score_threshold;
  if (o.cer_threshold) c.cer_threshold = *o.cer_threshold;
  if (o.recording_threshold) c.recording_threshold = *o.recording_threshold;
  if (o.bracket_threshold) c.bracket_threshold = *o.bracket_threshold;
  if (o.min_train_seconds) c.min_train_seconds = *o.min_train_seconds;
  if (o.buffer_rows) c.buffer_rows = *o.buffer_rows;
  if (o.strip_brackets) c.strip_brackets = true;
  longalign::validate(c);
  return c;
}

template <typename Json>
void emit_jsonl(const std::string& path, const std::vector<Json>& values) {
  if (path.empty() || path == "-") {
    for (const auto& v : values) std::cout << v.dump() << '\n';
  } else {
    longalign::write_jsonl(path, values);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-audio CTC forced alignment and corpus preparation"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Pipeline config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--jobs,-j", g.jobs, "Worker threads for per-recording stages")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Base seed for every random choice");

  Overrides o;
  std::string text;

  auto* normalize = app.add_subcommand("normalize", "Normalize, starify and romanize transcripts");
  add_io_options(normalize, o);
  normalize->add_option("--text", text, "Normalize one string and print the result");
  normalize->add_option("--romanize", o.romanize, "builtin | table:<path>");
  normalize->add_flag("--strip-brackets", o.strip_brackets,
                      "Strip brackets in recordings at or above the bracket threshold");
  normalize->add_option("--bracket-threshold", o.bracket_threshold, "Default 0.03");

  auto* align = app.add_subcommand("align", "Streaming Viterbi alignment of normalized chapters");
  add_io_options(align, o);
  align->add_option("--token-table", o.token_table, "One token per line; default a-z and '");
  align->add_option("--buffer-rows,-B", o.buffer_rows, "Backtrack rows kept before a flush")
      ->check(CLI::PositiveNumber);
  align->add_option("--level", o.level, "Extra output level: token | word | verse");

  auto* score = app.add_subcommand("score", "Alignment scores and CER per verse");
  add_io_options(score, o);
  score->add_option("--token-table", o.token_table, "One token per line; default a-z and '");
  score->add_option("--hypotheses", o.hypotheses, "JSONL {id, hypothesis} from an external ASR");

  auto* filter = app.add_subcommand("filter", "Apply score, sample CER and recording CER rules");
  add_io_options(filter, o);
  filter->add_option("--score-threshold", o.score_threshold, "Default -0.2");
  filter->add_option("--cer-threshold", o.cer_threshold, "Default 0.10");
  filter->add_option("--recording-threshold", o.recording_threshold, "Default 0.05");

  std::string labels_path, recording = "recording", language = "und", out_path;
  auto* segment = app.add_subcommand("segment", "Build 5.5-30 s samples from segment labels");
  segment->add_option("--labels", labels_path, "JSONL {start_s, end_s, class}")
      ->required()
      ->check(CLI::ExistingFile);
  segment->add_option("--recording", recording, "Recording id used for sample ids");
  segment->add_option("--language", language, "Language code");
  segment->add_option("--out", out_path, "Output manifest; stdout when omitted");

  std::string split_in;
  auto* split = app.add_subcommand("split", "Assign train/dev/test");
  add_io_options(split, o);
  split->add_option("--mode", o.split_mode, "book | fallback | random");
  split->add_option("--manifest", split_in, "Split this manifest instead of the stage file");
  split->add_option("--out", out_path, "Output for --manifest; stdout when omitted");
  split->add_option("--min-train-seconds", o.min_train_seconds, "Random-mode language floor");

  std::string weights_in;
  double beta_l = longalign::kDefaultBetaLanguage, beta_d = longalign::kDefaultBetaDataset;
  auto* weights = app.add_subcommand("sample-weights", "Two-stage temperature sampling weights");
  weights->add_option("--in", weights_in, "JSONL {dataset, language, duration_s}")
      ->required()
      ->check(CLI::ExistingFile);
  weights->add_option("--beta-l", beta_l, "Language temperature, default 0.5");
  weights->add_option("--beta-d", beta_d, "Dataset temperature, default 0.5");
  weights->add_option("--out", out_path, "Output JSONL; stdout when omitted");

  longalign::BenchConfig bench_cfg;
  std::string csv_path;
  bool no_full = false;
  auto* bench = app.add_subcommand("bench", "Streaming vs full-trellis scaling benchmark");
  bench->add_option("--frames", bench_cfg.frame_counts, "Frame counts to time");
  bench->add_option("--labels", bench_cfg.labels, "Target labels M");
  bench->add_option("--vocab", bench_cfg.vocab_size, "Vocabulary size including blank");
  bench->add_option("--buffer-rows,-B", bench_cfg.buffer_rows, "Backtrack buffer rows")
      ->check(CLI::PositiveNumber);
  bench->add_option("--threads", bench_cfg.threads, "Threads for the per-frame update")
      ->check(CLI::PositiveNumber);
  bench->add_option("--repeats", bench_cfg.repeats, "Timed runs per point; fastest is kept");
  bench->add_flag("--no-full", no_full, "Skip the full-trellis oracle");
  bench->add_option("--out", out_path, "JSON report; stdout when omitted");
  bench->add_option("--csv", csv_path, "Also write CSV rows here");

  auto* pipeline = app.add_subcommand("pipeline", "Run every stage in order");
  add_io_options(pipeline, o);
  pipeline->add_option("--token-table", o.token_table, "One token per line; default a-z and '");
  pipeline->add_option("--romanize", o.romanize, "builtin | table:<path>");
  pipeline->add_flag("--strip-brackets", o.strip_brackets, "Strip brackets in flagged recordings");
  pipeline->add_option("--bracket-threshold", o.bracket_threshold, "Default 0.03");
  pipeline->add_option("--buffer-rows,-B", o.buffer_rows, "Backtrack rows kept before a flush")
      ->check(CLI::PositiveNumber);
  pipeline->add_option("--level", o.level, "Extra alignment level: token | word | verse");
  pipeline->add_option("--hypotheses", o.hypotheses, "JSONL {id, hypothesis}");
  pipeline->add_option("--score-threshold", o.score_threshold, "Default -0.2");
  pipeline->add_option("--cer-threshold", o.cer_threshold, "Default 0.10");
  pipeline->add_option("--recording-threshold", o.recording_threshold, "Default 0.05");
  pipeline->add_option("--mode", o.split_mode, "book | fallback | random");
  pipeline->add_option("--min-train-seconds", o.min_train_seconds, "Random-mode language floor");

  std::string synth_dir;
  longalign::SyntheticCorpusOptions synth_opts;
  auto* synth = app.add_subcommand("synth", "Write a synthetic mini-corpus with ground truth");
  synth->add_option("--out", synth_dir, "Output directory")->required();
  synth->add_option("--languages", synth_opts.languages, "Language codes");
  synth->add_option("--chapters", synth_opts.chapters_per_book, "Chapters per book");

  CLI11_PARSE(app, argc, argv);

  try {
    if (normalize->parsed() && !text.empty()) {
      auto romanizer = longalign::Romanizer::from_scheme(o.romanize.value_or("builtin"));
      auto starred = longalign::starify(longalign::normalize(text));
      auto roman = romanizer(starred.text);
      ojson j;
      j["normalized"] = longalign::normalize(text).text;
      j["starified"] = starred.text;
      j["romanized"] = roman.text;
      j["dropped"] = roman.dropped;
      auto digits = ojson::object();
      for (const auto& [k, v] : starred.digits) digits[std::to_string(k)] = v;
      j["digits"] = digits;
      std::cout << j.dump() << '\n';
      return 0;
    }
    if (segment->parsed()) {
      auto segs = longalign::read_segment_labels(labels_path);
      auto records = longalign::segment_recording(segs, recording, language, g.seed.value_or(0));
      std::vector<ojson> out;
      for (const auto& r : records) out.push_back(longalign::to_json(r));
      emit_jsonl(out_path, out);
      return 0;
    }
    if (weights->parsed()) {
      longalign::SamplingSpec spec;
      spec.beta_language = beta_l;
      spec.beta_dataset = beta_d;
      for (const auto& j : longalign::read_jsonl(weights_in)) {
        spec.entries.push_back({j.at("dataset").get<std::string>(),
                                j.at("language").get<std::string>(),
                                j.at("duration_s").get<double>()});
      }
      std::vector<ojson> out;
      for (const auto& w : longalign::two_stage_weights(spec))
        out.push_back({{"dataset", w.dataset}, {"language", w.language}, {"probability", w.probability}});
      emit_jsonl(out_path, out);
      return 0;
    }
    if (bench->parsed()) {
      bench_cfg.run_full = !no_full;
      bench_cfg.seed = g.seed.value_or(0);
      auto report = longalign::run_scaling_bench(bench_cfg);
      std::string dumped = longalign::to_json(report).dump(2);
      if (out_path.empty()) {
        std::cout << dumped << '\n';
      } else {
        std::ofstream(out_path) << dumped << '\n';
      }
      if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        longalign::write_csv(report, csv);
      }
      return 0;
    }
    if (synth->parsed()) {
      synth_opts.seed = g.seed.value_or(synth_opts.seed);
      longalign::write_synthetic_corpus(longalign::make_synthetic_corpus(synth_opts), synth_dir);
      return 0;
    }
    if (split->parsed() && !split_in.empty()) {
      PipelineConfig c = make_config(g, o);
      auto records = longalign::read_manifest(split_in);
      if (c.split_mode == "book") {
        records = longalign::split_by_book(std::move(records));
      } else if (c.split_mode == "fallback") {
        records = longalign::fallback_split(std::move(records));
      } else {
        longalign::RandomSplitOptions opts;
        opts.min_train_seconds = c.min_train_seconds;
        opts.seed = longalign::mix_seed(c.seed, longalign::hash_name("split"));
        auto result = longalign::split_random(std::move(records), opts);
        records = std::move(result.records);
        for (const auto& lang : result.dropped_languages)
          std::cerr << "dropped language " << lang << ": train portion below floor\n";
      }
      std::vector<ojson> out;
      for (const auto& r : records) out.push_back(longalign::to_json(r));
      emit_jsonl(out_path, out);
      return 0;
    }

    PipelineConfig c = make_config(g, o);
    if (pipeline->parsed()) {
      auto summary = longalign::run_pipeline(c);
      std::cout << summary.dump(2) << '\n';
      return 0;
    }
    for (auto [cmd, stage] : {std::pair{normalize, longalign::Stage::kNormalize},
                              std::pair{align, longalign::Stage::kAlign},
                              std::pair{score, longalign::Stage::kScore},
                              std::pair{filter, longalign::Stage::kFilter},
                              std::pair{split, longalign::Stage::kSplit}}) {
      if (cmd->parsed()) longalign::run_stage(c, stage);
    }
  } catch (const longalign::StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
