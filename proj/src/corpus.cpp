// src/corpus.cpp

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

#include "longalign/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "longalign/error.hpp"
#include "longalign/jsonl.hpp"
#include "longalign/random.hpp"

namespace longalign {

namespace {

constexpr double kTwoHours = 2.0 * 3600.0;
constexpr double kFallbackFraction = 0.10;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "id",   "language", "recording", "book",     "chapter", "verse", "duration_s",
      "emissions", "start_frame", "end_frame", "raw_text", "text", "split", "score", "cer"};
  return keys;
}

// Indices of `records` grouped by recording, groups in first-seen order.
std::vector<std::vector<std::size_t>> group_by_recording(const std::vector<ManifestRecord>& records) {
  std::vector<std::vector<std::size_t>> groups;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = index.try_emplace(records[i].recording, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

void fallback_one_recording(std::vector<ManifestRecord>& records,
                            const std::vector<std::size_t>& members,
                            const BookSplitOptions& options) {
  std::map<std::string, double> book_seconds;
  double total = 0.0;
  for (std::size_t i : members) {
    book_seconds[records[i].book] += records[i].duration_s;
    total += records[i].duration_s;
  }

  // Canonical order first, unknown books after in lexicographic order.
  std::vector<std::string> order;
  for (const auto& b : options.book_order) {
    if (book_seconds.count(b)) order.push_back(b);
  }
  for (const auto& [b, _] : book_seconds) {
    if (std::find(order.begin(), order.end(), b) == order.end()) order.push_back(b);
  }

  const double target = fallback_target_seconds(total);
  std::map<std::string, Split> assignment;
  std::size_t unassigned = order.size();

  auto fill = [&](Split split, const std::string& preferred) {
    std::vector<std::string> candidates;
    if (book_seconds.count(preferred)) candidates.push_back(preferred);
    for (const auto& b : order) {
      if (b != preferred) candidates.push_back(b);
    }
    double got = 0.0;
    for (const auto& b : candidates) {
      if (got >= target || unassigned <= 1) break;
      if (assignment.count(b)) continue;
      assignment[b] = split;
      got += book_seconds[b];
      --unassigned;
    }
  };
  fill(Split::kDev, options.dev_book);
  fill(Split::kTest, options.test_book);

  for (std::size_t i : members) {
    auto it = assignment.find(records[i].book);
    records[i].split = it == assignment.end() ? Split::kTrain : it->second;
  }
}

}  // namespace

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kUnassigned: return "unassigned";
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "unassigned";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  if (name == "unassigned" || name.empty()) return Split::kUnassigned;
  throw std::invalid_argument("unknown split '" + std::string(name) + "'");
}

nlohmann::ordered_json to_json(const ManifestRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["language"] = r.language;
  j["recording"] = r.recording;
  j["book"] = r.book;
  j["chapter"] = r.chapter;
  j["verse"] = r.verse;
  j["duration_s"] = r.duration_s;
  j["emissions"] = r.emissions;
  if (r.start_frame) j["start_frame"] = *r.start_frame;
  if (r.end_frame) j["end_frame"] = *r.end_frame;
  j["raw_text"] = r.raw_text;
  j["text"] = r.text;
  j["split"] = split_name(r.split);
  if (r.score) j["score"] = *r.score;
  if (r.cer) j["cer"] = *r.cer;
  for (const auto& [k, v] : r.extra.items()) j[k] = v;
  return j;
}

ManifestRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("manifest record must be a JSON object");
  ManifestRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    r.language = j.value("language", "");
    r.recording = j.value("recording", "");
    r.book = j.value("book", "");
    r.chapter = j.value("chapter", 0);
    r.verse = j.value("verse", -1);
    r.duration_s = j.value("duration_s", 0.0);
    r.emissions = j.value("emissions", "");
    if (j.contains("start_frame")) r.start_frame = j["start_frame"].get<std::size_t>();
    if (j.contains("end_frame")) r.end_frame = j["end_frame"].get<std::size_t>();
    r.raw_text = j.value("raw_text", "");
    r.text = j.value("text", "");
    r.split = parse_split(j.value("split", "unassigned"));
    if (j.contains("score") && !j["score"].is_null()) r.score = j["score"].get<double>();
    if (j.contains("cer") && !j["cer"].is_null()) r.cer = j["cer"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest record: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("manifest record: ") + e.what());
  }
  if (!(r.duration_s > 0.0))
    throw FormatError("manifest record " + r.id + ": duration_s must be positive");
  for (const auto& [k, v] : j.items()) {
    if (!known_keys().count(k)) r.extra[k] = v;
  }
  return r;
}

std::vector<ManifestRecord> read_manifest(const std::string& path) {
  std::vector<ManifestRecord> out;
  for (const auto& j : read_jsonl(path)) out.push_back(record_from_json(j));
  return out;
}

void write_manifest(const std::string& path, std::span<const ManifestRecord> records) {
  std::vector<nlohmann::ordered_json> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(to_json(r));
  write_jsonl(path, lines);
}

const std::vector<std::string>& new_testament_books() {
  static const std::vector<std::string> books = {
      "MAT", "MRK", "LUK", "JHN", "ACT", "ROM", "1CO", "2CO", "GAL",
      "EPH", "PHP", "COL", "1TH", "2TH", "1TI", "2TI", "TIT", "PHM",
      "HEB", "JAS", "1PE", "2PE", "1JN", "2JN", "3JN", "JUD", "REV"};
  return books;
}

std::vector<ManifestRecord> split_by_book(std::vector<ManifestRecord> records,
                                          const BookSplitOptions& options) {
  for (const auto& members : group_by_recording(records)) {
    bool has_dev = false, has_test = false;
    for (std::size_t i : members) {
      has_dev |= records[i].book == options.dev_book;
      has_test |= records[i].book == options.test_book;
    }
    if (!has_dev || !has_test) {
      fallback_one_recording(records, members, options);
      continue;
    }
    for (std::size_t i : members) {
      auto& r = records[i];
      r.split = r.book == options.dev_book    ? Split::kDev
                : r.book == options.test_book ? Split::kTest
                                              : Split::kTrain;
    }
  }
  return records;
}

double fallback_target_seconds(double total_seconds) {
  return std::min(kFallbackFraction * total_seconds, kTwoHours);
}

std::vector<ManifestRecord> fallback_split(std::vector<ManifestRecord> records,
                                           const BookSplitOptions& options) {
  for (const auto& members : group_by_recording(records))
    fallback_one_recording(records, members, options);
  return records;
}

RandomSplitResult split_random(std::vector<ManifestRecord> records,
                               const RandomSplitOptions& options) {
  if (options.train < 0 || options.dev < 0 || options.test < 0 ||
      std::abs(options.train + options.dev + options.test - 1.0) > 1e-9)
    throw std::invalid_argument("split fractions must be non-negative and sum to 1");

  std::map<std::string, std::vector<std::size_t>> by_language;
  for (std::size_t i = 0; i < records.size(); ++i) by_language[records[i].language].push_back(i);

  RandomSplitResult result;
  std::set<std::string> dropped;
  for (auto& [language, members] : by_language) {
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return records[a].id < records[b].id; });
    std::mt19937_64 rng(mix_seed(options.seed, hash_name(language)));
    deterministic_shuffle(members.begin(), members.end(), rng);

    const auto n = static_cast<double>(members.size());
    auto n_train = static_cast<std::size_t>(std::llround(options.train * n));
    auto n_dev = std::min(members.size() - n_train,
                          static_cast<std::size_t>(std::llround(options.dev * n)));
    double train_seconds = 0.0;
    for (std::size_t k = 0; k < members.size(); ++k) {
      auto& r = records[members[k]];
      r.split = k < n_train ? Split::kTrain : (k < n_train + n_dev ? Split::kDev : Split::kTest);
      if (r.split == Split::kTrain) train_seconds += r.duration_s;
    }
    if (train_seconds < options.min_train_seconds) dropped.insert(language);
  }

  for (auto& r : records) {
    if (!dropped.count(r.language)) result.records.push_back(std::move(r));
  }
  result.dropped_languages.assign(dropped.begin(), dropped.end());
  return result;
}

std::vector<double> sampling_weights(std::span<const double> durations, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in [0, 1]");
  double total = 0.0;
  for (double n : durations) {
    if (!(n >= 0.0) || !std::isfinite(n))
      throw std::invalid_argument("durations must be finite and non-negative");
    total += n;
  }
  if (!(total > 0.0)) throw std::invalid_argument("at least one duration must be positive");

  std::vector<double> weights(durations.size(), 0.0);
  double norm = 0.0;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    if (durations[i] > 0.0) weights[i] = std::pow(durations[i] / total, beta);
    norm += weights[i];
  }
  for (double& w : weights) w /= norm;
  return weights;
}

std::vector<SamplingWeight> two_stage_weights(const SamplingSpec& spec) {
  if (spec.entries.empty()) throw std::invalid_argument("sampling spec has no entries");

  std::vector<std::string> datasets;
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < spec.entries.size(); ++i) {
    const auto& name = spec.entries[i].dataset;
    if (!members.count(name)) datasets.push_back(name);
    members[name].push_back(i);
  }

  std::vector<double> within(spec.entries.size(), 0.0);
  std::vector<double> dataset_totals;
  for (const auto& name : datasets) {
    std::vector<double> n;
    for (std::size_t i : members[name]) n.push_back(spec.entries[i].duration_s);
    auto w = sampling_weights(n, spec.beta_language);
    for (std::size_t k = 0; k < w.size(); ++k) within[members[name][k]] = w[k];
    // Resampling redistributes a dataset's hours between its languages
    // without changing the total.
    dataset_totals.push_back(std::accumulate(n.begin(), n.end(), 0.0));
  }
  auto across = sampling_weights(dataset_totals, spec.beta_dataset);

  std::vector<SamplingWeight> out;
  out.reserve(spec.entries.size());
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (std::size_t i : members[datasets[d]]) {
      out.push_back({spec.entries[i].dataset, spec.entries[i].language, across[d] * within[i]});
    }
  }
  // Restore input order.
  std::vector<SamplingWeight> ordered(spec.entries.size());
  std::size_t k = 0;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (std::size_t i : members[datasets[d]]) ordered[i] = out[k++];
  }
  return ordered;
}

}  // namespace longalign
