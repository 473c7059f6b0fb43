// src/pipeline.cpp

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

#include "longalign/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

#include "longalign/emissions.hpp"
#include "longalign/error.hpp"
#include "longalign/jsonl.hpp"
#include "longalign/quality.hpp"
#include "longalign/random.hpp"
#include "longalign/textnorm.hpp"
#include "longalign/trellis.hpp"

namespace longalign {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using json = nlohmann::json;

namespace {

std::string out_path(const PipelineConfig& c, std::string_view name) {
  return (fs::path(c.output_dir) / name).string();
}

void write_json(const std::string& path, const ojson& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path);
  out << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::optional<double> optional_number(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The lowest failing
// index is rethrown as a StageError, so the report does not depend on timing.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, std::string_view stage,
                  const std::vector<std::string>& ids, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), n));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw StageError(std::string(stage), ids[i], e.what());
    }
  }
}

TokenTable load_table(const PipelineConfig& c) {
  return c.token_table.empty() ? TokenTable::alignment_charset() : TokenTable::load(c.token_table);
}

struct ChapterText {
  std::vector<std::string> words;
  std::vector<int> word_verse;
};

ChapterText chapter_text(const json& rec) {
  ChapterText ct;
  ct.words = split_words(rec.at("text").get<std::string>());
  ct.word_verse = rec.at("word_verse").get<std::vector<int>>();
  if (ct.words.size() != ct.word_verse.size())
    throw FormatError("word_verse length does not match the word count");
  return ct;
}

std::string verse_text(const ChapterText& ct, int verse) {
  std::string out;
  for (std::size_t i = 0; i < ct.words.size(); ++i) {
    if (ct.word_verse[i] != verse) continue;
    if (!out.empty()) out.push_back(' ');
    out += ct.words[i];
  }
  return out;
}

StateChain chapter_chain(const ChapterText& ct, const TokenTable& table) {
  LabelSequence labels;
  for (std::size_t i = 0; i < ct.words.size(); ++i) {
    auto w = labels_from_text(ct.words[i], table, ct.word_verse[i], static_cast<int>(i));
    labels.insert(labels.end(), w.begin(), w.end());
  }
  return build_state_chain(std::move(labels), table);
}

EmissionMatrix load_chapter_emissions(const json& rec, const TokenTable& table) {
  EmissionMatrix em = load_emissions(rec.at("emissions").get<std::string>());
  if (em.vocab_size() != table.size())
    throw FormatError("emission vocabulary " + std::to_string(em.vocab_size()) +
                      " does not match token table size " + std::to_string(table.size()));
  return em;
}

ojson path_to_rle(const FramePath& path) {
  auto rle = ojson::array();
  for (std::size_t t = 0; t < path.states.size();) {
    std::size_t run = t;
    while (run < path.states.size() && path.states[run] == path.states[t]) ++run;
    rle.push_back({path.states[t], run - t});
    t = run;
  }
  return rle;
}

FramePath path_from_rle(const json& rle) {
  FramePath path;
  for (const auto& run : rle) {
    auto state = run.at(0).get<std::int32_t>();
    auto n = run.at(1).get<std::size_t>();
    path.states.insert(path.states.end(), n, state);
  }
  return path;
}

std::optional<AlignmentScore> try_score(const EmissionMatrix& em, const FramePath& path,
                                        const StateChain& chain, std::size_t begin,
                                        std::size_t end) {
  try {
    return alignment_score(em, path, chain, begin, end);
  } catch (const DegenerateAlignmentError&) {
    return std::nullopt;
  }
}

std::string group_text(const SegmentSpan& seg, const StateChain& chain, const ChapterText& ct,
                       const TokenTable& table, SpanLevel level) {
  switch (level) {
    case SpanLevel::kToken: {
      const Label& l = chain.labels()[seg.first_label];
      return l.is_star() ? std::string(kStarSymbol) : table.token(l.token);
    }
    case SpanLevel::kWord: return ct.words.at(static_cast<std::size_t>(seg.group));
    case SpanLevel::kVerse: return verse_text(ct, seg.verse);
  }
  return {};
}

// ---- normalize ------------------------------------------------------------

void stage_normalize(const PipelineConfig& c) {
  if (c.input_manifest.empty()) throw std::invalid_argument("input_manifest is not set");
  auto input = read_jsonl(c.input_manifest);
  fs::path base = fs::path(c.input_manifest).parent_path();
  Romanizer romanizer = Romanizer::from_scheme(c.romanize);

  std::vector<std::string> ids;
  std::map<std::string, std::vector<std::string>> recording_verses;
  for (std::size_t i = 0; i < input.size(); ++i) {
    const auto& rec = input[i];
    std::string id = rec.contains("id") && rec["id"].is_string() ? rec["id"].get<std::string>()
                                                                 : "line " + std::to_string(i + 1);
    ids.push_back(id);
    if (!rec.contains("verses") || !rec["verses"].is_array())
      throw StageError("normalize", id, "missing verses array");
    auto verses = rec["verses"].get<std::vector<std::string>>();
    auto& all = recording_verses[rec.value("recording", id)];
    all.insert(all.end(), verses.begin(), verses.end());
  }
  std::map<std::string, double> rates;
  for (const auto& [recording, verses] : recording_verses) rates[recording] = bracket_rate(verses);

  std::vector<ojson> out(input.size());
  parallel_for(input.size(), c.jobs, "normalize", ids, [&](std::size_t i) {
    const auto& rec = input[i];
    if (!rec.contains("emissions")) throw FormatError("missing emissions reference");
    std::string recording = rec.value("recording", ids[i]);
    double rate = rates.at(recording);
    bool flagged = brackets_flagged(rate, c.bracket_threshold);
    bool strip = flagged && c.strip_brackets;

    auto verses = rec["verses"].get<std::vector<std::string>>();
    std::vector<std::string> cleaned;
    for (const auto& v : verses) cleaned.push_back(strip ? strip_brackets(v) : v);

    NormalizedText starred = starify(normalize_verses(cleaned));
    auto words = split_words(starred.text);
    std::string text;
    auto word_verse = ojson::array();
    std::size_t dropped = 0;
    for (std::size_t w = 0; w < words.size(); ++w) {
      RomanizeResult r = romanizer(words[w]);
      dropped += r.dropped;
      for (const auto& piece : split_words(r.text)) {
        if (!text.empty()) text.push_back(' ');
        text += piece;
        word_verse.push_back(starred.word_verse[w]);
      }
    }

    auto digits = ojson::object();
    for (const auto& [k, v] : starred.digits) digits[std::to_string(k)] = v;
    auto verse_list = ojson::array();
    for (std::size_t v = 0; v < verses.size(); ++v) {
      verse_list.push_back(
          {{"verse", v}, {"raw", verses[v]}, {"normalized", normalize(cleaned[v]).text}});
    }
    fs::path em = rec["emissions"].get<std::string>();
    if (em.is_relative()) em = base / em;

    ojson o;
    o["id"] = ids[i];
    o["language"] = rec.value("language", "und");
    o["recording"] = recording;
    o["book"] = rec.value("book", "");
    o["chapter"] = rec.value("chapter", 0);
    o["emissions"] = em.lexically_normal().string();
    o["bracket_rate"] = rate;
    o["brackets_flagged"] = flagged;
    o["brackets_stripped"] = strip;
    o["romanize_scheme"] = romanizer.scheme();
    o["romanize_dropped"] = dropped;
    o["text"] = text;
    o["word_verse"] = word_verse;
    o["digits"] = digits;
    o["verses"] = verse_list;
    out[i] = std::move(o);
  });
  write_jsonl(out_path(c, files::kNormalized), out);
}

// ---- align ----------------------------------------------------------------

void stage_align(const PipelineConfig& c) {
  auto records = read_jsonl(out_path(c, files::kNormalized));
  TokenTable table = load_table(c);
  SpanLevel level = parse_span_level(c.level);
  std::vector<std::string> ids;
  for (const auto& r : records) ids.push_back(r.at("id").get<std::string>());

  std::vector<ojson> alignments(records.size()), paths(records.size()), extra(records.size());
  parallel_for(records.size(), c.jobs, "align", ids, [&](std::size_t i) {
    const auto& rec = records[i];
    ChapterText ct = chapter_text(rec);
    StateChain chain = chapter_chain(ct, table);
    EmissionMatrix em = load_chapter_emissions(rec, table);
    FramePath path = viterbi_streaming(em, chain, {c.buffer_rows, 1});

    std::map<std::size_t, std::string> digits;
    for (const auto& [k, v] : rec.at("digits").items()) digits[std::stoul(k)] = v.get<std::string>();

    auto emit = [&](SpanLevel lvl) {
      SpanSet spans = extract_spans(path, chain, em, lvl);
      // Digit runs come back in star order across the whole chapter.
      std::vector<std::string> texts;
      for (const auto& seg : spans.segments) texts.push_back(group_text(seg, chain, ct, table, lvl));
      std::vector<std::string> restored = destarify(texts, digits);
      auto segments = ojson::array();
      for (std::size_t k = 0; k < spans.segments.size(); ++k) {
        const auto& seg = spans.segments[k];
        if (seg.star) continue;
        auto score = try_score(em, path, chain, seg.begin, seg.end);
        ojson s;
        s["text"] = texts[k];
        s["restored"] = restored[k];
        if (lvl == SpanLevel::kVerse) s["verse"] = seg.verse;
        s["start_frame"] = seg.begin;
        s["end_frame"] = seg.end;
        s["start_s"] = em.frame_to_seconds(seg.begin);
        s["end_s"] = em.frame_to_seconds(seg.end);
        s["score"] = score ? ojson(score->value) : ojson(nullptr);
        segments.push_back(std::move(s));
      }
      ojson o;
      o["id"] = ids[i];
      o["level"] = span_level_name(lvl);
      o["frames"] = em.frames();
      o["stride_ms"] = em.stride_ms();
      o["log_prob"] = path.log_prob;
      o["segments"] = std::move(segments);
      return o;
    };
    alignments[i] = emit(SpanLevel::kVerse);
    if (level != SpanLevel::kVerse) extra[i] = emit(level);
    paths[i] = {{"id", ids[i]}, {"states", path_to_rle(path)}};
  });
  write_jsonl(out_path(c, files::kAlignments), alignments);
  write_jsonl(out_path(c, files::kPaths), paths);
  if (level != SpanLevel::kVerse)
    write_jsonl(out_path(c, "alignments_" + std::string(span_level_name(level)) + ".jsonl"), extra);
}

// ---- score ----------------------------------------------------------------

std::map<std::string, std::string> read_hypotheses(const std::string& path) {
  std::map<std::string, std::string> out;
  if (path.empty()) return out;
  for (const auto& j : read_jsonl(path))
    out[j.at("id").get<std::string>()] = j.at("hypothesis").get<std::string>();
  return out;
}

std::u32string without_stars_and_spaces(std::string_view text) {
  std::u32string out;
  for (char32_t ch : to_code_points(text)) {
    if (ch != U' ' && ch != U'⟨' && ch != U'∗' && ch != U'⟩') out.push_back(ch);
  }
  return out;
}

// Greedy decode over the non-star runs of [begin, end).
std::string greedy_hypothesis(const EmissionMatrix& em, const FramePath& path,
                              const StateChain& chain, const TokenTable& table, std::size_t begin,
                              std::size_t end) {
  std::string out;
  std::size_t t = begin;
  while (t < end) {
    if (chain.is_star(static_cast<std::size_t>(path.states[t]))) {
      ++t;
      continue;
    }
    std::size_t run = t;
    while (run < end && !chain.is_star(static_cast<std::size_t>(path.states[run]))) ++run;
    for (int tok : greedy_decode(em, t, run).tokens) out += table.token(tok);
    t = run;
  }
  return out;
}

void stage_score(const PipelineConfig& c) {
  auto normalized = read_jsonl(out_path(c, files::kNormalized));
  auto alignments = read_jsonl(out_path(c, files::kAlignments));
  auto paths = read_jsonl(out_path(c, files::kPaths));
  if (alignments.size() != normalized.size() || paths.size() != normalized.size())
    throw FormatError("alignment files do not match the normalized records");
  TokenTable table = load_table(c);
  auto hypotheses = read_hypotheses(c.hypotheses);

  std::vector<std::string> ids;
  for (const auto& r : normalized) ids.push_back(r.at("id").get<std::string>());
  std::vector<std::vector<ojson>> per_chapter(normalized.size());
  parallel_for(normalized.size(), c.jobs, "score", ids, [&](std::size_t i) {
    const auto& rec = normalized[i];
    if (alignments[i].at("id") != rec["id"] || paths[i].at("id") != rec["id"])
      throw FormatError("record order differs between stage files");
    ChapterText ct = chapter_text(rec);
    StateChain chain = chapter_chain(ct, table);
    EmissionMatrix em = load_chapter_emissions(rec, table);
    FramePath path = path_from_rle(paths[i]["states"]);
    check_path(path, chain);
    if (path.states.size() != em.frames()) throw FormatError("stored path length mismatch");

    for (const auto& seg : alignments[i]["segments"]) {
      int verse = seg.at("verse").get<int>();
      auto begin = seg.at("start_frame").get<std::size_t>();
      auto end = seg.at("end_frame").get<std::size_t>();
      const auto& v = rec["verses"].at(static_cast<std::size_t>(verse));
      std::string sample_id = ids[i] + "_" + std::to_string(verse + 1);
      std::string romanized = seg.at("text").get<std::string>();

      auto score = try_score(em, path, chain, begin, end);
      std::string hypothesis;
      std::u32string ref, hyp;
      auto it = hypotheses.find(sample_id);
      if (it != hypotheses.end()) {
        hypothesis = it->second;
        ref = to_code_points(normalize(v["normalized"].get<std::string>()).text);
        hyp = to_code_points(normalize(hypothesis).text);
      } else {
        hypothesis = greedy_hypothesis(em, path, chain, table, begin, end);
        ref = without_stars_and_spaces(romanized);
        hyp = to_code_points(hypothesis);
      }
      bool degenerate = !score || ref.empty();
      std::size_t errors = edit_distance(ref, hyp);

      ojson o;
      o["id"] = sample_id;
      o["chapter_id"] = ids[i];
      o["language"] = rec["language"];
      o["recording"] = rec["recording"];
      o["book"] = rec["book"];
      o["chapter"] = rec["chapter"];
      o["verse"] = verse + 1;
      o["emissions"] = rec["emissions"];
      o["start_frame"] = begin;
      o["end_frame"] = end;
      o["start_s"] = em.frame_to_seconds(begin);
      o["end_s"] = em.frame_to_seconds(end);
      o["duration_s"] = em.frame_to_seconds(end) - em.frame_to_seconds(begin);
      o["raw_text"] = v["raw"];
      o["text"] = v["normalized"];
      o["romanized"] = romanized;
      o["degenerate"] = degenerate;
      o["score"] = degenerate ? ojson(nullptr) : ojson(score->value);
      o["aligned_logprob"] = score ? ojson(score->aligned_log_prob) : ojson(nullptr);
      o["greedy_logprob"] = score ? ojson(score->greedy_log_prob) : ojson(nullptr);
      o["scored_frames"] = score ? score->frames : 0;
      o["hypothesis"] = hypothesis;
      o["errors"] = errors;
      o["ref_chars"] = ref.size();
      o["cer"] = degenerate ? ojson(nullptr)
                            : ojson(static_cast<double>(errors) / static_cast<double>(ref.size()));
      per_chapter[i].push_back(std::move(o));
    }
  });
  std::vector<ojson> out;
  for (auto& chapter : per_chapter)
    for (auto& s : chapter) out.push_back(std::move(s));
  write_jsonl(out_path(c, files::kScores), out);
}

// ---- filter ---------------------------------------------------------------

void stage_filter(const PipelineConfig& c) {
  auto scores = read_jsonl(out_path(c, files::kScores));

  std::vector<FilterInput> inputs;
  for (const auto& s : scores) {
    if (s.at("degenerate").get<bool>()) continue;
    inputs.push_back({s["id"].get<std::string>(), s["cer"].get<double>(), s["score"].get<double>()});
  }
  FilterReport samples = filter_samples(inputs, c.cer_threshold, c.score_threshold);
  std::map<std::string, const FilterEntry*> by_id;
  for (const auto& e : samples.entries) by_id[e.id] = &e;

  // Recording CER: character-weighted over the samples that survived.
  std::vector<std::string> recordings;
  std::map<std::string, std::pair<std::size_t, std::size_t>> totals;  // errors, ref chars
  std::map<std::string, std::size_t> counts;
  for (const auto& s : scores) {
    std::string rec = s["recording"].get<std::string>();
    if (!counts.count(rec)) recordings.push_back(rec);
    ++counts[rec];
    auto it = by_id.find(s["id"].get<std::string>());
    if (it == by_id.end() || !it->second->kept) continue;
    totals[rec].first += s["errors"].get<std::size_t>();
    totals[rec].second += s["ref_chars"].get<std::size_t>();
  }
  std::vector<FilterInput> rec_inputs;
  for (const auto& r : recordings) {
    auto it = totals.find(r);
    if (it == totals.end() || it->second.second == 0) continue;
    rec_inputs.push_back(
        {r, static_cast<double>(it->second.first) / static_cast<double>(it->second.second), {}});
  }
  FilterReport rec_report = filter_recordings(rec_inputs, c.recording_threshold);
  std::map<std::string, const FilterEntry*> rec_by_id;
  for (const auto& e : rec_report.entries) rec_by_id[e.id] = &e;

  std::vector<ojson> rec_out;
  for (const auto& r : recordings) {
    ojson o;
    o["id"] = r;
    o["samples"] = counts[r];
    auto it = rec_by_id.find(r);
    if (it == rec_by_id.end()) {
      o["cer"] = nullptr;
      o["kept"] = false;
      o["reason"] = "no_kept_samples";
    } else {
      o["cer"] = it->second->cer;
      o["kept"] = it->second->kept;
      o["reason"] = it->second->reason;
    }
    rec_out.push_back(std::move(o));
  }

  std::vector<ojson> report;
  std::vector<ManifestRecord> kept;
  for (const auto& s : scores) {
    std::string id = s["id"].get<std::string>();
    std::string rec = s["recording"].get<std::string>();
    ojson o;
    o["id"] = id;
    o["cer"] = s["cer"];
    o["score"] = s["score"];
    bool keep = false;
    std::string reason;
    if (s["degenerate"].get<bool>()) {
      reason = "degenerate_alignment";
    } else if (!by_id.at(id)->kept) {
      reason = by_id.at(id)->reason;
    } else if (!rec_by_id.at(rec)->kept) {
      reason = rec_by_id.at(rec)->reason;
    } else {
      keep = true;
    }
    o["kept"] = keep;
    o["reason"] = reason;
    report.push_back(std::move(o));
    if (!keep) continue;

    ManifestRecord m;
    m.id = id;
    m.language = s["language"].get<std::string>();
    m.recording = rec;
    m.book = s["book"].get<std::string>();
    m.chapter = s["chapter"].get<int>();
    m.verse = s["verse"].get<int>();
    m.duration_s = s["duration_s"].get<double>();
    m.emissions = s["emissions"].get<std::string>();
    m.start_frame = s["start_frame"].get<std::size_t>();
    m.end_frame = s["end_frame"].get<std::size_t>();
    m.raw_text = s["raw_text"].get<std::string>();
    m.text = s["text"].get<std::string>();
    m.score = optional_number(s, "score");
    m.cer = optional_number(s, "cer");
    m.extra["start_s"] = s["start_s"];
    m.extra["end_s"] = s["end_s"];
    m.extra["romanized"] = s["romanized"];
    kept.push_back(std::move(m));
  }
  write_jsonl(out_path(c, files::kFilterReport), report);
  write_jsonl(out_path(c, files::kRecordingReport), rec_out);
  write_manifest(out_path(c, files::kFiltered), kept);
}

// ---- split ----------------------------------------------------------------

void stage_split(const PipelineConfig& c) {
  auto records = read_manifest(out_path(c, files::kFiltered));
  std::vector<std::string> dropped;
  if (c.split_mode == "book") {
    records = split_by_book(std::move(records));
  } else if (c.split_mode == "fallback") {
    records = fallback_split(std::move(records));
  } else {
    RandomSplitOptions opts;
    opts.min_train_seconds = c.min_train_seconds;
    opts.seed = mix_seed(c.seed, hash_name("split"));
    auto result = split_random(std::move(records), opts);
    records = std::move(result.records);
    dropped = std::move(result.dropped_languages);
  }
  write_manifest(out_path(c, files::kManifest), records);
  ojson info;
  info["mode"] = c.split_mode;
  info["dropped_languages"] = dropped;
  write_json(out_path(c, files::kSplitInfo), info);
}

// ---- report ---------------------------------------------------------------

void stage_report(const PipelineConfig& c) {
  auto normalized = read_jsonl(out_path(c, files::kNormalized));
  auto report = read_jsonl(out_path(c, files::kFilterReport));
  auto recordings = read_jsonl(out_path(c, files::kRecordingReport));
  auto manifest = read_manifest(out_path(c, files::kManifest));
  auto info = read_json(out_path(c, files::kSplitInfo));

  std::size_t kept = 0;
  std::map<std::string, std::size_t> reasons;
  for (const auto& r : report) {
    if (r.at("kept").get<bool>()) {
      ++kept;
    } else {
      ++reasons[r.at("reason").get<std::string>()];
    }
  }
  std::size_t rec_kept = 0;
  for (const auto& r : recordings) rec_kept += r.at("kept").get<bool>() ? 1 : 0;
  std::set<std::string> flagged;
  for (const auto& n : normalized)
    if (n.at("brackets_flagged").get<bool>()) flagged.insert(n["recording"].get<std::string>());

  std::map<std::string, std::pair<std::size_t, double>> splits;
  std::map<std::string, std::map<std::string, double>> languages;
  for (const auto& name : {"train", "dev", "test"}) splits[name] = {0, 0.0};
  for (const auto& m : manifest) {
    auto& s = splits[std::string(split_name(m.split))];
    ++s.first;
    s.second += m.duration_s / 3600.0;
    languages[m.language][std::string(split_name(m.split))] += m.duration_s / 3600.0;
  }

  ojson summary;
  summary["chapters"] = normalized.size();
  summary["samples"] = {{"total", report.size()},
                        {"kept", kept},
                        {"dropped", report.size() - kept},
                        {"dropped_by_reason", reasons}};
  summary["recordings"] = {{"total", recordings.size()},
                           {"kept", rec_kept},
                           {"dropped", recordings.size() - rec_kept},
                           {"brackets_flagged", flagged}};
  ojson split_summary;
  for (const auto& name : {"train", "dev", "test"})
    split_summary[name] = {{"samples", splits[name].first}, {"hours", splits[name].second}};
  summary["split_mode"] = info.at("mode");
  summary["splits"] = split_summary;
  summary["hours_by_language"] = languages;
  summary["dropped_languages"] = info.at("dropped_languages");
  write_json(out_path(c, files::kSummary), summary);
}

void write_partial(const PipelineConfig& c, const std::string& message) {
  std::ofstream out(out_path(c, files::kPartial), std::ios::trunc);
  out << message << '\n';
}

}  // namespace

// ---- config ---------------------------------------------------------------

void validate(const PipelineConfig& c) {
  auto in_unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  };
  in_unit(c.cer_threshold, "cer_threshold");
  in_unit(c.recording_threshold, "recording_threshold");
  in_unit(c.bracket_threshold, "bracket_threshold");
  if (!(c.score_threshold <= 0.0) || std::isinf(c.score_threshold))
    throw std::invalid_argument("score_threshold must be finite and <= 0");
  if (c.buffer_rows == 0) throw std::invalid_argument("buffer_rows must be >= 1");
  if (c.jobs == 0) throw std::invalid_argument("jobs must be >= 1");
  if (c.split_mode != "book" && c.split_mode != "fallback" && c.split_mode != "random")
    throw std::invalid_argument("split_mode must be book, fallback or random");
  if (!(c.min_train_seconds >= 0.0)) throw std::invalid_argument("min_train_seconds must be >= 0");
  parse_span_level(c.level);
  if (c.romanize != "builtin" && c.romanize.rfind("table:", 0) != 0)
    throw std::invalid_argument("romanize must be builtin or table:<path>");
  if (c.output_dir.empty()) throw std::invalid_argument("output_dir is not set");
}

ojson to_json(const PipelineConfig& c) {
  ojson j;
  j["input_manifest"] = c.input_manifest;
  j["token_table"] = c.token_table;
  j["romanize"] = c.romanize;
  j["score_threshold"] = c.score_threshold;
  j["cer_threshold"] = c.cer_threshold;
  j["recording_threshold"] = c.recording_threshold;
  j["bracket_threshold"] = c.bracket_threshold;
  j["strip_brackets"] = c.strip_brackets;
  j["buffer_rows"] = c.buffer_rows;
  j["split_mode"] = c.split_mode;
  j["level"] = c.level;
  j["min_train_seconds"] = c.min_train_seconds;
  j["hypotheses"] = c.hypotheses;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["jobs"] = c.jobs;
  return j;
}

PipelineConfig config_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("config must be a JSON object");
  PipelineConfig c;
  static const std::set<std::string> known = {
      "input_manifest", "token_table", "romanize",   "score_threshold",  "cer_threshold",
      "recording_threshold", "bracket_threshold", "strip_brackets", "buffer_rows",
      "split_mode",     "level",       "min_train_seconds", "hypotheses", "seed",
      "output_dir",     "jobs"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw FormatError("unknown config key: " + key);
  }
  try {
    c.input_manifest = j.value("input_manifest", c.input_manifest);
    c.token_table = j.value("token_table", c.token_table);
    c.romanize = j.value("romanize", c.romanize);
    c.score_threshold = j.value("score_threshold", c.score_threshold);
    c.cer_threshold = j.value("cer_threshold", c.cer_threshold);
    c.recording_threshold = j.value("recording_threshold", c.recording_threshold);
    c.bracket_threshold = j.value("bracket_threshold", c.bracket_threshold);
    c.strip_brackets = j.value("strip_brackets", c.strip_brackets);
    c.buffer_rows = j.value("buffer_rows", c.buffer_rows);
    c.split_mode = j.value("split_mode", c.split_mode);
    c.level = j.value("level", c.level);
    c.min_train_seconds = j.value("min_train_seconds", c.min_train_seconds);
    c.hypotheses = j.value("hypotheses", c.hypotheses);
    c.seed = j.value("seed", c.seed);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.jobs = j.value("jobs", c.jobs);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad config value: ") + e.what());
  }
  return c;
}

PipelineConfig load_config(const std::string& path) { return config_from_json(read_json(path)); }

void save_config(const PipelineConfig& config, const std::string& path) {
  write_json(path, to_json(config));
}

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::kNormalize: return "normalize";
    case Stage::kAlign: return "align";
    case Stage::kScore: return "score";
    case Stage::kFilter: return "filter";
    case Stage::kSplit: return "split";
    case Stage::kReport: return "report";
  }
  return "unknown";
}

Stage parse_stage(std::string_view name) {
  for (Stage s : kAllStages)
    if (stage_name(s) == name) return s;
  throw std::invalid_argument("unknown stage: " + std::string(name));
}

void run_stage(const PipelineConfig& config, Stage stage) {
  std::string name(stage_name(stage));
  try {
    validate(config);
    fs::create_directories(config.output_dir);
    switch (stage) {
      case Stage::kNormalize: stage_normalize(config); break;
      case Stage::kAlign: stage_align(config); break;
      case Stage::kScore: stage_score(config); break;
      case Stage::kFilter: stage_filter(config); break;
      case Stage::kSplit: stage_split(config); break;
      case Stage::kReport: stage_report(config); break;
    }
  } catch (const StageError& e) {
    write_partial(config, e.what());
    throw;
  } catch (const std::exception& e) {
    StageError err(name, "", e.what());
    write_partial(config, err.what());
    throw err;
  }
}

ojson run_pipeline(const PipelineConfig& config) {
  validate(config);
  fs::create_directories(config.output_dir);
  fs::remove(out_path(config, files::kPartial));
  PipelineConfig stored = config;
  stored.output_dir = ".";
  save_config(stored, out_path(config, files::kConfig));
  for (Stage s : kAllStages) run_stage(config, s);
  return read_json(out_path(config, files::kSummary));
}

// ---- segment --------------------------------------------------------------

std::vector<LabeledSegment> read_segment_labels(const std::string& path) {
  std::vector<LabeledSegment> out;
  for (const auto& j : read_jsonl(path)) {
    try {
      out.push_back({j.at("start_s").get<double>(), j.at("end_s").get<double>(),
                     parse_segment_class(j.at("class").get<std::string>())});
    } catch (const json::exception& e) {
      throw FormatError(path + ": " + e.what());
    }
  }
  return out;
}

std::vector<ManifestRecord> segment_recording(std::span<const LabeledSegment> segments,
                                              const std::string& recording,
                                              const std::string& language, std::uint64_t seed) {
  std::vector<ManifestRecord> out;
  auto runs = join_segments(segments);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    auto pieces = partition_sample(runs[i], mix_seed(seed, i));
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      ManifestRecord r;
      r.id = recording + "_" + std::to_string(i) + "_" + std::to_string(k);
      r.language = language;
      r.recording = recording;
      r.duration_s = pieces[k].duration();
      r.extra["start_s"] = pieces[k].start_s;
      r.extra["end_s"] = pieces[k].end_s;
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace longalign
