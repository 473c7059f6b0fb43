// src/trellis.cpp

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

#include "longalign/trellis.hpp"

#include <algorithm>
#include <barrier>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <thread>

#include "longalign/error.hpp"

namespace longalign {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Best predecessor of `s` in `prev`; ties go to the smallest state index.
// Returns the step size (0, 1 or 2) and writes the score.
inline std::uint8_t best_predecessor(const double* prev, const StateChain& chain, std::size_t s,
                                     double* score) {
  double best = prev[s];
  std::uint8_t delta = 0;
  if (s >= 1 && prev[s - 1] >= best) {
    best = prev[s - 1];
    delta = 1;
  }
  if (chain.can_skip_into(s) && prev[s - 2] >= best) {
    best = prev[s - 2];
    delta = 2;
  }
  *score = best;
  return delta;
}

std::size_t pick_terminal(double last_blank, double last_label, std::size_t num_states) {
  if (last_blank == kNegInf && last_label == kNegInf)
    throw UnalignableError("unalignable: every path collapsing to the target has probability 0");
  return last_blank >= last_label ? num_states - 1 : num_states - 2;
}

void check_alignable(const EmissionMatrix& emissions, const StateChain& chain) {
  if (chain.size() == 0) throw std::invalid_argument("empty state chain");
  if (emissions.vocab_size() < chain.vocab_size())
    throw std::invalid_argument("state chain references tokens beyond the emission vocabulary");
  if (emissions.frames() < chain.min_frames())
    throw UnalignableError("unalignable: " + std::to_string(emissions.frames()) +
                           " frames cannot carry " + std::to_string(chain.label_count()) +
                           " labels (need at least " + std::to_string(chain.min_frames()) + ")");
}

}  // namespace

LabelSequence labels_from_text(std::string_view text, const TokenTable& table, int verse,
                               int first_word) {
  LabelSequence labels;
  int word = first_word;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos >= text.size()) break;
    std::size_t end = text.find(' ', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view w = text.substr(pos, end - pos);

    std::size_t i = 0;
    while (i < w.size()) {
      if (w.substr(i).starts_with(kStarSymbol)) {
        labels.push_back({kStarToken, word, verse});
        i += kStarSymbol.size();
        continue;
      }
      bool matched = false;
      for (std::size_t len = std::min(table.longest_token(), w.size() - i); len > 0; --len) {
        if (auto idx = table.index_of(w.substr(i, len))) {
          labels.push_back({*idx, word, verse});
          i += len;
          matched = true;
          break;
        }
      }
      if (!matched)
        throw std::invalid_argument("unknown token at '" + std::string(w.substr(i)) +
                                    "' in word '" + std::string(w) + "'");
    }
    ++word;
    pos = end;
  }
  return labels;
}

StateChain::StateChain(LabelSequence labels, std::size_t vocab_size)
    : labels_(std::move(labels)), vocab_size_(vocab_size) {
  if (labels_.empty()) throw std::invalid_argument("empty label sequence");
  const std::size_t num_states = 2 * labels_.size() + 1;
  tokens_.assign(num_states, kBlankToken);
  skip_.assign(num_states, 0);
  min_frames_ = labels_.size();
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    int tok = labels_[i].token;
    if (tok != kStarToken && (tok < 1 || static_cast<std::size_t>(tok) >= vocab_size_))
      throw std::invalid_argument("label " + std::to_string(i) + " has unknown token id " +
                                  std::to_string(tok));
    std::size_t s = 2 * i + 1;
    tokens_[s] = tok;
    if (i > 0) {
      bool repeat = labels_[i - 1].token == tok;
      skip_[s] = repeat ? 0 : 1;
      if (repeat) ++min_frames_;
    }
  }
}

StateChain build_state_chain(LabelSequence labels, const TokenTable& table) {
  return StateChain(std::move(labels), table.size());
}

FramePath viterbi_streaming(const EmissionMatrix& emissions, const StateChain& chain,
                            const StreamingOptions& options, TrellisCounter* counter) {
  if (options.buffer_rows == 0) throw std::invalid_argument("buffer_rows must be >= 1");
  check_alignable(emissions, chain);

  const std::size_t num_states = chain.size();
  const std::size_t num_frames = emissions.frames();
  const std::size_t rows = options.buffer_rows;

  // Working set: two score rows plus the backtrack buffer.
  const std::size_t working = 2 * num_states + rows * num_states;
  if (counter) counter->acquire(working);

  std::vector<double> row_a(num_states, kNegInf), row_b(num_states, kNegInf);
  std::vector<std::uint8_t> buffer(rows * num_states, 0);
  // Bulk backtrack storage (host side of the transfer); not part of the working set.
  std::vector<std::uint8_t> backtrack(num_frames * num_states, 0);

  double* prev = row_a.data();
  double* cur = row_b.data();

  auto flush = [&](std::size_t t) {
    if ((t + 1) % rows != 0 && t + 1 != num_frames) return;
    std::size_t first = t - t % rows;
    std::size_t count = t - first + 1;
    std::memcpy(backtrack.data() + first * num_states, buffer.data(), count * num_states);
  };

  auto step = [&](std::size_t t, std::size_t lo, std::size_t hi) {
    auto row = emissions.row(t);
    std::uint8_t* bt = buffer.data() + (t % rows) * num_states;
    for (std::size_t s = lo; s < hi; ++s) {
      double best;
      bt[s] = best_predecessor(prev, chain, s, &best);
      cur[s] = best + chain.logprob(row, s);
    }
  };

  {
    auto row = emissions.row(0);
    prev[0] = chain.logprob(row, 0);
    prev[1] = chain.logprob(row, 1);
    flush(0);
  }

  const unsigned threads =
      static_cast<unsigned>(std::clamp<std::size_t>(options.threads, 1, num_states));
  if (threads == 1) {
    for (std::size_t t = 1; t < num_frames; ++t) {
      step(t, 0, num_states);
      flush(t);
      std::swap(prev, cur);
    }
  } else {
    std::size_t frame = 1;
    auto on_frame_done = [&]() noexcept {
      flush(frame);
      std::swap(prev, cur);
      ++frame;
    };
    std::barrier sync(static_cast<std::ptrdiff_t>(threads), on_frame_done);
    auto lane = [&](unsigned id) {
      std::size_t lo = num_states * id / threads;
      std::size_t hi = num_states * (id + 1) / threads;
      for (std::size_t t = 1; t < num_frames; ++t) {
        step(t, lo, hi);
        sync.arrive_and_wait();
      }
    };
    std::vector<std::jthread> workers;
    for (unsigned id = 1; id < threads; ++id) workers.emplace_back(lane, id);
    lane(0);
  }

  FramePath path;
  path.states.resize(num_frames);
  std::size_t s = pick_terminal(prev[num_states - 1], prev[num_states - 2], num_states);
  path.log_prob = prev[s];
  if (counter) counter->release(working);

  for (std::size_t t = num_frames - 1; t > 0; --t) {
    path.states[t] = static_cast<std::int32_t>(s);
    s -= backtrack[t * num_states + s];
  }
  path.states[0] = static_cast<std::int32_t>(s);
  return path;
}

FramePath viterbi_full(const EmissionMatrix& emissions, const StateChain& chain,
                       TrellisCounter* counter) {
  check_alignable(emissions, chain);
  const std::size_t num_states = chain.size();
  const std::size_t num_frames = emissions.frames();
  if (counter) counter->acquire(num_frames * num_states);

  std::vector<double> alpha(num_frames * num_states, kNegInf);
  auto at = [&](std::size_t t, std::size_t s) -> double& { return alpha[t * num_states + s]; };

  at(0, 0) = chain.logprob(emissions.row(0), 0);
  at(0, 1) = chain.logprob(emissions.row(0), 1);
  for (std::size_t t = 1; t < num_frames; ++t) {
    auto row = emissions.row(t);
    for (std::size_t s = 0; s < num_states; ++s) {
      double best = at(t - 1, s);
      if (s >= 1) best = std::max(best, at(t - 1, s - 1));
      if (chain.can_skip_into(s)) best = std::max(best, at(t - 1, s - 2));
      at(t, s) = best + chain.logprob(row, s);
    }
  }

  FramePath path;
  path.states.resize(num_frames);
  std::size_t s = pick_terminal(at(num_frames - 1, num_states - 1),
                                at(num_frames - 1, num_states - 2), num_states);
  path.log_prob = at(num_frames - 1, s);
  for (std::size_t t = num_frames - 1; t > 0; --t) {
    path.states[t] = static_cast<std::int32_t>(s);
    std::size_t lowest = chain.can_skip_into(s) ? s - 2 : (s >= 1 ? s - 1 : s);
    std::size_t pick = lowest;
    for (std::size_t p = lowest + 1; p <= s; ++p) {
      if (at(t - 1, p) > at(t - 1, pick)) pick = p;
    }
    s = pick;
  }
  path.states[0] = static_cast<std::int32_t>(s);
  if (counter) counter->release(num_frames * num_states);
  return path;
}

void check_path(const FramePath& path, const StateChain& chain) {
  const auto& st = path.states;
  const auto num_states = static_cast<std::int32_t>(chain.size());
  if (st.empty()) throw std::invalid_argument("empty path");
  for (std::size_t t = 0; t < st.size(); ++t) {
    if (st[t] < 0 || st[t] >= num_states)
      throw std::invalid_argument("state out of range at frame " + std::to_string(t));
  }
  if (st.front() > 1) throw std::invalid_argument("path must start in state 0 or 1");
  if (st.back() < num_states - 2) throw std::invalid_argument("path must end in one of the last two states");
  for (std::size_t t = 1; t < st.size(); ++t) {
    int step = st[t] - st[t - 1];
    if (step < 0 || step > 2)
      throw std::invalid_argument("illegal step " + std::to_string(step) + " at frame " +
                                  std::to_string(t));
    if (step == 2 && !chain.can_skip_into(static_cast<std::size_t>(st[t])))
      throw std::invalid_argument("illegal skip into state " + std::to_string(st[t]) +
                                  " at frame " + std::to_string(t));
  }
}

double path_log_prob(const EmissionMatrix& emissions, const FramePath& path,
                     const StateChain& chain) {
  double total = 0.0;
  for (std::size_t t = 0; t < path.states.size(); ++t)
    total += chain.logprob(emissions.row(t), static_cast<std::size_t>(path.states[t]));
  return total;
}

LabelSequence collapse(const FramePath& path, const StateChain& chain) {
  LabelSequence out;
  for (std::size_t t = 0; t < path.states.size(); ++t) {
    auto s = static_cast<std::size_t>(path.states[t]);
    if (chain.is_blank(s)) continue;
    if (t > 0 && path.states[t - 1] == path.states[t]) continue;
    out.push_back(chain.label_at(s));
  }
  return out;
}

SpanLevel parse_span_level(std::string_view name) {
  if (name == "token") return SpanLevel::kToken;
  if (name == "word") return SpanLevel::kWord;
  if (name == "verse") return SpanLevel::kVerse;
  throw std::invalid_argument("unknown span level '" + std::string(name) + "'");
}

std::string_view span_level_name(SpanLevel level) {
  switch (level) {
    case SpanLevel::kToken: return "token";
    case SpanLevel::kWord: return "word";
    case SpanLevel::kVerse: return "verse";
  }
  return "token";
}

SpanSet extract_spans(const FramePath& path, const StateChain& chain,
                      const EmissionMatrix& emissions, SpanLevel level) {
  check_path(path, chain);
  const std::size_t num_frames = path.states.size();
  const auto& labels = chain.labels();

  SpanSet spans;
  spans.tokens.resize(labels.size());
  std::vector<double> sums(labels.size(), 0.0);
  for (std::size_t t = 0; t < num_frames; ++t) {
    auto s = static_cast<std::size_t>(path.states[t]);
    if (chain.is_blank(s)) continue;
    std::size_t k = s / 2;
    TokenSpan& span = spans.tokens[k];
    if (t == 0 || path.states[t - 1] != path.states[t]) {
      span.label = k;
      span.token = labels[k].token;
      span.star = labels[k].is_star();
      span.first_frame = t;
    }
    span.last_frame = t;
    sums[k] += chain.logprob(emissions.row(t), s);
  }
  for (std::size_t k = 0; k < labels.size(); ++k) {
    auto& span = spans.tokens[k];
    span.score = sums[k] / static_cast<double>(span.last_frame - span.first_frame + 1);
  }

  auto group_of = [&](std::size_t k) {
    switch (level) {
      case SpanLevel::kToken: return static_cast<int>(k);
      case SpanLevel::kWord: return labels[k].word;
      case SpanLevel::kVerse: return labels[k].verse;
    }
    return static_cast<int>(k);
  };

  for (std::size_t k = 0; k < labels.size();) {
    std::size_t last = k;
    while (last + 1 < labels.size() && group_of(last + 1) == group_of(k)) ++last;
    SegmentSpan seg;
    seg.group = group_of(k);
    seg.verse = labels[k].verse;
    seg.first_label = k;
    seg.last_label = last;
    seg.star = true;
    double sum = 0.0;
    std::size_t frames = 0;
    for (std::size_t i = k; i <= last; ++i) {
      const auto& tok = spans.tokens[i];
      if (tok.star) continue;
      seg.star = false;
      sum += sums[i];
      frames += tok.last_frame - tok.first_frame + 1;
    }
    seg.score = frames > 0 ? sum / static_cast<double>(frames) : 0.0;
    spans.segments.push_back(seg);
    k = last + 1;
  }

  auto& segs = spans.segments;
  segs.front().begin = 0;
  for (std::size_t g = 0; g + 1 < segs.size(); ++g) {
    std::size_t gap_begin = spans.tokens[segs[g].last_label].last_frame + 1;
    std::size_t gap_end = spans.tokens[segs[g + 1].first_label].first_frame;
    std::size_t boundary = gap_begin + (gap_end - gap_begin) / 2;
    segs[g].end = boundary;
    segs[g + 1].begin = boundary;
  }
  segs.back().end = num_frames;
  return spans;
}

}  // namespace longalign
