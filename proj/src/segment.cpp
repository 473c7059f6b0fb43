// src/segment.cpp

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

#include "longalign/segment.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "longalign/random.hpp"

namespace longalign {

SegmentClass parse_segment_class(std::string_view name) {
  if (name == "speech") return SegmentClass::kSpeech;
  if (name == "music") return SegmentClass::kMusic;
  if (name == "noise") return SegmentClass::kNoise;
  if (name == "silence" || name == "noEnergy") return SegmentClass::kSilence;
  throw std::invalid_argument("unknown segment class '" + std::string(name) + "'");
}

std::string_view segment_class_name(SegmentClass c) {
  switch (c) {
    case SegmentClass::kSpeech: return "speech";
    case SegmentClass::kMusic: return "music";
    case SegmentClass::kNoise: return "noise";
    case SegmentClass::kSilence: return "silence";
  }
  return "speech";
}

std::vector<Interval> join_segments(std::span<const LabeledSegment> segments,
                                    double max_gap_fraction) {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!(s.end_s > s.start_s))
      throw std::invalid_argument("segment " + std::to_string(i) + " has end <= start");
    if (i > 0 && s.start_s < segments[i - 1].end_s)
      throw std::invalid_argument("segment " + std::to_string(i) +
                                  " overlaps or precedes its predecessor");
  }

  std::vector<Interval> out;
  bool open = false;
  Interval run;
  for (const auto& s : segments) {
    if (s.label != SegmentClass::kSpeech) continue;
    if (!open) {
      run = {s.start_s, s.end_s};
      open = true;
      continue;
    }
    double gap = s.start_s - run.end_s;
    double total = run.duration() + gap + (s.end_s - s.start_s);
    if (gap <= max_gap_fraction * total) {
      run.end_s = s.end_s;
    } else {
      out.push_back(run);
      run = {s.start_s, s.end_s};
    }
  }
  if (open) out.push_back(run);
  return out;
}

std::vector<Interval> partition_sample(const Interval& interval, std::uint64_t seed, double min_s,
                                       double max_s) {
  if (!(min_s > 0.0) || !(min_s < max_s))
    throw std::invalid_argument("partition bounds need 0 < min < max");
  if (!(interval.duration() > 0.0)) throw std::invalid_argument("interval must have positive length");

  std::mt19937_64 rng(mix_seed(seed, 0x5e9));
  std::vector<Interval> pieces;
  double pos = interval.start_s;
  double remaining = interval.duration();
  constexpr double kSlack = 1e-9;  // absorbs rounding in end - pos
  while (remaining >= min_s - kSlack) {
    double length;
    if (remaining <= max_s) {
      length = uniform_real(rng, min_s, remaining);
      if (remaining - length < min_s) length = remaining;
    } else {
      length = uniform_real(rng, min_s, max_s);
      if (remaining - length < min_s) {
        // Leave exactly min_s behind when that keeps this piece in bounds.
        double shortened = remaining - min_s;
        if (shortened >= min_s && shortened <= max_s) length = shortened;
      }
    }
    double end = (length == remaining) ? interval.end_s : pos + length;
    pieces.push_back({pos, end});
    pos = end;
    remaining = interval.end_s - pos;
  }
  return pieces;
}

}  // namespace longalign
