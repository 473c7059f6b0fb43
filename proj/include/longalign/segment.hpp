// include/longalign/segment.hpp

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

// Sample construction for unlabeled audio from speech/music/noise/silence
// segment labels.

#ifndef LONGALIGN_SEGMENT_HPP_
#define LONGALIGN_SEGMENT_HPP_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace longalign {

enum class SegmentClass { kSpeech, kMusic, kNoise, kSilence };

SegmentClass parse_segment_class(std::string_view name);
std::string_view segment_class_name(SegmentClass c);

struct LabeledSegment {
  double start_s = 0.0;
  double end_s = 0.0;
  SegmentClass label = SegmentClass::kSpeech;
};

struct Interval {
  double start_s = 0.0;
  double end_s = 0.0;
  double duration() const { return end_s - start_s; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

inline constexpr double kMaxGapFraction = 0.20;
inline constexpr double kMinSampleSeconds = 5.5;
inline constexpr double kMaxSampleSeconds = 30.0;

/// Merges speech runs left to right: the run built so far absorbs the next
/// speech segment iff the non-speech gap between them is at most
/// `max_gap_fraction` of (run + gap + next). Non-speech that is not absorbed
/// is discarded. Throws std::invalid_argument on unordered, overlapping or
/// empty segments.
std::vector<Interval> join_segments(std::span<const LabeledSegment> segments,
                                    double max_gap_fraction = kMaxGapFraction);

/// Cuts an interval into pieces with lengths in [min_s, max_s], drawn
/// uniformly subject to the remainder staying splittable. Intervals shorter
/// than min_s yield nothing. Deterministic per seed.
std::vector<Interval> partition_sample(const Interval& interval, std::uint64_t seed,
                                       double min_s = kMinSampleSeconds,
                                       double max_s = kMaxSampleSeconds);

}  // namespace longalign

#endif  // LONGALIGN_SEGMENT_HPP_
