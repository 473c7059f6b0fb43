// src/emissions.cpp

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

#include "longalign/emissions.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>
#include <stdexcept>

#include "longalign/error.hpp"
#include "longalign/random.hpp"

namespace longalign {

namespace {

constexpr std::array<char, 4> kMagic = {'C', 'T', 'C', 'E'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 4 + 4;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

bool valid_logprob(float v) { return v <= 0.0f || (std::isinf(v) && v < 0.0f); }

bool valid_token(std::string_view tok) {
  if (tok.empty()) return false;
  return std::all_of(tok.begin(), tok.end(),
                     [](char c) { return (c >= 'a' && c <= 'z') || c == '\''; });
}

}  // namespace

EmissionMatrix::EmissionMatrix(std::size_t frames, std::size_t vocab_size, float stride_ms,
                               std::vector<float> logprobs)
    : frames_(frames), vocab_size_(vocab_size), stride_ms_(stride_ms),
      logprobs_(std::move(logprobs)) {
  if (frames_ == 0) throw std::invalid_argument("empty emission matrix");
  if (vocab_size_ < 2) throw std::invalid_argument("vocab size must be >= 2 (blank + label)");
  if (!(stride_ms_ > 0.0f) || !std::isfinite(stride_ms_))
    throw std::invalid_argument("stride_ms must be positive and finite");
  if (logprobs_.size() != frames_ * vocab_size_)
    throw std::invalid_argument("emission payload does not match T x V");
  for (std::size_t i = 0; i < logprobs_.size(); ++i) {
    if (!valid_logprob(logprobs_[i]))
      throw std::invalid_argument("invalid log-probability at frame " +
                                  std::to_string(i / vocab_size_) + ", token " +
                                  std::to_string(i % vocab_size_));
  }
}

TokenTable::TokenTable(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!valid_token(tokens_[i]))
      throw std::invalid_argument("token '" + tokens_[i] + "' is outside the alignment charset");
    for (std::size_t j = 0; j < i; ++j) {
      if (tokens_[j] == tokens_[i])
        throw std::invalid_argument("duplicate token '" + tokens_[i] + "'");
    }
    longest_ = std::max(longest_, tokens_[i].size());
  }
}

TokenTable TokenTable::alignment_charset() {
  std::vector<std::string> tokens;
  for (char c = 'a'; c <= 'z'; ++c) tokens.emplace_back(1, c);
  tokens.emplace_back("'");
  return TokenTable(std::move(tokens));
}

TokenTable TokenTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open token table " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw FormatError(path.string() + ":" + std::to_string(lineno) + ": empty token");
    tokens.push_back(line);
  }
  if (tokens.empty()) throw FormatError("token table " + path.string() + " is empty");
  try {
    return TokenTable(std::move(tokens));
  } catch (const std::invalid_argument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void TokenTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write token table " + path.string());
  for (const auto& tok : tokens_) out << tok << '\n';
}

const std::string& TokenTable::token(int index) const {
  if (index < 1 || static_cast<std::size_t>(index) > tokens_.size())
    throw std::out_of_range("token index " + std::to_string(index));
  return tokens_[static_cast<std::size_t>(index - 1)];
}

std::optional<int> TokenTable::index_of(std::string_view token) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i] == token) return static_cast<int>(i + 1);
  }
  return std::nullopt;
}

EmissionMatrix load_emissions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open emission file " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());

  if (bytes.size() < kHeaderBytes || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin()))
    throw FormatError(path.string() + ": malformed header (missing CTCE magic)");
  std::uint32_t version = get_u32(p + 4);
  if (version != kFormatVersion)
    throw FormatError(path.string() + ": unsupported format version " + std::to_string(version));
  std::uint32_t frames = get_u32(p + 8);
  std::uint32_t vocab = get_u32(p + 12);
  float stride = std::bit_cast<float>(get_u32(p + 16));
  if (frames == 0) throw FormatError(path.string() + ": empty emission matrix");
  if (vocab < 2) throw FormatError(path.string() + ": vocab size must be >= 2");

  std::uint64_t count = static_cast<std::uint64_t>(frames) * vocab;
  std::uint64_t expected = kHeaderBytes + count * 4;
  if (bytes.size() < expected) throw FormatError(path.string() + ": truncated payload");
  if (bytes.size() > expected) throw FormatError(path.string() + ": trailing bytes after payload");

  std::vector<float> values(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = std::bit_cast<float>(get_u32(p + kHeaderBytes + 4 * i));
  try {
    return EmissionMatrix(frames, vocab, stride, std::move(values));
  } catch (const std::invalid_argument& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_emissions(const EmissionMatrix& emissions, const std::filesystem::path& path) {
  if (emissions.frames() > std::numeric_limits<std::uint32_t>::max())
    throw std::invalid_argument("too many frames for the emission format");
  std::string out;
  out.reserve(kHeaderBytes + emissions.values().size() * 4);
  out.append(kMagic.begin(), kMagic.end());
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(emissions.frames()));
  put_u32(out, static_cast<std::uint32_t>(emissions.vocab_size()));
  put_u32(out, std::bit_cast<std::uint32_t>(emissions.stride_ms()));
  for (float v : emissions.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw FormatError("cannot write emission file " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw FormatError("short write to " + path.string());
}

EmissionMatrix synth_emissions(std::span<const int> true_path, std::size_t vocab_size,
                               float peak_logprob, std::uint64_t seed, std::size_t frame_offset,
                               float stride_ms) {
  if (true_path.empty()) throw std::invalid_argument("empty emission matrix");
  if (vocab_size < 2) throw std::invalid_argument("vocab size must be >= 2");
  if (!(peak_logprob <= 0.0f)) throw std::invalid_argument("peak_logprob must be <= 0");

  const double peak = std::exp(static_cast<double>(peak_logprob));
  const double rest = 1.0 - peak;
  std::vector<float> values(true_path.size() * vocab_size);
  std::vector<double> weights(vocab_size);

  for (std::size_t t = 0; t < true_path.size(); ++t) {
    int target = true_path[t];
    if (target < 0 || static_cast<std::size_t>(target) >= vocab_size)
      throw std::invalid_argument("path index " + std::to_string(target) + " at frame " +
                                  std::to_string(t) + " is out of range");
    std::mt19937_64 rng(mix_seed(seed, frame_offset + t));
    double total = 0.0;
    for (std::size_t v = 0; v < vocab_size; ++v) {
      weights[v] = (static_cast<int>(v) == target) ? 0.0 : 1.0 + unit_uniform(rng);
      total += weights[v];
    }
    float* row = values.data() + t * vocab_size;
    for (std::size_t v = 0; v < vocab_size; ++v) {
      if (static_cast<int>(v) == target) {
        row[v] = static_cast<float>(std::log(peak));
        continue;
      }
      double prob = rest * weights[v] / total;
      if (prob >= peak)
        throw std::invalid_argument("peak_logprob too low for the path token to dominate");
      row[v] = prob > 0.0 ? static_cast<float>(std::log(prob))
                          : -std::numeric_limits<float>::infinity();
    }
  }
  return EmissionMatrix(true_path.size(), vocab_size, stride_ms, std::move(values));
}

EmissionMatrix concat_chunks(std::span<const EmissionMatrix> chunks) {
  if (chunks.empty()) throw std::invalid_argument("no chunks to concatenate");
  const std::size_t vocab = chunks.front().vocab_size();
  const float stride = chunks.front().stride_ms();
  std::size_t frames = 0;
  for (const auto& chunk : chunks) {
    if (chunk.vocab_size() != vocab)
      throw std::invalid_argument("chunk vocab size mismatch (" + std::to_string(vocab) + " vs " +
                                  std::to_string(chunk.vocab_size()) + ")");
    if (chunk.stride_ms() != stride) throw std::invalid_argument("chunk stride mismatch");
    frames += chunk.frames();
  }
  std::vector<float> values;
  values.reserve(frames * vocab);
  for (const auto& chunk : chunks)
    values.insert(values.end(), chunk.values().begin(), chunk.values().end());
  return EmissionMatrix(frames, vocab, stride, std::move(values));
}

}  // namespace longalign
