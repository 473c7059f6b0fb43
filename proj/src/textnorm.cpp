// src/textnorm.cpp

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

#include "longalign/textnorm.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <fstream>
#include <regex>
#include <stdexcept>
#include <unordered_map>

#include "longalign/error.hpp"
#include "longalign/trellis.hpp"

namespace longalign {

namespace {

void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<uint8_t*>(buf), len, U8_MAX_LENGTH, c, error);
  if (!error) out.append(buf, static_cast<std::size_t>(len));
}

// Decodes one code point at byte offset `i`, advancing it. Negative on error.
UChar32 next_code_point(std::string_view s, std::size_t& i) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  auto pos = static_cast<int32_t>(i);
  UChar32 c;
  U8_NEXT(p, pos, static_cast<int32_t>(s.size()), c);
  i = static_cast<std::size_t>(pos);
  return c;
}

void require_utf8(std::string_view text) {
  for (std::size_t i = 0; i < text.size();) {
    if (next_code_point(text, i) < 0)
      throw std::invalid_argument("invalid UTF-8 near byte " + std::to_string(i));
  }
}

std::string nfkc_lower(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFKC unavailable");
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString n = nfkc->normalize(u, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFKC normalization failed");
  n.toLower(icu::Locale::getRoot());
  std::string out;
  n.toUTF8String(out);
  return out;
}

std::string strip_html(const std::string& text) {
  static const std::regex tag(R"(</?[a-z][a-z0-9]*(\s[^<>]*)?/?>)");
  static const std::regex entity(R"(&(#[0-9]+|#x[0-9a-f]+|[a-z][a-z0-9]*);)");
  static const std::regex bare_entity(R"((^|[^a-z])(nbsp|amp|lt|gt|quot|apos);)");
  std::string out = std::regex_replace(text, tag, " ");
  out = std::regex_replace(out, entity, " ");
  out = std::regex_replace(out, bare_entity, "$1 ");
  return out;
}

bool is_letter(UChar32 c) { return c >= 0 && u_isalpha(c); }

// Punctuation and whitespace become spaces, format characters vanish, an
// apostrophe-like quote between two letters becomes "'". Then whitespace runs
// collapse and the ends are trimmed.
std::string scrub(std::string_view text) {
  std::vector<UChar32> cps;
  for (std::size_t i = 0; i < text.size();) cps.push_back(next_code_point(text, i));

  std::string out;
  bool pending_space = false;
  for (std::size_t k = 0; k < cps.size(); ++k) {
    UChar32 c = cps[k];
    bool space = false;
    if (c == '\'') {
      // kept
    } else if (c == 0x2019 || c == 0x02bc) {
      bool inner = k > 0 && k + 1 < cps.size() && is_letter(cps[k - 1]) && is_letter(cps[k + 1]);
      if (inner) {
        c = '\'';
      } else {
        space = true;
      }
    } else if (u_isUWhiteSpace(c) || u_iscntrl(c) || u_ispunct(c)) {
      space = c != 0x00ad && u_charType(c) != U_FORMAT_CHAR;
      if (!space) continue;
    } else if (u_charType(c) == U_FORMAT_CHAR) {
      continue;
    }
    if (space) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    append_utf8(out, c);
  }
  return out;
}

std::string normalize_once(std::string_view text) { return scrub(strip_html(nfkc_lower(text))); }

bool is_bracket(char c) {
  return c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}';
}

std::string collapse_spaces(std::string_view text) {
  std::string out;
  bool pending = false;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

// Letters that survive NFD unchanged, mapped to [a-z].
const std::unordered_map<UChar32, std::string_view>& latin_fallback() {
  static const std::unordered_map<UChar32, std::string_view> table = {
      {0x00df, "ss"}, {0x00e6, "ae"}, {0x0153, "oe"}, {0x00f8, "o"},  {0x0111, "d"},
      {0x00f0, "d"},  {0x00fe, "th"}, {0x0142, "l"},  {0x0131, "i"},  {0x014b, "ng"},
      {0x0127, "h"},  {0x0167, "t"},  {0x0138, "k"},  {0x017f, "s"},  {0x0192, "f"},
      {0x025b, "e"},  {0x0254, "o"},  {0x0259, "e"},  {0x01dd, "e"},  {0x0283, "sh"},
      {0x0292, "zh"}, {0x0272, "ny"}, {0x0253, "b"},  {0x0257, "d"},  {0x0199, "k"},
      {0x01b4, "y"},  {0x0263, "g"},  {0x028b, "v"},  {0x01b2, "v"},  {0x0269, "i"},
      {0x028a, "u"},  {0x0268, "i"},  {0x0289, "u"},  {0x0180, "b"},  {0x01e5, "g"},
      {0x0240, "z"},  {0x0251, "a"},  {0x0261, "g"},  {0x0294, "'"},  {0x0295, "'"},
      {0x02bc, "'"},  {0x02bb, "'"},  {0x02be, "'"},  {0x02bf, "'"},  {0x2019, "'"},
      {0xa78c, "'"},  {0x0248, "j"},  {0x0266, "h"},  {0x0256, "d"},  {0x0273, "n"},
  };
  return table;
}

// Appends the builtin romanization of one code point. Returns false if it has
// no mapping.
bool romanize_code_point(UChar32 c, std::string& out) {
  if ((c >= 'a' && c <= 'z') || c == '\'') {
    out.push_back(static_cast<char>(c));
    return true;
  }
  if (c >= 'A' && c <= 'Z') {
    out.push_back(static_cast<char>(c - 'A' + 'a'));
    return true;
  }
  if (c == ' ' || u_isUWhiteSpace(c)) {
    out.push_back(' ');
    return true;
  }
  UChar32 lower = u_tolower(c);
  const auto& fallback = latin_fallback();
  if (auto it = fallback.find(lower); it != fallback.end()) {
    out.append(it->second);
    return true;
  }

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkd = icu::Normalizer2::getNFKDInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFKD unavailable");
  icu::UnicodeString decomposed = nfkd->normalize(icu::UnicodeString(lower), status);
  if (U_FAILURE(status)) return false;

  std::string piece;
  bool any = false;
  for (int32_t i = 0; i < decomposed.length();) {
    UChar32 d = decomposed.char32At(i);
    i += U16_LENGTH(d);
    int8_t type = u_charType(d);
    if (type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK ||
        type == U_ENCLOSING_MARK)
      continue;
    d = u_tolower(d);
    if ((d >= 'a' && d <= 'z') || d == '\'') {
      piece.push_back(static_cast<char>(d));
      any = true;
    } else if (auto it = fallback.find(d); it != fallback.end()) {
      piece.append(it->second);
      any = true;
    } else {
      return false;
    }
  }
  if (!any) return false;
  out.append(piece);
  return true;
}

void romanize_builtin(std::string_view text, std::string& out, std::size_t& dropped) {
  for (std::size_t i = 0; i < text.size();) {
    if (text.substr(i).starts_with(kStarSymbol)) {
      out.append(kStarSymbol);
      i += kStarSymbol.size();
      continue;
    }
    std::size_t before = i;
    UChar32 c = next_code_point(text, i);
    if (c < 0) throw std::invalid_argument("invalid UTF-8 near byte " + std::to_string(before));
    if (!romanize_code_point(c, out)) ++dropped;
  }
}

}  // namespace

NormalizedText normalize(std::string_view text) {
  require_utf8(text);
  std::string current = normalize_once(text);
  for (int pass = 0; pass < 3; ++pass) {
    std::string next = normalize_once(current);
    if (next == current) break;
    current = std::move(next);
  }
  NormalizedText out;
  out.text = std::move(current);
  out.word_verse.assign(split_words(out.text).size(), 0);
  return out;
}

NormalizedText normalize_verses(std::span<const std::string> verses) {
  NormalizedText out;
  for (std::size_t v = 0; v < verses.size(); ++v) {
    NormalizedText one = normalize(verses[v]);
    if (one.text.empty()) continue;
    if (!out.text.empty()) out.text.push_back(' ');
    out.text += one.text;
    out.word_verse.insert(out.word_verse.end(), one.word_verse.size(), static_cast<int>(v));
  }
  return out;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos >= text.size()) break;
    std::size_t end = text.find(' ', pos);
    if (end == std::string_view::npos) end = text.size();
    words.emplace_back(text.substr(pos, end - pos));
    pos = end;
  }
  return words;
}

double bracket_rate(std::span<const std::string> verses) {
  if (verses.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& v : verses) {
    if (std::any_of(v.begin(), v.end(), is_bracket)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(verses.size());
}

std::string strip_brackets(std::string_view text) {
  // Pair up brackets first; anything left on the stack is unmatched.
  constexpr std::size_t kUnmatched = std::string_view::npos;
  std::vector<std::size_t> match(text.size(), kUnmatched);
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '(' || c == '[' || c == '{') {
      open.push_back(i);
    } else if ((c == ')' || c == ']' || c == '}') && !open.empty()) {
      match[open.back()] = i;
      match[i] = open.back();
      open.pop_back();
    }
  }

  std::string kept;
  kept.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (!is_bracket(text[i])) {
      kept.push_back(text[i]);
    } else if (match[i] != kUnmatched && match[i] > i) {
      i = match[i];  // outermost pair: drop it with its contents
    }
  }
  return collapse_spaces(kept);
}

NormalizedText starify(const NormalizedText& input) {
  NormalizedText out;
  out.text = std::string(kStarSymbol);
  out.word_verse.push_back(-1);
  std::size_t star = 1;

  auto words = split_words(input.text);
  for (std::size_t w = 0; w < words.size(); ++w) {
    const std::string& word = words[w];
    std::string rewritten;
    std::string run;
    auto flush_run = [&] {
      if (run.empty()) return;
      rewritten.append(kStarSymbol);
      out.digits[star++] = run;
      run.clear();
    };
    for (std::size_t i = 0; i < word.size();) {
      std::size_t start = i;
      UChar32 c = next_code_point(word, i);
      if (c >= 0 && u_isdigit(c)) {
        run.append(word, start, i - start);
      } else {
        flush_run();
        rewritten.append(word, start, i - start);
      }
    }
    flush_run();
    out.text.push_back(' ');
    out.text += rewritten;
    out.word_verse.push_back(w < input.word_verse.size() ? input.word_verse[w] : 0);
  }
  return out;
}

NormalizedText starify(std::string_view normalized) {
  NormalizedText in;
  in.text = std::string(normalized);
  in.word_verse.assign(split_words(in.text).size(), 0);
  return starify(in);
}

std::size_t count_stars(std::string_view text) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(kStarSymbol); pos != std::string_view::npos;
       pos = text.find(kStarSymbol, pos + kStarSymbol.size()))
    ++n;
  return n;
}

std::string destarify(std::string_view text, const std::map<std::size_t, std::string>& digits,
                      std::size_t first_star) {
  std::string out;
  std::size_t star = first_star;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t hit = text.find(kStarSymbol, pos);
    if (hit == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, hit - pos));
    if (auto it = digits.find(star); it != digits.end()) out += it->second;
    ++star;
    pos = hit + kStarSymbol.size();
  }
  return collapse_spaces(out);
}

std::vector<std::string> destarify(std::span<const std::string> span_texts,
                                   const std::map<std::size_t, std::string>& digits) {
  std::vector<std::string> out;
  out.reserve(span_texts.size());
  std::size_t star = 0;
  for (const auto& text : span_texts) {
    out.push_back(destarify(text, digits, star));
    star += count_stars(text);
  }
  return out;
}

RomanizationTable RomanizationTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open romanization table " + path.string());
  std::map<std::string, std::string> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto where = path.string() + ":" + std::to_string(lineno) + ": ";
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError(where + "expected source<TAB>replacement");
    if (tab == 0) throw FormatError(where + "empty source grapheme");
    if (line.find('\t', tab + 1) != std::string::npos) throw FormatError(where + "too many fields");
    try {
      require_utf8(line);
    } catch (const std::invalid_argument& e) {
      throw FormatError(where + e.what());
    }
    entries[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return from_entries(std::move(entries));
}

RomanizationTable RomanizationTable::from_entries(std::map<std::string, std::string> entries) {
  RomanizationTable table;
  for (const auto& [src, _] : entries) {
    if (src.empty()) throw FormatError("empty source grapheme");
    table.longest_ = std::max(table.longest_, src.size());
  }
  table.entries_ = std::move(entries);
  return table;
}

std::size_t RomanizationTable::match(std::string_view text, std::size_t pos,
                                     const std::string** replacement) const {
  std::size_t max_len = std::min(longest_, text.size() - pos);
  for (std::size_t len = max_len; len > 0; --len) {
    auto it = entries_.find(std::string(text.substr(pos, len)));
    if (it != entries_.end()) {
      *replacement = &it->second;
      return len;
    }
  }
  return 0;
}

RomanizeResult romanize(std::string_view text, const RomanizationTable* table) {
  require_utf8(text);
  RomanizeResult result;
  std::string raw;
  if (table == nullptr) {
    romanize_builtin(text, raw, result.dropped);
  } else {
    for (std::size_t i = 0; i < text.size();) {
      if (text.substr(i).starts_with(kStarSymbol)) {
        raw.append(kStarSymbol);
        i += kStarSymbol.size();
        continue;
      }
      const std::string* replacement = nullptr;
      if (std::size_t len = table->match(text, i, &replacement)) {
        romanize_builtin(*replacement, raw, result.dropped);
        i += len;
        continue;
      }
      std::size_t start = i;
      next_code_point(text, i);
      romanize_builtin(text.substr(start, i - start), raw, result.dropped);
    }
  }
  result.text = collapse_spaces(raw);
  return result;
}

Romanizer Romanizer::from_scheme(std::string_view scheme) {
  Romanizer r;
  if (scheme == "builtin") return r;
  if (scheme.starts_with("table:") && scheme.size() > 6) {
    r.scheme_ = std::string(scheme);
    r.table_ = std::make_shared<const RomanizationTable>(
        RomanizationTable::load(std::string(scheme.substr(6))));
    return r;
  }
  throw std::invalid_argument("unknown romanization scheme '" + std::string(scheme) +
                              "' (expected builtin or table:<path>)");
}

}  // namespace longalign
