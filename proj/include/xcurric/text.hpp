// Copyright 2026 The xcurric Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// UTF-8 helpers and the whitespace/punctuation tokenizer shared by the
// criteria, metrics and filtering code.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace xcurric {

using TokenSeq = std::vector<std::string>;

namespace utf8 {

struct CodePoint {
  char32_t value;
  std::size_t length;  // bytes consumed
};

// Decodes the code point starting at `pos`. Malformed input yields U+FFFD and
// consumes a single byte so iteration always makes progress.
inline CodePoint decode(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  const std::size_t left = s.size() - pos;
  auto cont = [&](std::size_t i) {
    return i < left && (static_cast<unsigned char>(s[pos + i]) & 0xC0) == 0x80;
  };
  auto byte = [&](std::size_t i) {
    return static_cast<char32_t>(static_cast<unsigned char>(s[pos + i]) & 0x3F);
  };
  if (b0 < 0x80) return {b0, 1};
  if ((b0 & 0xE0) == 0xC0 && cont(1)) {
    char32_t cp = (static_cast<char32_t>(b0 & 0x1F) << 6) | byte(1);
    if (cp >= 0x80) return {cp, 2};
  } else if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    char32_t cp = (static_cast<char32_t>(b0 & 0x0F) << 12) | (byte(1) << 6) | byte(2);
    if (cp >= 0x800) return {cp, 3};
  } else if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    char32_t cp = (static_cast<char32_t>(b0 & 0x07) << 18) | (byte(1) << 12) |
                  (byte(2) << 6) | byte(3);
    if (cp >= 0x10000 && cp <= 0x10FFFF) return {cp, 4};
  }
  return {0xFFFD, 1};
}

inline void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Splits a string into its code points, each kept as its UTF-8 bytes.
inline std::vector<std::string_view> code_points(std::string_view s) {
  std::vector<std::string_view> out;
  out.reserve(s.size());
  for (std::size_t pos = 0; pos < s.size();) {
    auto cp = decode(s, pos);
    out.push_back(s.substr(pos, cp.length));
    pos += cp.length;
  }
  return out;
}

}  // namespace utf8

inline bool is_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// ASCII punctuation plus the common Unicode punctuation blocks, including the
// Indic danda marks.
inline bool is_punct(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  switch (cp) {
    case 0xA1: case 0xA7: case 0xAB: case 0xB6: case 0xB7: case 0xBB: case 0xBF:
    case 0x037E: case 0x0387: case 0x055D: case 0x0589: case 0x05BE: case 0x05C3:
    case 0x060C: case 0x061B: case 0x061F: case 0x06D4: case 0x0964: case 0x0965:
    case 0x0970: case 0x0DF4: case 0x0E4F: case 0x0E5A: case 0x0E5B:
      return true;
    default:
      return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
             (cp >= 0x3001 && cp <= 0x3003) || (cp >= 0x3008 && cp <= 0x3011) ||
             (cp >= 0x3014 && cp <= 0x301F) || (cp >= 0xFF01 && cp <= 0xFF0F) ||
             (cp >= 0xFF1A && cp <= 0xFF20) || (cp >= 0xFF3B && cp <= 0xFF40) ||
             (cp >= 0xFF5B && cp <= 0xFF65);
  }
}

// Maps decimal digits of the common scripts (Devanagari, Bengali, Gurmukhi,
// Gujarati, Oriya, Tamil, Telugu, Kannada, Malayalam, Arabic-Indic, full-width)
// to their ASCII value; returns -1 for anything else.
inline int digit_value(char32_t cp) {
  if (cp >= U'0' && cp <= U'9') return static_cast<int>(cp - U'0');
  static constexpr char32_t kZeros[] = {0x0660, 0x06F0, 0x0966, 0x09E6, 0x0A66,
                                        0x0AE6, 0x0B66, 0x0BE6, 0x0C66, 0x0CE6,
                                        0x0D66, 0xFF10};
  for (char32_t zero : kZeros) {
    if (cp >= zero && cp <= zero + 9) return static_cast<int>(cp - zero);
  }
  return -1;
}

inline std::string_view trim(std::string_view s) {
  std::size_t begin = 0;
  while (begin < s.size()) {
    auto cp = utf8::decode(s, begin);
    if (!is_space(cp.value)) break;
    begin += cp.length;
  }
  std::size_t end = begin;
  for (std::size_t pos = begin; pos < s.size();) {
    auto cp = utf8::decode(s, pos);
    pos += cp.length;
    if (!is_space(cp.value)) end = pos;
  }
  return s.substr(begin, end - begin);
}

// ASCII case folding; scripts without case pass through unchanged.
inline std::string fold_case(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline TokenSeq fold_case(const TokenSeq& tokens) {
  TokenSeq out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(fold_case(t));
  return out;
}

// Splits on Unicode whitespace, then peels leading and trailing punctuation
// off every word, one token per punctuation code point. Interior punctuation
// ("1,999", "don't") stays inside the word.
inline TokenSeq tokenize(std::string_view text) {
  TokenSeq tokens;
  std::vector<utf8::CodePoint> word;
  std::vector<std::size_t> offsets;

  auto flush = [&](std::size_t word_end) {
    if (word.empty()) return;
    std::size_t lo = 0;
    std::size_t hi = word.size();
    while (lo < hi && is_punct(word[lo].value)) ++lo;
    while (hi > lo && is_punct(word[hi - 1].value)) --hi;
    auto piece = [&](std::size_t a, std::size_t b) {
      std::size_t from = offsets[a];
      std::size_t to = b < word.size() ? offsets[b] : word_end;
      tokens.emplace_back(text.substr(from, to - from));
    };
    for (std::size_t i = 0; i < lo; ++i) piece(i, i + 1);
    if (lo < hi) piece(lo, hi);
    for (std::size_t i = hi; i < word.size(); ++i) piece(i, i + 1);
    word.clear();
    offsets.clear();
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    auto cp = utf8::decode(text, pos);
    if (is_space(cp.value)) {
      flush(pos);
    } else {
      word.push_back(cp);
      offsets.push_back(pos);
    }
    pos += cp.length;
  }
  flush(pos);
  return tokens;
}

inline std::string join(const TokenSeq& tokens, std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

}  // namespace xcurric
