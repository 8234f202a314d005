// Copyright 2026 The kgrag Authors
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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kgrag {

inline bool is_ascii_alnum(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline char fold_char(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

// ASCII case folding; non-ASCII bytes pass through unchanged.
inline std::string fold_case(std::string_view s) {
  std::string out(s.size(), '\0');
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = fold_char(s[i]);
  return out;
}

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  while (b < s.size() && is_ascii_space(s[b])) ++b;
  std::size_t e = s.size();
  while (e > b && is_ascii_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

// Half-open byte span [begin, end) into the tokenized text.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Whitespace-delimited words with leading/trailing punctuation stripped.
// Interior punctuation is kept, so "Nav1.1" and "first-line" stay whole.
inline std::vector<TokenSpan> tokenize(std::string_view text) {
  std::vector<TokenSpan> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_ascii_space(text[i])) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !is_ascii_space(text[j])) ++j;
    std::size_t b = i;
    std::size_t e = j;
    while (b < e && !is_ascii_alnum(text[b])) ++b;
    while (e > b && !is_ascii_alnum(text[e - 1])) --e;
    if (b < e) tokens.push_back({b, e});
    i = j;
  }
  return tokens;
}

// Case-insensitive substring search (ASCII folding on both sides).
inline bool contains_ci(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return false;
  return fold_case(haystack).find(fold_case(needle)) != std::string::npos;
}

// Case-insensitive occurrence with word boundaries: the match may not be
// flanked by alphanumeric characters.
inline bool contains_word_ci(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return false;
  const std::string h = fold_case(haystack);
  const std::string n = fold_case(needle);
  std::size_t pos = 0;
  while ((pos = h.find(n, pos)) != std::string::npos) {
    const bool left_ok = pos == 0 || !is_ascii_alnum(h[pos - 1]);
    const std::size_t after = pos + n.size();
    const bool right_ok = after >= h.size() || !is_ascii_alnum(h[after]);
    if (left_ok && right_ok) return true;
    ++pos;
  }
  return false;
}

}  // namespace kgrag
