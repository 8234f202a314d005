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

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kgrag/errors.hpp"
#include "kgrag/strings.hpp"

namespace kgrag {

// Classic two-row Levenshtein over bytes.
inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> curr(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 0; i < a.size(); ++i) {
    curr[0] = i + 1;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const std::size_t deletion = prev[j + 1] + 1;
      const std::size_t insertion = curr[j] + 1;
      const std::size_t substitution = prev[j] + (a[i] == b[j] ? 0 : 1);
      curr[j + 1] = std::min({deletion, insertion, substitution});
    }
    prev.swap(curr);
  }
  return prev[b.size()];
}

// Normalized edit similarity: 1 - levenshtein(fold(a), fold(b)) / max(|a|, |b|).
// Symmetric; 1.0 iff the folded strings are equal.
inline double fuzzy_score(std::string_view a, std::string_view b) {
  if (a.empty() || b.empty())
    throw Error(ErrorCode::empty_mention, "fuzzy_score requires non-empty strings");
  const std::string fa = fold_case(a);
  const std::string fb = fold_case(b);
  const std::size_t distance = levenshtein(fa, fb);
  const std::size_t longest = std::max(fa.size(), fb.size());
  return 1.0 - static_cast<double>(distance) / static_cast<double>(longest);
}

}  // namespace kgrag
