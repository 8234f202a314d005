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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kgrag/embedding.hpp"
#include "kgrag/errors.hpp"
#include "kgrag/fuzzy.hpp"
#include "kgrag/graph.hpp"
#include "kgrag/strings.hpp"

namespace kgrag {

struct NormalizerConfig {
  double fuzzy_threshold = 0.85;
  double semantic_threshold = 0.8;
  double link_confidence = 0.8;

  void validate() const {
    auto check = [](double v, const char* name) {
      if (!(v > 0.0 && v <= 1.0))
        throw Error(ErrorCode::invalid_config, std::string(name) + " must be in (0, 1]");
    };
    check(fuzzy_threshold, "fuzzy_threshold");
    check(semantic_threshold, "semantic_threshold");
    check(link_confidence, "link_confidence");
  }
};

enum class MatchStage { exact, alias, fuzzy, semantic, unresolved };

inline const char* match_stage_name(MatchStage stage) {
  switch (stage) {
    case MatchStage::exact: return "exact";
    case MatchStage::alias: return "alias";
    case MatchStage::fuzzy: return "fuzzy";
    case MatchStage::semantic: return "semantic";
    case MatchStage::unresolved: return "unresolved";
  }
  return "unresolved";
}

struct NormalizationResult {
  std::string mention;
  std::optional<EntityId> resolved;
  MatchStage stage = MatchStage::unresolved;
  double score = 0.0;
};

// Staged resolution: exact -> alias -> fuzzy string -> semantic embedding.
// The first stage clearing its threshold wins; exact and alias score 1.0.
// Ties within a stage break toward the case-folded canonical name.
inline NormalizationResult normalize_mention(std::string_view mention, const KnowledgeGraph& graph,
                                             const EmbeddingIndex* embeddings = nullptr,
                                             const NormalizerConfig& config = {}) {
  config.validate();
  const std::string_view trimmed = trim(mention);
  if (trimmed.empty()) throw Error(ErrorCode::empty_mention, "mention is empty after trimming");

  NormalizationResult result;
  result.mention = std::string(trimmed);

  const std::string folded = fold_case(trimmed);
  if (auto id = graph.resolve_name(trimmed)) {
    result.resolved = *id;
    result.stage =
        folded == fold_case(graph.entity(*id).canonical_name) ? MatchStage::exact : MatchStage::alias;
    result.score = 1.0;
    return result;
  }

  // Fuzzy: best normalized edit similarity over canonical names and aliases.
  double best_fuzzy = -1.0;
  std::string best_fuzzy_name;
  std::optional<EntityId> best_fuzzy_id;
  for (const auto& [id, entity] : graph.entities()) {
    double score = fuzzy_score(trimmed, entity.canonical_name);
    for (const std::string& alias : entity.aliases)
      score = std::max(score, fuzzy_score(trimmed, alias));
    const std::string folded_name = fold_case(entity.canonical_name);
    if (score > best_fuzzy || (score == best_fuzzy && folded_name < best_fuzzy_name)) {
      best_fuzzy = score;
      best_fuzzy_name = folded_name;
      best_fuzzy_id = id;
    }
  }
  if (best_fuzzy_id && best_fuzzy >= config.fuzzy_threshold) {
    result.resolved = best_fuzzy_id;
    result.stage = MatchStage::fuzzy;
    result.score = best_fuzzy;
    return result;
  }

  if (embeddings) {
    if (auto query = embeddings->embed_text(trimmed)) {
      double best_cos = -2.0;
      std::string best_name;
      std::optional<EntityId> best_id;
      for (const auto& [id, vec] : embeddings->vectors()) {
        const double score = cosine(*query, vec);
        const std::string folded_name = fold_case(graph.entity(id).canonical_name);
        if (score > best_cos || (score == best_cos && folded_name < best_name)) {
          best_cos = score;
          best_name = folded_name;
          best_id = id;
        }
      }
      if (best_id && best_cos >= config.semantic_threshold) {
        result.resolved = best_id;
        result.stage = MatchStage::semantic;
        result.score = std::clamp(best_cos, 0.0, 1.0);
        return result;
      }
    }
  }

  result.stage = MatchStage::unresolved;
  result.score = 0.0;
  return result;
}

struct EntityLink {
  EntityId entity = 0;
  std::size_t begin = 0;  // byte offsets into the linked text
  std::size_t end = 0;
  double score = 0.0;
  MatchStage stage = MatchStage::unresolved;
};

// Dictionary linking over the graph vocabulary: longest-match-first scan of
// token n-grams (n <= 6) against canonical names and aliases, case-folded.
// Matched spans never overlap and come back in text order.
inline std::vector<EntityLink> link_entities(std::string_view text, const KnowledgeGraph& graph,
                                             const NormalizerConfig& config = {}) {
  config.validate();
  constexpr std::size_t kMaxNgram = 6;
  std::vector<EntityLink> links;
  const std::vector<TokenSpan> tokens = tokenize(text);
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    const std::size_t longest = std::min(kMaxNgram, tokens.size() - i);
    for (std::size_t n = longest; n >= 1; --n) {
      std::string candidate;
      for (std::size_t k = 0; k < n; ++k) {
        if (k) candidate.push_back(' ');
        const TokenSpan& span = tokens[i + k];
        candidate.append(text.substr(span.begin, span.end - span.begin));
      }
      if (auto id = graph.resolve_name(candidate)) {
        EntityLink link;
        link.entity = *id;
        link.begin = tokens[i].begin;
        link.end = tokens[i + n - 1].end;
        link.stage = fold_case(candidate) == fold_case(graph.entity(*id).canonical_name)
                         ? MatchStage::exact
                         : MatchStage::alias;
        link.score = 1.0;
        if (link.score >= config.link_confidence) links.push_back(link);
        i += n;
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return links;
}

// Alias tables are JSON objects {alias: canonical_name}; entries come back
// in key order.
inline std::vector<std::pair<std::string, std::string>> parse_alias_table(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::malformed_json, e.what());
  }
  if (!doc.is_object())
    throw Error(ErrorCode::malformed_json, "alias table must be a JSON object");
  std::vector<std::pair<std::string, std::string>> table;
  for (const auto& [alias, canonical] : doc.items()) {
    if (!canonical.is_string())
      throw Error(ErrorCode::malformed_json, "alias table values must be strings: " + alias);
    table.emplace_back(alias, canonical.get<std::string>());
  }
  return table;
}

// Attaches each alias to the entity owning the canonical name. Build-phase
// only; unknown canonical names and collisions throw.
inline std::size_t apply_alias_table(
    KnowledgeGraph& graph, std::span<const std::pair<std::string, std::string>> table) {
  std::size_t applied = 0;
  for (const auto& [alias, canonical] : table) {
    const auto id = graph.resolve_name(canonical);
    if (!id) throw Error(ErrorCode::unknown_entity, "alias target not in graph: " + canonical);
    graph.add_alias(*id, alias);
    ++applied;
  }
  return applied;
}

}  // namespace kgrag
