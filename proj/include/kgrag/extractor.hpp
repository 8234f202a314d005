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
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kgrag/errors.hpp"
#include "kgrag/graph.hpp"
#include "kgrag/ingest.hpp"
#include "kgrag/layer.hpp"
#include "kgrag/normalizer.hpp"
#include "kgrag/strings.hpp"

namespace kgrag {

// Surface pattern: [subject layer] + trigger phrase + [object layer].
// Trigger phrases match case-insensitively as substrings of the text
// strictly between the two entity spans.
struct TriggerTemplate {
  Layer subject_layer;
  std::vector<std::string> trigger_phrases;
  Layer object_layer;
  RelationLabel relation;
};

struct CandidateTriplet {
  EntityId head = 0;
  RelationLabel relation;
  EntityId tail = 0;
  std::int64_t paper_count = 1;
  std::string source_sentence;
  Provenance provenance = Provenance::rule_based;
  bool review_flag = false;
};

// The six built-in templates, one per canonical relation type.
inline std::vector<TriggerTemplate> default_templates() {
  std::vector<TriggerTemplate> templates;
  auto add = [&](Layer subject, std::vector<std::string> phrases, Layer object, const char* rel) {
    templates.push_back({subject, std::move(phrases), object, RelationLabel::of(rel)});
  };
  add(Layer::treatment(), {"recommended for", "first-line", "effective in"}, Layer::syndrome(),
      "treats");
  add(Layer::treatment(), {"avoid", "contraindicated", "not recommended"}, Layer::gene(),
      "contraindicated_with");
  add(Layer::gene(), {"associated with", "linked to", "implicated in"}, Layer::syndrome(),
      "associated_with");
  add(Layer::diagnostic(), {"characteristic of", "consistent with", "seen in"}, Layer::syndrome(),
      "characteristic_of");
  add(Layer::gene(), {"encodes", "produces", "results in"}, Layer::other("Protein"), "encodes");
  add(Layer::gene(), {"expressed in", "detected in", "localised to"}, Layer::other("Anatomy"),
      "expressed_in");
  return templates;
}

// For every ordered pair of linked entities (first span before second)
// whose layers match a template and with a trigger phrase strictly between
// the spans, emits one candidate with paper_count = 1. Output order is pair
// position, then relation name.
inline std::vector<CandidateTriplet> match_templates(const KnowledgeGraph& graph,
                                                     std::string_view sentence,
                                                     std::span<const EntityLink> links,
                                                     std::span<const TriggerTemplate> templates) {
  std::vector<CandidateTriplet> candidates;
  std::set<std::tuple<std::size_t, std::size_t, std::string>> emitted;
  for (std::size_t i = 0; i < links.size(); ++i) {
    for (std::size_t j = i + 1; j < links.size(); ++j) {
      if (links[j].begin < links[i].end) continue;  // overlapping spans never pair
      const std::string between =
          fold_case(sentence.substr(links[i].end, links[j].begin - links[i].end));
      const Layer& first_layer = graph.entity(links[i].entity).layer;
      const Layer& second_layer = graph.entity(links[j].entity).layer;
      std::vector<const TriggerTemplate*> hits;
      for (const TriggerTemplate& tmpl : templates) {
        if (tmpl.subject_layer != first_layer || tmpl.object_layer != second_layer) continue;
        bool triggered = false;
        for (const std::string& phrase : tmpl.trigger_phrases)
          if (between.find(fold_case(phrase)) != std::string::npos) {
            triggered = true;
            break;
          }
        if (triggered) hits.push_back(&tmpl);
      }
      std::sort(hits.begin(), hits.end(), [](const TriggerTemplate* a, const TriggerTemplate* b) {
        return a->relation.name < b->relation.name;
      });
      for (const TriggerTemplate* tmpl : hits) {
        if (!emitted.insert({i, j, tmpl->relation.name}).second) continue;
        CandidateTriplet candidate;
        candidate.head = links[i].entity;
        candidate.relation = tmpl->relation;
        candidate.tail = links[j].entity;
        candidate.paper_count = 1;
        candidate.source_sentence = std::string(sentence);
        candidate.provenance = Provenance::rule_based;
        candidates.push_back(std::move(candidate));
      }
    }
  }
  return candidates;
}

// Same-(head, relation, tail) duplicates merge by summing counts. Then
// candidates sharing (head, tail) but differing in relation form a
// conflict group: only maximal-count members survive; ties all survive but
// are flagged for review. First-occurrence order is preserved.
inline std::vector<CandidateTriplet> resolve_conflicts(
    std::span<const CandidateTriplet> candidates) {
  std::vector<CandidateTriplet> merged;
  std::map<std::tuple<EntityId, std::string, EntityId>, std::size_t> by_key;
  for (const CandidateTriplet& candidate : candidates) {
    const auto key = std::tuple{candidate.head, candidate.relation.name, candidate.tail};
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      by_key.emplace(key, merged.size());
      merged.push_back(candidate);
    } else {
      merged[it->second].paper_count += candidate.paper_count;
      merged[it->second].review_flag |= candidate.review_flag;
    }
  }

  std::map<std::pair<EntityId, EntityId>, std::int64_t> group_max;
  std::map<std::pair<EntityId, EntityId>, std::size_t> group_size;
  for (const CandidateTriplet& candidate : merged) {
    const auto pair = std::pair{candidate.head, candidate.tail};
    auto [it, inserted] = group_max.try_emplace(pair, candidate.paper_count);
    if (!inserted) it->second = std::max(it->second, candidate.paper_count);
    ++group_size[pair];
  }
  std::map<std::pair<EntityId, EntityId>, std::size_t> winners;
  for (const CandidateTriplet& candidate : merged)
    if (candidate.paper_count == group_max[{candidate.head, candidate.tail}])
      ++winners[{candidate.head, candidate.tail}];

  std::vector<CandidateTriplet> resolved;
  for (CandidateTriplet& candidate : merged) {
    const auto pair = std::pair{candidate.head, candidate.tail};
    if (candidate.paper_count != group_max[pair]) continue;
    if (group_size[pair] > 1 && winners[pair] > 1) candidate.review_flag = true;
    resolved.push_back(std::move(candidate));
  }
  return resolved;
}

struct CommitReport {
  std::size_t inserted = 0;
  std::size_t merged = 0;
  std::size_t rejected = 0;
  std::vector<std::string> rejection_reasons;
};

// Inserts candidates into a build-phase graph; per-candidate failures are
// collected into the report rather than thrown.
inline CommitReport commit_candidates(KnowledgeGraph& graph,
                                      std::span<const CandidateTriplet> candidates) {
  if (graph.frozen())
    throw Error(ErrorCode::graph_frozen, "commit requires a build-phase graph");
  CommitReport report;
  for (const CandidateTriplet& candidate : candidates) {
    try {
      const auto outcome = graph.add_triplet(candidate.head, candidate.relation, candidate.tail,
                                             candidate.paper_count, candidate.provenance);
      if (outcome.merged)
        ++report.merged;
      else
        ++report.inserted;
    } catch (const Error& e) {
      ++report.rejected;
      report.rejection_reasons.push_back(e.what());
    }
  }
  return report;
}

// Sentence splitting on {. ! ?} with a guard list for common abbreviations.
inline std::vector<std::string> split_sentences(std::string_view text) {
  static const std::set<std::string> kAbbreviations = {
      "e.g", "i.e", "al", "etc", "vs", "cf", "fig", "figs", "dr", "prof", "st", "no", "approx",
      "ca", "resp"};
  std::vector<std::string> sentences;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (c == '.') {
      // Token immediately before the dot, allowing interior dots ("e.g").
      std::size_t b = i;
      while (b > start && (is_ascii_alnum(text[b - 1]) || text[b - 1] == '.')) --b;
      std::string word = fold_case(text.substr(b, i - b));
      while (!word.empty() && word.back() == '.') word.pop_back();
      if (kAbbreviations.count(word)) continue;
    }
    std::size_t j = i + 1;
    while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
    if (j < text.size() && !is_ascii_space(text[j])) continue;
    const std::string_view sentence = trim(text.substr(start, j - start));
    if (!sentence.empty()) sentences.emplace_back(sentence);
    start = j;
    i = j - 1;
  }
  const std::string_view rest = trim(text.substr(start));
  if (!rest.empty()) sentences.emplace_back(rest);
  return sentences;
}

// Template files: JSON array of {subject_layer, trigger_phrases,
// object_layer, relation}.
inline std::vector<TriggerTemplate> parse_templates(std::string_view text) {
  const nlohmann::json doc = detail::parse_json_array(text, "template");
  std::vector<TriggerTemplate> templates;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const nlohmann::json& obj = doc[i];
    if (!obj.is_object())
      throw Error(ErrorCode::malformed_json, detail::record_tag(i) + ": expected an object");
    TriggerTemplate tmpl;
    const std::string subject = detail::require_string(obj, "subject_layer", i);
    const std::string object = detail::require_string(obj, "object_layer", i);
    const auto subject_layer = Layer::parse(subject);
    if (!subject_layer)
      throw Error(ErrorCode::invalid_layer, detail::record_tag(i) + ": \"" + subject + "\"");
    const auto object_layer = Layer::parse(object);
    if (!object_layer)
      throw Error(ErrorCode::invalid_layer, detail::record_tag(i) + ": \"" + object + "\"");
    tmpl.subject_layer = *subject_layer;
    tmpl.object_layer = *object_layer;
    tmpl.relation = RelationLabel::of(detail::require_string(obj, "relation", i));
    auto it = obj.find("trigger_phrases");
    if (it == obj.end())
      throw Error(ErrorCode::missing_field, detail::record_tag(i) + ": \"trigger_phrases\"");
    if (!it->is_array() || it->empty())
      throw Error(ErrorCode::malformed_json,
                  detail::record_tag(i) + ": \"trigger_phrases\" must be a non-empty array");
    for (const nlohmann::json& phrase : *it) {
      if (!phrase.is_string() || trim(phrase.get<std::string>()).empty())
        throw Error(ErrorCode::malformed_json,
                    detail::record_tag(i) + ": trigger phrases must be non-empty strings");
      tmpl.trigger_phrases.push_back(phrase.get<std::string>());
    }
    templates.push_back(std::move(tmpl));
  }
  return templates;
}

struct ExternalCandidateResult {
  std::vector<CandidateTriplet> candidates;
  std::vector<UnresolvedEndpoint> unresolved;
};

// Candidates produced by an external extractor arrive in the same JSON
// shape as CandidateTriplet, endpoints by name or identifier; provenance
// defaults to "external_extractor" and "manual" is not accepted here.
inline ExternalCandidateResult parse_external_candidates(std::string_view text,
                                                         const KnowledgeGraph& graph) {
  const nlohmann::json doc = detail::parse_json_array(text, "candidate");
  ExternalCandidateResult result;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const nlohmann::json& obj = doc[i];
    if (!obj.is_object())
      throw Error(ErrorCode::malformed_json, detail::record_tag(i) + ": expected an object");
    CandidateTriplet candidate;
    const std::string head = detail::require_string(obj, "head", i);
    const std::string tail = detail::require_string(obj, "tail", i);
    candidate.relation = RelationLabel::of(detail::require_string(obj, "relation", i));
    candidate.paper_count = 1;
    if (auto it = obj.find("paper_count"); it != obj.end()) {
      if (!it->is_number_integer())
        throw Error(ErrorCode::malformed_json,
                    detail::record_tag(i) + ": \"paper_count\" must be an integer");
      candidate.paper_count = it->get<std::int64_t>();
      if (candidate.paper_count < 1)
        throw Error(ErrorCode::nonpositive_count,
                    detail::record_tag(i) + ": paper_count " +
                        std::to_string(candidate.paper_count));
    }
    if (auto it = obj.find("source_sentence"); it != obj.end() && it->is_string())
      candidate.source_sentence = it->get<std::string>();
    candidate.provenance = Provenance::external_extractor;
    if (auto it = obj.find("provenance"); it != obj.end()) {
      const auto provenance =
          it->is_string() ? parse_provenance(it->get<std::string>()) : std::nullopt;
      if (!provenance || *provenance == Provenance::manual)
        throw Error(ErrorCode::malformed_json,
                    detail::record_tag(i) + ": provenance must be rule_based or external_extractor");
      candidate.provenance = *provenance;
    }
    auto resolve = [&](const std::string& endpoint) -> std::optional<EntityId> {
      if (auto id = graph.resolve_name(endpoint)) return id;
      return graph.resolve_identifier(endpoint);
    };
    const auto head_id = resolve(head);
    const auto tail_id = resolve(tail);
    if (!head_id) result.unresolved.push_back({i, head, "head"});
    if (!tail_id) result.unresolved.push_back({i, tail, "tail"});
    if (!head_id || !tail_id) continue;
    candidate.head = *head_id;
    candidate.tail = *tail_id;
    result.candidates.push_back(std::move(candidate));
  }
  return result;
}

}  // namespace kgrag
