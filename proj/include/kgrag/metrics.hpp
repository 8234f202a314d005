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
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kgrag/errors.hpp"
#include "kgrag/graph.hpp"
#include "kgrag/ingest.hpp"
#include "kgrag/strings.hpp"

namespace kgrag {

struct McqItem {
  std::string id;
  std::string question;
  std::vector<std::pair<std::string, std::string>> options;  // label -> text, label order
  std::string gold_label;
};

// First standalone option letter (word-bounded, case-sensitive) wins; then
// the first option whose full text occurs case-insensitively; else absent.
inline std::optional<std::string> extract_choice(
    std::string_view response, std::span<const std::pair<std::string, std::string>> options) {
  for (std::size_t i = 0; i < response.size(); ++i) {
    const bool left_ok = i == 0 || !is_ascii_alnum(response[i - 1]);
    const bool right_ok = i + 1 >= response.size() || !is_ascii_alnum(response[i + 1]);
    if (!left_ok || !right_ok) continue;
    for (const auto& [label, text] : options)
      if (label.size() == 1 && label[0] == response[i]) return label;
  }
  for (const auto& [label, text] : options)
    if (contains_ci(response, text)) return label;
  return std::nullopt;
}

struct AccuracyResult {
  double value = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
};

// Top-1 accuracy; responses with no extractable choice count as incorrect.
inline AccuracyResult top1_accuracy(std::span<const McqItem> items,
                                    std::span<const std::string> responses) {
  if (items.size() != responses.size())
    throw Error(ErrorCode::length_mismatch,
                std::to_string(items.size()) + " items vs " + std::to_string(responses.size()) +
                    " responses");
  if (items.empty()) throw Error(ErrorCode::empty_set, "no items to score");
  AccuracyResult result;
  result.total = items.size();
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto choice = extract_choice(responses[i], items[i].options);
    if (choice && *choice == items[i].gold_label) ++result.correct;
  }
  result.value = static_cast<double>(result.correct) / static_cast<double>(result.total);
  return result;
}

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Case-fold, replace every non-alphanumeric byte with a space, split on
// whitespace.
inline std::vector<std::string> rouge_tokens(std::string_view text) {
  std::string cleaned = fold_case(text);
  for (char& c : cleaned)
    if (!is_ascii_alnum(c)) c = ' ';
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && cleaned[i] == ' ') ++i;
    std::size_t j = i;
    while (j < cleaned.size() && cleaned[j] != ' ') ++j;
    if (j > i) tokens.push_back(cleaned.substr(i, j - i));
    i = j;
  }
  return tokens;
}

inline std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> curr(b.size() + 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j)
      curr[j + 1] = a[i] == b[j] ? prev[j] + 1 : std::max(prev[j + 1], curr[j]);
    prev.swap(curr);
  }
  return prev[b.size()];
}

// ROUGE-L: LCS over token sequences; all zeros when either side is empty.
inline RougeScore rouge_l(std::string_view candidate, std::string_view reference) {
  const std::vector<std::string> cand = rouge_tokens(candidate);
  const std::vector<std::string> ref = rouge_tokens(reference);
  RougeScore score;
  if (cand.empty() || ref.empty()) return score;
  const double lcs = static_cast<double>(lcs_length(cand, ref));
  score.precision = lcs / static_cast<double>(cand.size());
  score.recall = lcs / static_cast<double>(ref.size());
  if (score.precision + score.recall > 0.0)
    score.f1 = 2.0 * score.precision * score.recall / (score.precision + score.recall);
  return score;
}

struct CoverageResult {
  double value = 0.0;
  std::size_t mentioned = 0;
  std::size_t entities = 0;
};

// Fraction of subgraph entities whose canonical name or any alias occurs
// in the output text (case-insensitive, word-bounded). Aliases known to
// the parent graph for the same canonical name also count.
inline CoverageResult kg_evidence_coverage(const KnowledgeGraph& subgraph,
                                           std::string_view output_text,
                                           const KnowledgeGraph& graph) {
  if (subgraph.entity_count() == 0)
    throw Error(ErrorCode::empty_subgraph, "coverage over an empty subgraph");
  CoverageResult result;
  result.entities = subgraph.entity_count();
  for (const auto& [id, entity] : subgraph.entities()) {
    std::set<std::string> names{entity.canonical_name};
    names.insert(entity.aliases.begin(), entity.aliases.end());
    if (auto parent = graph.resolve_name(entity.canonical_name)) {
      const Entity& full = graph.entity(*parent);
      names.insert(full.canonical_name);
      names.insert(full.aliases.begin(), full.aliases.end());
    }
    for (const std::string& name : names)
      if (contains_word_ci(output_text, name)) {
        ++result.mentioned;
        break;
      }
  }
  result.value = static_cast<double>(result.mentioned) / static_cast<double>(result.entities);
  return result;
}

struct GuidelineRule {
  std::vector<std::string> context;  // required context entity names
  std::vector<std::string> recommended;
  std::vector<std::string> contraindicated;
};

struct EvalCase {
  std::vector<std::string> context;
  std::vector<std::string> recommended;
};

namespace detail {

inline std::set<std::string> folded_set(std::span<const std::string> names) {
  std::set<std::string> out;
  for (const std::string& name : names) out.insert(fold_case(trim(name)));
  return out;
}

inline bool rule_applies(const GuidelineRule& rule, const std::set<std::string>& context) {
  for (const std::string& required : rule.context)
    if (!context.count(fold_case(trim(required)))) return false;
  return true;
}

}  // namespace detail

struct SafetyResult {
  double value = 0.0;
  std::size_t safe = 0;
  std::size_t total = 0;
};

// A case is safe when no recommended entity is contraindicated by any rule
// whose context predicate is satisfied by the case context.
inline SafetyResult drug_safety_score(std::span<const EvalCase> cases,
                                      std::span<const GuidelineRule> rules) {
  if (cases.empty()) throw Error(ErrorCode::empty_set, "no cases to score");
  SafetyResult result;
  result.total = cases.size();
  for (const EvalCase& c : cases) {
    const std::set<std::string> context = detail::folded_set(c.context);
    const std::set<std::string> recommended = detail::folded_set(c.recommended);
    bool safe = true;
    for (const GuidelineRule& rule : rules) {
      if (!detail::rule_applies(rule, context)) continue;
      for (const std::string& contraindicated : rule.contraindicated)
        if (recommended.count(fold_case(trim(contraindicated)))) safe = false;
    }
    if (safe) ++result.safe;
  }
  result.value = static_cast<double>(result.safe) / static_cast<double>(result.total);
  return result;
}

struct ConcordanceResult {
  double value = 0.0;
  std::size_t concordant = 0;
  std::size_t applicable = 0;
  std::size_t excluded = 0;  // cases no rule covers
};

// A case concords when at least one applicable rule lists every recommended
// entity in its recommended set. Cases with no applicable rule are excluded
// from the denominator and reported separately.
inline ConcordanceResult guideline_concordance(std::span<const EvalCase> cases,
                                               std::span<const GuidelineRule> rules) {
  if (cases.empty()) throw Error(ErrorCode::empty_set, "no cases to score");
  ConcordanceResult result;
  for (const EvalCase& c : cases) {
    const std::set<std::string> context = detail::folded_set(c.context);
    const std::set<std::string> recommended = detail::folded_set(c.recommended);
    bool any_applicable = false;
    bool concordant = false;
    for (const GuidelineRule& rule : rules) {
      if (!detail::rule_applies(rule, context)) continue;
      any_applicable = true;
      const std::set<std::string> allowed = detail::folded_set(rule.recommended);
      bool all_listed = true;
      for (const std::string& name : recommended)
        if (!allowed.count(name)) all_listed = false;
      if (all_listed) concordant = true;
    }
    if (!any_applicable) {
      ++result.excluded;
      continue;
    }
    ++result.applicable;
    if (concordant) ++result.concordant;
  }
  if (result.applicable == 0)
    throw Error(ErrorCode::all_cases_inapplicable, "no case is covered by any rule");
  result.value =
      static_cast<double>(result.concordant) / static_cast<double>(result.applicable);
  return result;
}

// Rule tables: JSON array of {context: [..], recommended: [..],
// contraindicated: [..]}; recommended and contraindicated must be disjoint
// within a rule.
inline std::vector<GuidelineRule> parse_rules(std::string_view text) {
  const nlohmann::json doc = detail::parse_json_array(text, "rule");
  std::vector<GuidelineRule> rules;
  auto read_names = [](const nlohmann::json& obj, const char* key, std::size_t index) {
    std::vector<std::string> names;
    auto it = obj.find(key);
    if (it == obj.end()) return names;
    if (!it->is_array())
      throw Error(ErrorCode::malformed_json,
                  detail::record_tag(index) + ": \"" + key + "\" must be an array of strings");
    for (const nlohmann::json& name : *it) {
      if (!name.is_string())
        throw Error(ErrorCode::malformed_json,
                    detail::record_tag(index) + ": \"" + key + "\" must be an array of strings");
      names.push_back(name.get<std::string>());
    }
    return names;
  };
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const nlohmann::json& obj = doc[i];
    if (!obj.is_object())
      throw Error(ErrorCode::malformed_json, detail::record_tag(i) + ": expected an object");
    GuidelineRule rule;
    rule.context = read_names(obj, "context", i);
    rule.recommended = read_names(obj, "recommended", i);
    rule.contraindicated = read_names(obj, "contraindicated", i);
    const auto recommended = detail::folded_set(rule.recommended);
    for (const std::string& name : rule.contraindicated)
      if (recommended.count(fold_case(trim(name))))
        throw Error(ErrorCode::invalid_config,
                    detail::record_tag(i) + ": \"" + name +
                        "\" is both recommended and contraindicated");
    rules.push_back(std::move(rule));
  }
  return rules;
}

// MCQ items: JSON array of {id, question, options: {label: text}, gold}.
// Options come back in label order.
inline std::vector<McqItem> parse_mcq_items(std::string_view text) {
  const nlohmann::json doc = detail::parse_json_array(text, "mcq");
  std::vector<McqItem> items;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const nlohmann::json& obj = doc[i];
    if (!obj.is_object())
      throw Error(ErrorCode::malformed_json, detail::record_tag(i) + ": expected an object");
    McqItem item;
    item.id = detail::require_string(obj, "id", i);
    if (auto it = obj.find("question"); it != obj.end() && it->is_string())
      item.question = it->get<std::string>();
    item.gold_label = detail::require_string(obj, "gold", i);
    auto it = obj.find("options");
    if (it == obj.end())
      throw Error(ErrorCode::missing_field, detail::record_tag(i) + ": \"options\"");
    if (!it->is_object())
      throw Error(ErrorCode::malformed_json,
                  detail::record_tag(i) + ": \"options\" must be an object");
    for (const auto& [label, value] : it->items()) {
      if (!value.is_string())
        throw Error(ErrorCode::malformed_json,
                    detail::record_tag(i) + ": option texts must be strings");
      item.options.emplace_back(label, value.get<std::string>());
    }
    if (item.options.size() < 2)
      throw Error(ErrorCode::malformed_json,
                  detail::record_tag(i) + ": at least two options required");
    bool gold_present = false;
    for (const auto& [label, text_value] : item.options)
      if (label == item.gold_label) gold_present = true;
    if (!gold_present)
      throw Error(ErrorCode::malformed_json,
                  detail::record_tag(i) + ": gold label \"" + item.gold_label +
                      "\" not among options");
    items.push_back(std::move(item));
  }
  return items;
}

// Evaluation cases: JSON array of {context: [..], recommended: [..]}.
inline std::vector<EvalCase> parse_cases(std::string_view text) {
  const nlohmann::json doc = detail::parse_json_array(text, "case");
  std::vector<EvalCase> cases;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const nlohmann::json& obj = doc[i];
    if (!obj.is_object())
      throw Error(ErrorCode::malformed_json, detail::record_tag(i) + ": expected an object");
    EvalCase c;
    auto read = [&](const char* key) {
      std::vector<std::string> names;
      auto it = obj.find(key);
      if (it == obj.end())
        throw Error(ErrorCode::missing_field, detail::record_tag(i) + ": \"" + key + "\"");
      if (!it->is_array())
        throw Error(ErrorCode::malformed_json,
                    detail::record_tag(i) + ": \"" + key + "\" must be an array of strings");
      for (const nlohmann::json& name : *it) {
        if (!name.is_string())
          throw Error(ErrorCode::malformed_json,
                      detail::record_tag(i) + ": \"" + key + "\" must be an array of strings");
        names.push_back(name.get<std::string>());
      }
      return names;
    };
    c.context = read("context");
    c.recommended = read("recommended");
    cases.push_back(std::move(c));
  }
  return cases;
}

}  // namespace kgrag
