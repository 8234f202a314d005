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
#include <utility>
#include <vector>

#include "kgrag/embedding.hpp"
#include "kgrag/errors.hpp"
#include "kgrag/graph.hpp"
#include "kgrag/normalizer.hpp"
#include "kgrag/paths.hpp"
#include "kgrag/retrieval.hpp"
#include "kgrag/strings.hpp"

namespace kgrag {

// Nodes ranked by cosine similarity to the query embedding, best first;
// ties break toward the case-folded canonical name.
inline std::vector<EntityId> semantic_top_k(const KnowledgeGraph& graph, std::string_view query,
                                            const EmbeddingIndex& index,
                                            const RetrievalConfig& config = {}) {
  config.validate();
  if (graph.entity_count() == 0)
    throw Error(ErrorCode::empty_graph, "semantic retrieval on an empty graph");
  const auto query_vec = index.embed_text(query);
  if (!query_vec)
    throw Error(ErrorCode::zero_vector, "query embedded to the zero vector");

  std::vector<std::pair<double, EntityId>> ranked;
  ranked.reserve(index.vectors().size());
  for (const auto& [id, vec] : index.vectors()) ranked.emplace_back(cosine(*query_vec, vec), id);
  std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return fold_case(graph.entity(a.second).canonical_name) <
           fold_case(graph.entity(b.second).canonical_name);
  });
  if (ranked.size() > config.top_k) ranked.resize(config.top_k);
  std::vector<EntityId> ids;
  ids.reserve(ranked.size());
  for (const auto& [score, id] : ranked) ids.push_back(id);
  return ids;
}

// Top-k nodes by cosine similarity plus their depth-1 neighborhoods, as an
// induced subgraph.
inline KnowledgeGraph semantic_retrieve(const KnowledgeGraph& graph, std::string_view query,
                                        const EmbeddingIndex& index,
                                        const RetrievalConfig& config = {}) {
  const std::vector<EntityId> top = semantic_top_k(graph, query, index, config);
  std::set<EntityId> nodes(top.begin(), top.end());
  for (EntityId id : top)
    for (EntityId other : graph.adjacent(id)) nodes.insert(other);
  std::vector<EntityId> ids(nodes.begin(), nodes.end());
  return graph.induced_subgraph(ids);
}

namespace detail {

inline KnowledgeGraph ppr_pcst_retrieve(const KnowledgeGraph& graph,
                                        std::span<const EntityId> seeds,
                                        const RetrievalConfig& config, PrizeMap* prizes_out) {
  const PprResult scores = ppr(graph, seeds, config);
  const std::set<EntityId> candidates = depth_filter(graph, seeds, config.max_depth);
  if (prizes_out) *prizes_out = scores.scores;
  return pcst_extract(graph, scores.scores, seeds, candidates, config);
}

}  // namespace detail

// Union of the ppr_pcst and semantic subgraphs. Over budget, non-seed
// nodes drop in ascending PPR prize (semantic-only nodes count as prize 0);
// the result is then restricted to the largest connected component that
// still contains a seed.
inline KnowledgeGraph hybrid_retrieve(const KnowledgeGraph& graph, std::string_view query,
                                      std::span<const EntityId> seeds, const EmbeddingIndex& index,
                                      const RetrievalConfig& config = {}) {
  PrizeMap prizes;
  const KnowledgeGraph pcst_side = detail::ppr_pcst_retrieve(graph, seeds, config, &prizes);
  const KnowledgeGraph semantic_side = semantic_retrieve(graph, query, index, config);

  std::set<EntityId> seed_set(seeds.begin(), seeds.end());
  std::set<EntityId> pcst_nodes;
  for (const auto& [id, entity] : pcst_side.entities()) pcst_nodes.insert(id);
  std::set<EntityId> nodes = pcst_nodes;
  for (const auto& [id, entity] : semantic_side.entities()) nodes.insert(id);

  if (nodes.size() > config.max_nodes) {
    std::vector<EntityId> droppable;
    for (EntityId id : nodes)
      if (!seed_set.count(id)) droppable.push_back(id);
    auto drop_prize = [&](EntityId id) {
      if (!pcst_nodes.count(id)) return 0.0;
      auto it = prizes.find(id);
      return it == prizes.end() ? 0.0 : it->second;
    };
    std::sort(droppable.begin(), droppable.end(), [&](EntityId a, EntityId b) {
      const double pa = drop_prize(a);
      const double pb = drop_prize(b);
      if (pa != pb) return pa < pb;
      return fold_case(graph.entity(a).canonical_name) < fold_case(graph.entity(b).canonical_name);
    });
    for (EntityId id : droppable) {
      if (nodes.size() <= config.max_nodes) break;
      nodes.erase(id);
    }
  }

  std::vector<EntityId> ids(nodes.begin(), nodes.end());
  KnowledgeGraph merged = graph.induced_subgraph(ids);

  // Connected components of the pruned union; keep the largest one holding
  // a seed (ties toward the component with the smallest folded name).
  std::set<EntityId> unvisited = nodes;
  std::set<EntityId> best_component;
  std::string best_component_name;
  while (!unvisited.empty()) {
    std::set<EntityId> component;
    std::vector<EntityId> stack{*unvisited.begin()};
    while (!stack.empty()) {
      const EntityId node = stack.back();
      stack.pop_back();
      if (!unvisited.erase(node)) continue;
      component.insert(node);
      for (EntityId other : merged.adjacent(node)) stack.push_back(other);
    }
    bool has_seed = false;
    for (EntityId seed : seed_set)
      if (component.count(seed)) has_seed = true;
    if (!has_seed) continue;
    std::string component_name = fold_case(merged.entity(*component.begin()).canonical_name);
    for (EntityId id : component)
      component_name =
          std::min(component_name, fold_case(merged.entity(id).canonical_name));
    if (component.size() > best_component.size() ||
        (component.size() == best_component.size() && component_name < best_component_name)) {
      best_component = component;
      best_component_name = component_name;
    }
  }
  std::vector<EntityId> kept(best_component.begin(), best_component.end());
  return graph.induced_subgraph(kept);
}

struct RetrievalResult {
  KnowledgeGraph subgraph;
  std::vector<ReasoningPath> paths;
  std::string serialized_context;  // newline-joined path renderings
  std::vector<EntityId> seeds;     // path-enumeration anchors
  RetrievalMode mode_used = RetrievalMode::ppr_pcst;
  std::vector<std::string> warnings;
};

// Full pipeline: dictionary-link seed entities in the query, dispatch to
// the configured retrieval mode (falling back to semantic with a warning
// when nothing links), then enumerate and serialize reasoning paths.
inline RetrievalResult retrieve(const KnowledgeGraph& graph, std::string_view query,
                                const RetrievalConfig& config, const EmbeddingIndex& index,
                                const NormalizerConfig& normalizer_config = {}) {
  config.validate();
  normalizer_config.validate();
  if (!graph.frozen())
    throw Error(ErrorCode::graph_not_frozen, "retrieve requires a frozen graph");
  if (graph.entity_count() == 0) throw Error(ErrorCode::empty_graph, "retrieve on an empty graph");

  RetrievalResult result;
  std::vector<EntityId> linked;
  std::set<EntityId> seen;
  for (const EntityLink& link : link_entities(query, graph, normalizer_config))
    if (seen.insert(link.entity).second) linked.push_back(link.entity);

  RetrievalMode mode = config.mode;
  if (linked.empty() && mode != RetrievalMode::semantic) {
    result.warnings.push_back("no seed entities linked in query; falling back to semantic mode");
    mode = RetrievalMode::semantic;
  }
  result.mode_used = mode;

  std::vector<EntityId> path_seeds;
  switch (mode) {
    case RetrievalMode::ppr_pcst:
      result.subgraph = detail::ppr_pcst_retrieve(graph, linked, config, nullptr);
      path_seeds = linked;
      break;
    case RetrievalMode::semantic: {
      result.subgraph = semantic_retrieve(graph, query, index, config);
      path_seeds = semantic_top_k(graph, query, index, config);
      break;
    }
    case RetrievalMode::hybrid:
      result.subgraph = hybrid_retrieve(graph, query, linked, index, config);
      path_seeds = linked;
      break;
  }

  for (EntityId seed : path_seeds)
    if (result.subgraph.contains(seed)) result.seeds.push_back(seed);

  if (!result.seeds.empty() && result.subgraph.entity_count() > 1)
    result.paths = enumerate_paths(result.subgraph, result.seeds, config.max_depth);

  for (std::size_t i = 0; i < result.paths.size(); ++i) {
    if (i) result.serialized_context += "\n";
    result.serialized_context += serialize_path(result.paths[i], result.subgraph);
  }
  return result;
}

}  // namespace kgrag
