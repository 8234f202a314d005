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
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "kgrag/errors.hpp"
#include "kgrag/graph.hpp"
#include "kgrag/strings.hpp"

namespace kgrag {

enum class RetrievalMode { ppr_pcst, semantic, hybrid };

inline const char* retrieval_mode_name(RetrievalMode mode) {
  switch (mode) {
    case RetrievalMode::ppr_pcst: return "ppr_pcst";
    case RetrievalMode::semantic: return "semantic";
    case RetrievalMode::hybrid: return "hybrid";
  }
  return "ppr_pcst";
}

inline std::optional<RetrievalMode> parse_retrieval_mode(std::string_view s) {
  if (s == "ppr_pcst") return RetrievalMode::ppr_pcst;
  if (s == "semantic") return RetrievalMode::semantic;
  if (s == "hybrid") return RetrievalMode::hybrid;
  return std::nullopt;
}

struct RetrievalConfig {
  double alpha = 0.15;               // restart probability
  std::size_t max_nodes = 30;        // subgraph node budget
  std::size_t max_depth = 4;         // hop limit
  std::size_t top_k = 10;            // semantic candidate count
  double ppr_tolerance = 1e-10;      // L1 convergence threshold
  std::size_t ppr_max_iterations = 1000;
  RetrievalMode mode = RetrievalMode::ppr_pcst;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw Error(ErrorCode::invalid_config, "alpha must be in (0, 1)");
    if (max_nodes < 1) throw Error(ErrorCode::invalid_config, "max_nodes must be >= 1");
    if (max_depth < 1) throw Error(ErrorCode::invalid_config, "max_depth must be >= 1");
    if (top_k < 1) throw Error(ErrorCode::invalid_config, "top_k must be >= 1");
    if (!(ppr_tolerance > 0.0))
      throw Error(ErrorCode::invalid_config, "ppr_tolerance must be positive");
    if (ppr_max_iterations < 1)
      throw Error(ErrorCode::invalid_config, "ppr_max_iterations must be >= 1");
  }
};

// Node relevance scores; sums to 1 over all graph nodes.
using PrizeMap = std::map<EntityId, double>;

struct PprResult {
  PrizeMap scores;
  bool converged = true;
  std::size_t iterations = 0;
};

namespace detail {

inline std::vector<EntityId> unique_seeds(const KnowledgeGraph& graph,
                                          std::span<const EntityId> seeds) {
  if (seeds.empty()) throw Error(ErrorCode::empty_seed_set, "seed set is empty");
  std::set<EntityId> unique;
  for (EntityId seed : seeds) {
    if (!graph.contains(seed))
      throw Error(ErrorCode::unknown_entity, "seed id " + std::to_string(seed));
    unique.insert(seed);
  }
  return {unique.begin(), unique.end()};
}

}  // namespace detail

// Personalized PageRank by power iteration on r <- alpha*s + (1-alpha)*W^T r,
// where s is uniform over the seeds and W is the row-stochastic transition
// matrix of the undirected multigraph view (parallel edges count). Nodes
// with no incident edges redistribute their mass to the seeds. Stops when
// the L1 change drops below ppr_tolerance; hitting the iteration cap
// returns the current iterate with converged = false.
inline PprResult ppr(const KnowledgeGraph& graph, std::span<const EntityId> seeds,
                     const RetrievalConfig& config = {}) {
  config.validate();
  if (!graph.frozen()) throw Error(ErrorCode::graph_not_frozen, "ppr requires a frozen graph");
  if (graph.entity_count() == 0) throw Error(ErrorCode::empty_graph, "ppr on an empty graph");
  const std::vector<EntityId> seed_ids = detail::unique_seeds(graph, seeds);

  std::vector<EntityId> ids;
  ids.reserve(graph.entity_count());
  std::map<EntityId, std::size_t> position;
  for (const auto& [id, entity] : graph.entities()) {
    position.emplace(id, ids.size());
    ids.push_back(id);
  }
  const std::size_t n = ids.size();

  // Undirected incidence with edge multiplicity.
  std::vector<std::vector<std::pair<std::size_t, double>>> transitions(n);
  std::vector<std::map<std::size_t, double>> counts(n);
  for (const Triplet& t : graph.triplets()) {
    const std::size_t u = position.at(t.head);
    const std::size_t v = position.at(t.tail);
    counts[u][v] += 1.0;
    counts[v][u] += 1.0;
  }
  std::vector<double> degree(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& [v, c] : counts[u]) degree[u] += c;
    if (degree[u] > 0.0)
      for (const auto& [v, c] : counts[u]) transitions[u].emplace_back(v, c / degree[u]);
  }

  std::vector<std::size_t> seed_positions;
  seed_positions.reserve(seed_ids.size());
  for (EntityId seed : seed_ids) seed_positions.push_back(position.at(seed));
  const double seed_mass = 1.0 / static_cast<double>(seed_positions.size());

  std::vector<double> restart(n, 0.0);
  for (std::size_t p : seed_positions) restart[p] = seed_mass;

  std::vector<double> rank = restart;
  std::vector<double> next(n, 0.0);
  PprResult result;
  for (std::size_t iteration = 1; iteration <= config.ppr_max_iterations; ++iteration) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t u = 0; u < n; ++u) {
      const double mass = (1.0 - config.alpha) * rank[u];
      if (mass == 0.0) continue;
      if (degree[u] > 0.0) {
        for (const auto& [v, w] : transitions[u]) next[v] += mass * w;
      } else {
        for (std::size_t p : seed_positions) next[p] += mass * seed_mass;
      }
    }
    for (std::size_t v = 0; v < n; ++v) next[v] += config.alpha * restart[v];

    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) change += std::abs(next[v] - rank[v]);
    rank.swap(next);
    result.iterations = iteration;
    if (change < config.ppr_tolerance) {
      result.converged = true;
      break;
    }
    result.converged = false;
  }

  double total = 0.0;
  for (double r : rank) total += r;
  for (std::size_t v = 0; v < n; ++v) result.scores.emplace(ids[v], rank[v] / total);
  return result;
}

// All nodes within max_depth undirected hops of any seed, seeds included.
inline std::set<EntityId> depth_filter(const KnowledgeGraph& graph,
                                       std::span<const EntityId> seeds, std::size_t max_depth) {
  const std::vector<EntityId> seed_ids = detail::unique_seeds(graph, seeds);
  std::set<EntityId> visited(seed_ids.begin(), seed_ids.end());
  std::deque<std::pair<EntityId, std::size_t>> queue;
  for (EntityId seed : seed_ids) queue.emplace_back(seed, 0);
  while (!queue.empty()) {
    const auto [node, depth] = queue.front();
    queue.pop_front();
    if (depth >= max_depth) continue;
    for (EntityId other : graph.adjacent(node))
      if (visited.insert(other).second) queue.emplace_back(other, depth + 1);
  }
  return visited;
}

// Objective value of a node set under uniform edge cost c: collected
// prizes minus c per spanning-tree edge.
inline double pcst_objective(const PrizeMap& prizes, const std::set<EntityId>& nodes, double cost) {
  double total = 0.0;
  for (EntityId id : nodes) {
    auto it = prizes.find(id);
    if (it != prizes.end()) total += it->second;
  }
  if (!nodes.empty()) total -= cost * static_cast<double>(nodes.size() - 1);
  return total;
}

// Greedy Steiner expansion over the candidate-induced undirected graph with
// uniform edge cost c = mean candidate prize. The tree starts at the
// highest-prize seed; each round attaches the node of maximal gain, where a
// node's gain counts the prizes along its hop-shortest (prize-maximal)
// connecting path minus c per new edge, the whole path joining the tree.
// Attachment stops when the best gain goes negative or the budget would be
// exceeded. Ties break toward the case-folded canonical name.
inline KnowledgeGraph pcst_extract(const KnowledgeGraph& graph, const PrizeMap& prizes,
                                   std::span<const EntityId> seeds,
                                   const std::set<EntityId>& candidates,
                                   const RetrievalConfig& config = {}) {
  config.validate();
  for (EntityId id : candidates)
    if (!graph.contains(id))
      throw Error(ErrorCode::unknown_entity, "candidate id " + std::to_string(id));
  const std::vector<EntityId> seed_ids = detail::unique_seeds(graph, seeds);
  std::vector<EntityId> seeds_in;
  for (EntityId seed : seed_ids)
    if (candidates.count(seed)) seeds_in.push_back(seed);
  if (seeds_in.empty())
    throw Error(ErrorCode::no_seed_in_candidates, "no seed inside the candidate set");

  auto prize_of = [&](EntityId id) {
    auto it = prizes.find(id);
    return it == prizes.end() ? 0.0 : it->second;
  };
  double prize_sum = 0.0;
  for (EntityId id : candidates) prize_sum += prize_of(id);
  const double cost = prize_sum / static_cast<double>(candidates.size());

  auto folded_name = [&](EntityId id) { return fold_case(graph.entity(id).canonical_name); };

  EntityId root = seeds_in.front();
  for (EntityId seed : seeds_in) {
    if (prize_of(seed) > prize_of(root) ||
        (prize_of(seed) == prize_of(root) && folded_name(seed) < folded_name(root)))
      root = seed;
  }

  std::map<EntityId, std::vector<EntityId>> adjacency;
  for (EntityId id : candidates)
    for (EntityId other : graph.adjacent(id))
      if (candidates.count(other)) adjacency[id].push_back(other);

  std::set<EntityId> tree{root};
  while (tree.size() < config.max_nodes) {
    // Multi-source BFS from the tree, then a layered pass that, among
    // hop-shortest connecting paths, keeps the one with the largest
    // accumulated prize (folded-name tie-break on the parent).
    std::map<EntityId, std::size_t> dist;
    std::deque<EntityId> queue;
    for (EntityId id : tree) {
      dist[id] = 0;
      queue.push_back(id);
    }
    std::vector<std::vector<EntityId>> layers;
    while (!queue.empty()) {
      const EntityId u = queue.front();
      queue.pop_front();
      auto adj = adjacency.find(u);
      if (adj == adjacency.end()) continue;
      for (EntityId v : adj->second) {
        if (dist.count(v)) continue;
        dist[v] = dist[u] + 1;
        if (layers.size() < dist[v]) layers.resize(dist[v]);
        layers[dist[v] - 1].push_back(v);
        queue.push_back(v);
      }
    }

    std::map<EntityId, double> path_prize;
    std::map<EntityId, EntityId> parent;
    for (EntityId id : tree) path_prize[id] = 0.0;
    for (const std::vector<EntityId>& layer : layers) {
      for (EntityId v : layer) {
        bool have_parent = false;
        for (EntityId u : adjacency.at(v)) {
          auto du = dist.find(u);
          if (du == dist.end() || du->second + 1 != dist[v]) continue;
          const double via = path_prize.at(u) + prize_of(v);
          if (!have_parent || via > path_prize[v] ||
              (via == path_prize[v] && folded_name(u) < folded_name(parent[v]))) {
            path_prize[v] = via;
            parent[v] = u;
            have_parent = true;
          }
        }
      }
    }

    bool found = false;
    EntityId best = 0;
    double best_gain = 0.0;
    for (const auto& [v, d] : dist) {
      if (tree.count(v)) continue;
      if (tree.size() + d > config.max_nodes) continue;
      const double gain = path_prize.at(v) - cost * static_cast<double>(d);
      if (!found || gain > best_gain ||
          (gain == best_gain && folded_name(v) < folded_name(best))) {
        best = v;
        best_gain = gain;
        found = true;
      }
    }
    if (!found || best_gain < 0.0) break;

    EntityId walk = best;
    while (!tree.count(walk)) {
      tree.insert(walk);
      walk = parent.at(walk);
    }
  }

  std::vector<EntityId> nodes(tree.begin(), tree.end());
  return graph.induced_subgraph(nodes);
}

}  // namespace kgrag
