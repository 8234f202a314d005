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
#include <set>
#include <span>
#include <string>
#include <vector>

#include "kgrag/errors.hpp"
#include "kgrag/graph.hpp"
#include "kgrag/strings.hpp"

namespace kgrag {

// One traversed triplet. head/tail keep the stored direction; reversed
// marks that the traversal ran tail -> head.
struct PathHop {
  EntityId head = 0;
  RelationLabel relation;
  EntityId tail = 0;
  bool reversed = false;

  EntityId from() const { return reversed ? tail : head; }
  EntityId to() const { return reversed ? head : tail; }
};

// Simple (node-repeat-free) chain of hops from a seed to a sink.
struct ReasoningPath {
  EntityId seed = 0;
  std::vector<PathHop> hops;
};

namespace detail {

struct PathCollector {
  const KnowledgeGraph& graph;
  const std::set<EntityId>& sinks;
  std::size_t max_depth;
  std::vector<ReasoningPath>& out;
  std::vector<PathHop> stack;
  std::set<EntityId> visited;

  void walk(EntityId seed, EntityId node) {
    if (sinks.count(node) && !stack.empty()) out.push_back({seed, stack});
    if (stack.size() >= max_depth) return;
    for (const Neighbor& neighbor : graph.neighbors(node, Direction::both)) {
      if (visited.count(neighbor.other)) continue;
      const Triplet& t = graph.triplets()[neighbor.triplet_index];
      PathHop hop;
      hop.head = t.head;
      hop.relation = t.relation;
      hop.tail = t.tail;
      hop.reversed = !neighbor.outgoing;
      visited.insert(neighbor.other);
      stack.push_back(hop);
      walk(seed, neighbor.other);
      stack.pop_back();
      visited.erase(neighbor.other);
    }
  }
};

}  // namespace detail

// All simple paths of length <= max_depth from each seed to each sink.
// Sinks are the degree-1 non-seed nodes (distinct-neighbor degree); when
// the subgraph has no such leaves, every non-seed node is a sink. Parallel
// edges yield distinct paths. Output is sorted by seed name, then the
// node-name sequence, then relation names.
inline std::vector<ReasoningPath> enumerate_paths(const KnowledgeGraph& subgraph,
                                                  std::span<const EntityId> seeds,
                                                  std::size_t max_depth) {
  if (seeds.empty()) throw Error(ErrorCode::empty_seed_set, "seed set is empty");
  std::set<EntityId> seed_set;
  for (EntityId seed : seeds)
    if (subgraph.contains(seed)) seed_set.insert(seed);
  if (seed_set.empty())
    throw Error(ErrorCode::empty_seed_set, "no seed is present in the subgraph");

  std::set<EntityId> sinks;
  for (const auto& [id, entity] : subgraph.entities())
    if (!seed_set.count(id) && subgraph.adjacent(id).size() == 1) sinks.insert(id);
  if (sinks.empty())
    for (const auto& [id, entity] : subgraph.entities())
      if (!seed_set.count(id)) sinks.insert(id);

  std::vector<ReasoningPath> paths;
  for (EntityId seed : seed_set) {
    detail::PathCollector collector{subgraph, sinks, max_depth, paths, {}, {seed}};
    collector.walk(seed, seed);
  }

  auto name_of = [&](EntityId id) { return fold_case(subgraph.entity(id).canonical_name); };
  auto sort_key = [&](const ReasoningPath& path) {
    std::vector<std::string> nodes{name_of(path.seed)};
    std::vector<std::string> relations;
    for (const PathHop& hop : path.hops) {
      nodes.push_back(name_of(hop.to()));
      relations.push_back(hop.relation.name + (hop.reversed ? "^-1" : ""));
    }
    return std::pair{nodes, relations};
  };
  std::sort(paths.begin(), paths.end(), [&](const ReasoningPath& a, const ReasoningPath& b) {
    return sort_key(a) < sort_key(b);
  });
  return paths;
}

// Renders a path as hops joined by " -> ", each hop as
// (head, relation[Np], tail) in the triplet's stored direction; reversed
// traversals append ^-1 to the relation name. N is the paper count taken
// from the given graph; hops absent from it raise DanglingTriplet.
inline std::string serialize_path(const ReasoningPath& path, const KnowledgeGraph& graph) {
  std::string out;
  for (std::size_t i = 0; i < path.hops.size(); ++i) {
    const PathHop& hop = path.hops[i];
    const auto index = graph.find_triplet(hop.head, hop.relation.name, hop.tail);
    if (!index)
      throw Error(ErrorCode::dangling_triplet,
                  "path hop not present in graph: " + hop.relation.name);
    const Triplet& t = graph.triplets()[*index];
    if (i) out += " -> ";
    out += "(" + graph.entity(hop.head).canonical_name + ", " + hop.relation.name +
           (hop.reversed ? "^-1" : "") + "[" + std::to_string(t.paper_count) + "p], " +
           graph.entity(hop.tail).canonical_name + ")";
  }
  return out;
}

}  // namespace kgrag
