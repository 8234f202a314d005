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

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "kgrag/retrieval.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace kgrag;

namespace {

PrizeMap normalized_prizes(std::mt19937& rng, const std::vector<EntityId>& ids) {
  PrizeMap prizes;
  double total = 0.0;
  for (EntityId id : ids) {
    const double value = static_cast<double>(rng() % 1000) / 1000.0;
    prizes[id] = value;
    total += value;
  }
  if (total == 0.0) {
    for (EntityId id : ids) prizes[id] = 1.0 / static_cast<double>(ids.size());
  } else {
    for (auto& [id, value] : prizes) value /= total;
  }
  return prizes;
}

std::set<EntityId> node_set(const KnowledgeGraph& graph) {
  std::set<EntityId> out;
  for (const auto& [id, entity] : graph.entities()) out.insert(id);
  return out;
}

bool is_connected(const KnowledgeGraph& graph) {
  if (graph.entity_count() == 0) return false;
  std::set<EntityId> seen{graph.entities().begin()->first};
  std::vector<EntityId> stack{graph.entities().begin()->first};
  while (!stack.empty()) {
    const EntityId u = stack.back();
    stack.pop_back();
    for (EntityId v : graph.adjacent(u))
      if (seen.insert(v).second) stack.push_back(v);
  }
  return seen.size() == graph.entity_count();
}

}  // namespace

TEST_CASE("two dominant prizes within budget keep both nodes") {
  KnowledgeGraph graph;
  Entity a, b;
  a.canonical_name = "Anchor";
  a.layer = Layer::syndrome();
  b.canonical_name = "Buddy";
  b.layer = Layer::treatment();
  const EntityId ia = graph.add_entity(a);
  const EntityId ib = graph.add_entity(b);
  graph.add_triplet(ia, RelationLabel::of("r"), ib, 2, Provenance::manual);
  graph.freeze();

  PrizeMap prizes{{ia, 0.5}, {ib, 0.5}};
  const std::set<EntityId> candidates{ia, ib};
  const auto sub = pcst_extract(graph, prizes, std::vector<EntityId>{ia}, candidates);
  REQUIRE(sub.entity_count() == 2);
  REQUIRE(sub.triplet_count() == 1);
}

TEST_CASE("budget one returns exactly the best seed with no edges") {
  KnowledgeGraph graph;
  Entity a, b, c;
  a.canonical_name = "Aseed";
  a.layer = Layer::syndrome();
  b.canonical_name = "Bseed";
  b.layer = Layer::syndrome();
  c.canonical_name = "Cnode";
  c.layer = Layer::gene();
  const EntityId ia = graph.add_entity(a);
  const EntityId ib = graph.add_entity(b);
  const EntityId ic = graph.add_entity(c);
  graph.add_triplet(ia, RelationLabel::of("r"), ib, 1, Provenance::manual);
  graph.add_triplet(ib, RelationLabel::of("r"), ic, 1, Provenance::manual);
  graph.freeze();

  RetrievalConfig config;
  config.max_nodes = 1;
  PrizeMap prizes{{ia, 0.2}, {ib, 0.5}, {ic, 0.3}};
  const auto sub = pcst_extract(graph, prizes, std::vector<EntityId>{ia, ib},
                                node_set(graph), config);
  REQUIRE(sub.entity_count() == 1);
  REQUIRE(sub.triplet_count() == 0);
  CHECK(sub.contains(ib));  // highest-prize seed
}

TEST_CASE("no seed inside the candidate set is an error") {
  KnowledgeGraph graph;
  Entity a, b;
  a.canonical_name = "A";
  a.layer = Layer::syndrome();
  b.canonical_name = "B";
  b.layer = Layer::gene();
  const EntityId ia = graph.add_entity(a);
  const EntityId ib = graph.add_entity(b);
  graph.add_triplet(ia, RelationLabel::of("r"), ib, 1, Provenance::manual);
  graph.freeze();
  const std::set<EntityId> candidates{ib};
  CHECK_THROWS_MATCHES(pcst_extract(graph, PrizeMap{}, std::vector<EntityId>{ia}, candidates),
                       Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::no_seed_in_candidates;
                       }));
}

TEST_CASE("greedy crosses a low-prize bridge worth paying for") {
  // seed(0.01) - bridge(0.3) - jackpot(0.69); cost = mean = 1/3.
  // Attaching the jackpot through the bridge nets 0.99 - 2/3 > 0.
  KnowledgeGraph graph;
  Entity s, m, j;
  s.canonical_name = "Seed";
  s.layer = Layer::syndrome();
  m.canonical_name = "Middle";
  m.layer = Layer::gene();
  j.canonical_name = "Jackpot";
  j.layer = Layer::treatment();
  const EntityId is = graph.add_entity(s);
  const EntityId im = graph.add_entity(m);
  const EntityId ij = graph.add_entity(j);
  graph.add_triplet(is, RelationLabel::of("r"), im, 1, Provenance::manual);
  graph.add_triplet(im, RelationLabel::of("r"), ij, 1, Provenance::manual);
  graph.freeze();

  PrizeMap prizes{{is, 0.01}, {im, 0.3}, {ij, 0.69}};
  const auto sub = pcst_extract(graph, prizes, std::vector<EntityId>{is}, node_set(graph));
  REQUIRE(sub.entity_count() == 3);
}

TEST_CASE("random suite: half-optimality and structural guarantees") {
  std::mt19937 rng(1789);
  for (int round = 0; round < 40; ++round) {
    const std::size_t n = 3 + rng() % 8;  // up to 10 nodes
    const auto random = test::random_connected_graph(rng, n, rng() % n);
    const auto seeds = test::random_seed_set(rng, random.ids, 2);
    const PrizeMap prizes = normalized_prizes(rng, random.ids);
    RetrievalConfig config;
    config.max_nodes = 1 + rng() % n;
    const std::set<EntityId> candidates = depth_filter(random.graph, seeds, 4);

    const auto sub = pcst_extract(random.graph, prizes, seeds, candidates, config);

    // structural gates
    REQUIRE(sub.entity_count() >= 1);
    REQUIRE(sub.entity_count() <= config.max_nodes);
    REQUIRE(is_connected(sub));
    bool has_seed = false;
    for (EntityId seed : seeds)
      if (sub.contains(seed)) has_seed = true;
    REQUIRE(has_seed);
    for (const auto& [id, entity] : sub.entities()) REQUIRE(candidates.count(id));

    // objective within half of the exhaustive optimum
    double prize_sum = 0.0;
    for (EntityId id : candidates) prize_sum += prizes.count(id) ? prizes.at(id) : 0.0;
    const double cost = prize_sum / static_cast<double>(candidates.size());
    const double greedy = pcst_objective(prizes, node_set(sub), cost);
    const double optimum = test::pcst_brute_force_optimum(random.graph, prizes, seeds, candidates,
                                                          config.max_nodes, cost);
    REQUIRE(greedy >= 0.5 * optimum - 1e-12);
  }
}

TEST_CASE("objective never decreases as the budget grows") {
  std::mt19937 rng(31415);
  for (int round = 0; round < 25; ++round) {
    const std::size_t n = 4 + rng() % 7;
    const auto random = test::random_connected_graph(rng, n, rng() % n);
    const auto seeds = test::random_seed_set(rng, random.ids, 2);
    const PrizeMap prizes = normalized_prizes(rng, random.ids);
    const std::set<EntityId> candidates = depth_filter(random.graph, seeds, 4);
    double prize_sum = 0.0;
    for (EntityId id : candidates) prize_sum += prizes.count(id) ? prizes.at(id) : 0.0;
    const double cost = prize_sum / static_cast<double>(candidates.size());

    double previous = -1e30;
    for (std::size_t budget = 1; budget <= n; ++budget) {
      RetrievalConfig config;
      config.max_nodes = budget;
      const auto sub = pcst_extract(random.graph, prizes, seeds, candidates, config);
      const double objective = pcst_objective(prizes, node_set(sub), cost);
      REQUIRE(objective >= previous - 1e-12);
      previous = objective;
    }
  }
}

TEST_CASE("pcst extraction is deterministic") {
  std::mt19937 rng(55);
  const auto random = test::random_connected_graph(rng, 9, 6);
  const auto seeds = test::random_seed_set(rng, random.ids, 2);
  const PrizeMap prizes = normalized_prizes(rng, random.ids);
  const std::set<EntityId> candidates = depth_filter(random.graph, seeds, 4);
  const auto first = pcst_extract(random.graph, prizes, seeds, candidates);
  const auto second = pcst_extract(random.graph, prizes, seeds, candidates);
  REQUIRE(node_set(first) == node_set(second));
}
