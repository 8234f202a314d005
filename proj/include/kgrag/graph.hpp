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
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "kgrag/errors.hpp"
#include "kgrag/layer.hpp"
#include "kgrag/strings.hpp"

namespace kgrag {

using EntityId = std::uint32_t;

struct Entity {
  std::string canonical_name;
  Layer layer = Layer::syndrome();
  std::string identifier;       // ontology identifier, may be empty
  std::string ontology_source;  // may be empty for synthetic data
  std::set<std::string> aliases;
  std::string definition;
};

inline bool is_canonical_relation(std::string_view name) {
  return name == "treats" || name == "contraindicated_with" || name == "associated_with" ||
         name == "characteristic_of" || name == "encodes" || name == "expressed_in";
}

// Relation labels are free-form strings; the six templated relation types
// are flagged canonical (exact, case-sensitive match).
struct RelationLabel {
  std::string name;
  bool canonical = false;

  static RelationLabel of(std::string name) {
    if (trim(name).empty()) throw Error(ErrorCode::empty_name, "relation name must be non-empty");
    RelationLabel label;
    label.canonical = is_canonical_relation(name);
    label.name = std::move(name);
    return label;
  }

  friend bool operator==(const RelationLabel& a, const RelationLabel& b) {
    return a.name == b.name;
  }
};

enum class Provenance { rule_based, external_extractor, manual };

inline const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::rule_based: return "rule_based";
    case Provenance::external_extractor: return "external_extractor";
    case Provenance::manual: return "manual";
  }
  return "manual";
}

inline std::optional<Provenance> parse_provenance(std::string_view s) {
  if (s == "rule_based") return Provenance::rule_based;
  if (s == "external_extractor") return Provenance::external_extractor;
  if (s == "manual") return Provenance::manual;
  return std::nullopt;
}

// Directed evidence-weighted edge. paper_count is the number of independent
// supporting sources; low_evidence holds exactly when paper_count < 2.
struct Triplet {
  EntityId head = 0;
  RelationLabel relation;
  EntityId tail = 0;
  std::int64_t paper_count = 1;
  Provenance provenance = Provenance::manual;
  bool low_evidence = false;
};

enum class Direction { out, in, both };

struct Neighbor {
  std::size_t triplet_index = 0;
  EntityId other = 0;
  bool outgoing = false;
};

struct GraphStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::map<std::string, std::size_t> per_layer_node_counts;
  std::map<std::string, std::size_t> per_relation_edge_counts;
  std::size_t cross_layer_count = 0;
  double cross_layer_fraction = 0.0;
  // Lower of the two middle values for even edge counts; 0 with `empty`
  // set when there are no triplets.
  double median_paper_count = 0.0;
  std::size_t flagged_count = 0;
  bool empty = true;
};

struct AddTripletOutcome {
  std::size_t index = 0;
  bool merged = false;
};

// Typed heterogeneous graph store. Mutations are only allowed before
// freeze(); a frozen graph is immutable and safe for concurrent readers.
class KnowledgeGraph {
 public:
  EntityId add_entity(Entity entity) {
    require_build_phase();
    const std::string_view name = trim(entity.canonical_name);
    if (name.empty()) throw Error(ErrorCode::empty_name, "entity canonical_name must be non-empty");
    entity.canonical_name = std::string(name);
    const std::string folded_name = fold_case(entity.canonical_name);
    if (name_index_.count(folded_name))
      throw Error(ErrorCode::duplicate_name,
                  "entity name collides with an existing name or alias: " + entity.canonical_name);

    // Aliases equal to the entity's own name (after folding) are dropped.
    std::set<std::string> alias_keys;
    for (const std::string& alias : entity.aliases) {
      if (trim(alias).empty())
        throw Error(ErrorCode::empty_name, "alias must be non-empty (entity " + entity.canonical_name + ")");
      std::string folded = fold_case(trim(alias));
      if (folded == folded_name) continue;
      if (name_index_.count(folded))
        throw Error(ErrorCode::duplicate_name,
                    "alias collides with an existing name or alias: " + std::string(trim(alias)));
      alias_keys.insert(std::move(folded));
    }

    const EntityId id = next_id_++;
    name_index_.emplace(folded_name, id);
    for (const std::string& key : alias_keys) name_index_.emplace(key, id);
    if (!entity.identifier.empty()) identifier_index_.try_emplace(entity.identifier, id);
    entities_.emplace(id, std::move(entity));
    return id;
  }

  // Adds an alias to an existing entity, subject to the same collision
  // rules as add_entity.
  void add_alias(EntityId id, std::string alias) {
    require_build_phase();
    Entity& e = mutable_entity(id);
    const std::string_view trimmed = trim(alias);
    if (trimmed.empty()) throw Error(ErrorCode::empty_name, "alias must be non-empty");
    const std::string folded = fold_case(trimmed);
    auto it = name_index_.find(folded);
    if (it != name_index_.end()) {
      if (it->second == id) return;  // already resolves here
      throw Error(ErrorCode::duplicate_name,
                  "alias collides with an existing name or alias: " + std::string(trimmed));
    }
    name_index_.emplace(folded, id);
    e.aliases.insert(std::string(trimmed));
  }

  AddTripletOutcome add_triplet(EntityId head, RelationLabel relation, EntityId tail,
                                std::int64_t paper_count, Provenance provenance) {
    require_build_phase();
    if (!contains(head)) throw Error(ErrorCode::unknown_entity, "head id " + std::to_string(head));
    if (!contains(tail)) throw Error(ErrorCode::unknown_entity, "tail id " + std::to_string(tail));
    if (head == tail)
      throw Error(ErrorCode::self_loop, "self loop on " + entity(head).canonical_name);
    if (paper_count < 1)
      throw Error(ErrorCode::nonpositive_count,
                  "paper_count must be >= 1, got " + std::to_string(paper_count));

    const TripletKey key{head, relation.name, tail};
    auto it = triplet_index_.find(key);
    if (it != triplet_index_.end()) {
      Triplet& existing = triplets_[it->second];
      existing.paper_count += paper_count;
      if (provenance == Provenance::manual) existing.provenance = Provenance::manual;
      existing.low_evidence = existing.paper_count < 2;
      return {it->second, true};
    }

    Triplet triplet;
    triplet.head = head;
    triplet.relation = std::move(relation);
    triplet.tail = tail;
    triplet.paper_count = paper_count;
    triplet.provenance = provenance;
    triplet.low_evidence = paper_count < 2;
    const std::size_t index = triplets_.size();
    triplets_.push_back(std::move(triplet));
    triplet_index_.emplace(TripletKey{head, triplets_[index].relation.name, tail}, index);
    forward_[head].push_back(index);
    backward_[tail].push_back(index);
    return {index, false};
  }

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  bool contains(EntityId id) const { return entities_.count(id) != 0; }

  const Entity& entity(EntityId id) const {
    auto it = entities_.find(id);
    if (it == entities_.end())
      throw Error(ErrorCode::unknown_entity, "entity id " + std::to_string(id));
    return it->second;
  }

  const std::map<EntityId, Entity>& entities() const { return entities_; }
  const std::vector<Triplet>& triplets() const { return triplets_; }
  std::size_t entity_count() const { return entities_.size(); }
  std::size_t triplet_count() const { return triplets_.size(); }

  // Case-folded lookup over canonical names and aliases.
  std::optional<EntityId> resolve_name(std::string_view name) const {
    auto it = name_index_.find(fold_case(trim(name)));
    if (it == name_index_.end()) return std::nullopt;
    return it->second;
  }

  // Exact lookup on the ontology identifier (secondary key; first writer
  // wins on duplicates).
  std::optional<EntityId> resolve_identifier(std::string_view identifier) const {
    auto it = identifier_index_.find(std::string(identifier));
    if (it == identifier_index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::size_t> find_triplet(EntityId head, std::string_view relation,
                                          EntityId tail) const {
    auto it = triplet_index_.find(TripletKey{head, std::string(relation), tail});
    if (it == triplet_index_.end()) return std::nullopt;
    return it->second;
  }

  // Deterministic: sorted by the other endpoint's case-folded canonical
  // name, then relation name. `both` concatenates out and in without
  // cross-direction dedup.
  std::vector<Neighbor> neighbors(EntityId id, Direction direction) const {
    if (!contains(id)) throw Error(ErrorCode::unknown_entity, "entity id " + std::to_string(id));
    std::vector<Neighbor> result;
    if (direction == Direction::out || direction == Direction::both) {
      auto it = forward_.find(id);
      if (it != forward_.end())
        for (std::size_t index : it->second)
          result.push_back({index, triplets_[index].tail, true});
    }
    if (direction == Direction::in || direction == Direction::both) {
      auto it = backward_.find(id);
      if (it != backward_.end())
        for (std::size_t index : it->second)
          result.push_back({index, triplets_[index].head, false});
    }
    std::sort(result.begin(), result.end(), [&](const Neighbor& a, const Neighbor& b) {
      const std::string an = fold_case(entity(a.other).canonical_name);
      const std::string bn = fold_case(entity(b.other).canonical_name);
      if (an != bn) return an < bn;
      const std::string& ar = triplets_[a.triplet_index].relation.name;
      const std::string& br = triplets_[b.triplet_index].relation.name;
      if (ar != br) return ar < br;
      if (a.outgoing != b.outgoing) return a.outgoing;
      return a.triplet_index < b.triplet_index;
    });
    return result;
  }

  // Distinct undirected neighbor ids in ascending order.
  std::vector<EntityId> adjacent(EntityId id) const {
    std::set<EntityId> seen;
    auto fit = forward_.find(id);
    if (fit != forward_.end())
      for (std::size_t index : fit->second) seen.insert(triplets_[index].tail);
    auto bit = backward_.find(id);
    if (bit != backward_.end())
      for (std::size_t index : bit->second) seen.insert(triplets_[index].head);
    return {seen.begin(), seen.end()};
  }

  // Keeps the original entity ids, so prize maps and seed sets computed on
  // the parent remain valid on the subgraph.
  KnowledgeGraph induced_subgraph(std::span<const EntityId> ids) const {
    std::set<EntityId> keep;
    for (EntityId id : ids) {
      if (!contains(id)) throw Error(ErrorCode::unknown_entity, "entity id " + std::to_string(id));
      keep.insert(id);
    }
    KnowledgeGraph sub;
    for (EntityId id : keep) {
      const Entity& e = entity(id);
      sub.entities_.emplace(id, e);
      sub.name_index_.emplace(fold_case(e.canonical_name), id);
      for (const std::string& alias : e.aliases) sub.name_index_.emplace(fold_case(alias), id);
      if (!e.identifier.empty()) sub.identifier_index_.try_emplace(e.identifier, id);
      sub.next_id_ = std::max(sub.next_id_, static_cast<EntityId>(id + 1));
    }
    for (const Triplet& t : triplets_) {
      if (!keep.count(t.head) || !keep.count(t.tail)) continue;
      const std::size_t index = sub.triplets_.size();
      sub.triplets_.push_back(t);
      sub.triplet_index_.emplace(TripletKey{t.head, t.relation.name, t.tail}, index);
      sub.forward_[t.head].push_back(index);
      sub.backward_[t.tail].push_back(index);
    }
    sub.frozen_ = frozen_;
    return sub;
  }

  GraphStats compute_stats() const {
    GraphStats stats;
    stats.node_count = entities_.size();
    stats.edge_count = triplets_.size();
    stats.empty = triplets_.empty();
    for (const auto& [id, e] : entities_) ++stats.per_layer_node_counts[e.layer.label()];
    std::vector<std::int64_t> counts;
    counts.reserve(triplets_.size());
    for (const Triplet& t : triplets_) {
      ++stats.per_relation_edge_counts[t.relation.name];
      if (entity(t.head).layer != entity(t.tail).layer) ++stats.cross_layer_count;
      if (t.low_evidence) ++stats.flagged_count;
      counts.push_back(t.paper_count);
    }
    if (!triplets_.empty()) {
      stats.cross_layer_fraction =
          static_cast<double>(stats.cross_layer_count) / static_cast<double>(stats.edge_count);
      std::sort(counts.begin(), counts.end());
      stats.median_paper_count = static_cast<double>(counts[(counts.size() - 1) / 2]);
    }
    return stats;
  }

 private:
  using TripletKey = std::tuple<EntityId, std::string, EntityId>;

  void require_build_phase() const {
    if (frozen_) throw Error(ErrorCode::graph_frozen, "graph is frozen; mutations are not allowed");
  }

  Entity& mutable_entity(EntityId id) {
    auto it = entities_.find(id);
    if (it == entities_.end())
      throw Error(ErrorCode::unknown_entity, "entity id " + std::to_string(id));
    return it->second;
  }

  std::map<EntityId, Entity> entities_;
  std::vector<Triplet> triplets_;
  std::map<std::string, EntityId> name_index_;
  std::map<std::string, EntityId> identifier_index_;
  std::map<TripletKey, std::size_t> triplet_index_;
  std::map<EntityId, std::vector<std::size_t>> forward_;
  std::map<EntityId, std::vector<std::size_t>> backward_;
  EntityId next_id_ = 0;
  bool frozen_ = false;
};

// Structural equality on entity and triplet sets, keyed by case-folded
// names; internal ids are allowed to differ.
inline bool graphs_equivalent(const KnowledgeGraph& a, const KnowledgeGraph& b) {
  if (a.entity_count() != b.entity_count() || a.triplet_count() != b.triplet_count()) return false;
  using EntityRep =
      std::tuple<std::string, std::string, std::string, std::string, std::set<std::string>,
                 std::string>;
  auto entity_rep = [](const Entity& e) {
    std::set<std::string> folded_aliases;
    for (const std::string& alias : e.aliases) folded_aliases.insert(fold_case(alias));
    return EntityRep{e.canonical_name, e.layer.label(), e.identifier, e.ontology_source,
                     std::move(folded_aliases), e.definition};
  };
  std::map<std::string, EntityRep> ea, eb;
  for (const auto& [id, e] : a.entities()) ea.emplace(fold_case(e.canonical_name), entity_rep(e));
  for (const auto& [id, e] : b.entities()) eb.emplace(fold_case(e.canonical_name), entity_rep(e));
  if (ea != eb) return false;

  using TripletRep = std::tuple<std::int64_t, Provenance, bool>;
  auto collect = [](const KnowledgeGraph& g) {
    std::map<std::tuple<std::string, std::string, std::string>, TripletRep> out;
    for (const Triplet& t : g.triplets())
      out.emplace(std::tuple{fold_case(g.entity(t.head).canonical_name), t.relation.name,
                             fold_case(g.entity(t.tail).canonical_name)},
                  TripletRep{t.paper_count, t.provenance, t.low_evidence});
    return out;
  };
  return collect(a) == collect(b);
}

}  // namespace kgrag
