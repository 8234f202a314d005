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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kgrag/errors.hpp"
#include "kgrag/graph.hpp"
#include "kgrag/layer.hpp"
#include "kgrag/strings.hpp"

namespace kgrag {

struct NodeRecord {
  std::string name;
  std::string identifier;
  std::string source;
  std::string layer;
  std::vector<std::string> aliases;
  std::string definition;
};

struct EdgeRecord {
  std::string head;  // canonical name or identifier
  std::string relation;
  std::string tail;
  std::int64_t paper_count = 1;
  Provenance provenance = Provenance::manual;
};

namespace detail {

inline nlohmann::json parse_json_array(std::string_view text, const char* what) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::malformed_json, e.what());
  }
  if (!doc.is_array())
    throw Error(ErrorCode::malformed_json, std::string(what) + " file must be a JSON array");
  return doc;
}

inline std::string record_tag(std::size_t index) {
  return "record " + std::to_string(index);
}

inline std::string require_string(const nlohmann::json& obj, const char* key, std::size_t index) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw Error(ErrorCode::missing_field, record_tag(index) + ": \"" + key + "\"");
  if (!it->is_string())
    throw Error(ErrorCode::malformed_json,
                record_tag(index) + ": field \"" + key + "\" must be a string");
  return it->get<std::string>();
}

}  // namespace detail

// Node files: JSON array of objects with required keys name, identifier,
// source, layer; optional aliases (array of strings) and definition.
inline std::vector<NodeRecord> parse_nodes(std::string_view text) {
  const nlohmann::json doc = detail::parse_json_array(text, "node");
  std::vector<NodeRecord> records;
  records.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const nlohmann::json& obj = doc[i];
    if (!obj.is_object())
      throw Error(ErrorCode::malformed_json, detail::record_tag(i) + ": expected an object");
    NodeRecord record;
    record.name = detail::require_string(obj, "name", i);
    if (trim(record.name).empty())
      throw Error(ErrorCode::empty_name, detail::record_tag(i) + ": \"name\" is empty");
    record.identifier = detail::require_string(obj, "identifier", i);
    record.source = detail::require_string(obj, "source", i);
    record.layer = detail::require_string(obj, "layer", i);
    if (!Layer::parse(record.layer))
      throw Error(ErrorCode::invalid_layer,
                  detail::record_tag(i) + ": \"" + record.layer + "\"");
    if (auto it = obj.find("aliases"); it != obj.end()) {
      if (!it->is_array())
        throw Error(ErrorCode::malformed_json,
                    detail::record_tag(i) + ": \"aliases\" must be an array of strings");
      for (const nlohmann::json& alias : *it) {
        if (!alias.is_string())
          throw Error(ErrorCode::malformed_json,
                      detail::record_tag(i) + ": \"aliases\" must be an array of strings");
        record.aliases.push_back(alias.get<std::string>());
      }
    }
    if (auto it = obj.find("definition"); it != obj.end()) {
      if (!it->is_string())
        throw Error(ErrorCode::malformed_json,
                    detail::record_tag(i) + ": \"definition\" must be a string");
      record.definition = it->get<std::string>();
    }
    records.push_back(std::move(record));
  }
  return records;
}

// Edge files: JSON array of objects with required keys head, relation,
// tail, paper_count (positive integer); optional provenance, default
// "manual".
inline std::vector<EdgeRecord> parse_edges(std::string_view text) {
  const nlohmann::json doc = detail::parse_json_array(text, "edge");
  std::vector<EdgeRecord> records;
  records.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const nlohmann::json& obj = doc[i];
    if (!obj.is_object())
      throw Error(ErrorCode::malformed_json, detail::record_tag(i) + ": expected an object");
    EdgeRecord record;
    record.head = detail::require_string(obj, "head", i);
    record.relation = detail::require_string(obj, "relation", i);
    record.tail = detail::require_string(obj, "tail", i);
    if (trim(record.head).empty())
      throw Error(ErrorCode::empty_name, detail::record_tag(i) + ": \"head\" is empty");
    if (trim(record.relation).empty())
      throw Error(ErrorCode::empty_name, detail::record_tag(i) + ": \"relation\" is empty");
    if (trim(record.tail).empty())
      throw Error(ErrorCode::empty_name, detail::record_tag(i) + ": \"tail\" is empty");
    auto count_it = obj.find("paper_count");
    if (count_it == obj.end())
      throw Error(ErrorCode::missing_field, detail::record_tag(i) + ": \"paper_count\"");
    if (!count_it->is_number_integer())
      throw Error(ErrorCode::malformed_json,
                  detail::record_tag(i) + ": \"paper_count\" must be an integer");
    record.paper_count = count_it->get<std::int64_t>();
    if (record.paper_count < 1)
      throw Error(ErrorCode::nonpositive_count,
                  detail::record_tag(i) + ": paper_count " + std::to_string(record.paper_count));
    if (auto it = obj.find("provenance"); it != obj.end()) {
      if (!it->is_string())
        throw Error(ErrorCode::malformed_json,
                    detail::record_tag(i) + ": \"provenance\" must be a string");
      const auto provenance = parse_provenance(it->get<std::string>());
      if (!provenance)
        throw Error(ErrorCode::malformed_json,
                    detail::record_tag(i) + ": unknown provenance \"" +
                        it->get<std::string>() + "\"");
      record.provenance = *provenance;
    }
    records.push_back(std::move(record));
  }
  return records;
}

struct UnresolvedEndpoint {
  std::size_t record_index = 0;
  std::string endpoint;
  std::string side;  // "head" or "tail"
};

struct LoadResult {
  KnowledgeGraph graph;
  std::vector<UnresolvedEndpoint> unresolved;
};

// Entities first, then edges. Endpoints resolve by case-folded canonical
// name or alias, then by ontology identifier. Unresolvable endpoints are
// collected, not thrown; other graph errors propagate. The graph is frozen
// on return unless freeze_on_return is false.
inline LoadResult load_graph(std::span<const NodeRecord> nodes, std::span<const EdgeRecord> edges,
                             bool freeze_on_return = true) {
  LoadResult result;
  for (const NodeRecord& record : nodes) {
    const auto layer = Layer::parse(record.layer);
    if (!layer) throw Error(ErrorCode::invalid_layer, "\"" + record.layer + "\"");
    Entity entity;
    entity.canonical_name = record.name;
    entity.layer = *layer;
    entity.identifier = record.identifier;
    entity.ontology_source = record.source;
    entity.aliases.insert(record.aliases.begin(), record.aliases.end());
    entity.definition = record.definition;
    result.graph.add_entity(std::move(entity));
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const EdgeRecord& record = edges[i];
    auto resolve = [&](const std::string& endpoint) -> std::optional<EntityId> {
      if (auto id = result.graph.resolve_name(endpoint)) return id;
      return result.graph.resolve_identifier(endpoint);
    };
    const auto head = resolve(record.head);
    const auto tail = resolve(record.tail);
    if (!head) result.unresolved.push_back({i, record.head, "head"});
    if (!tail) result.unresolved.push_back({i, record.tail, "tail"});
    if (!head || !tail) continue;
    result.graph.add_triplet(*head, RelationLabel::of(record.relation), *tail,
                             record.paper_count, record.provenance);
  }
  if (freeze_on_return) result.graph.freeze();
  return result;
}

namespace detail {

inline std::string sanitize_filename(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name)
    out.push_back(is_ascii_alnum(c) || c == '_' || c == '-' ? c : '_');
  if (out.empty()) out = "_";
  return out;
}

}  // namespace detail

// Serializes a frozen graph to the release layout: node files partitioned
// by layer under nodes/, edge files partitioned by relation name under
// edges/. Records are sorted by case-folded names, so output is
// byte-stable. Returns relative path -> file contents.
inline std::map<std::string, std::string> export_graph(const KnowledgeGraph& graph) {
  if (!graph.frozen())
    throw Error(ErrorCode::graph_not_frozen, "export requires a frozen graph");

  std::vector<EntityId> ids;
  ids.reserve(graph.entity_count());
  for (const auto& [id, entity] : graph.entities()) ids.push_back(id);
  std::sort(ids.begin(), ids.end(), [&](EntityId a, EntityId b) {
    return fold_case(graph.entity(a).canonical_name) < fold_case(graph.entity(b).canonical_name);
  });

  // The five canonical layer files always exist, even when empty.
  std::map<std::string, nlohmann::json> node_files;
  for (const char* label : {"L1", "L2", "L3", "L4", "L5"})
    node_files.emplace(label, nlohmann::json::array());
  for (EntityId id : ids) {
    const Entity& e = graph.entity(id);
    nlohmann::json obj;
    obj["name"] = e.canonical_name;
    obj["identifier"] = e.identifier;
    obj["source"] = e.ontology_source;
    obj["layer"] = e.layer.label();
    if (!e.aliases.empty()) obj["aliases"] = e.aliases;
    if (!e.definition.empty()) obj["definition"] = e.definition;
    node_files[detail::sanitize_filename(e.layer.label())].push_back(std::move(obj));
  }

  std::vector<std::size_t> order(graph.triplets().size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Triplet& ta = graph.triplets()[a];
    const Triplet& tb = graph.triplets()[b];
    const auto ka = std::tuple{fold_case(graph.entity(ta.head).canonical_name), ta.relation.name,
                               fold_case(graph.entity(ta.tail).canonical_name)};
    const auto kb = std::tuple{fold_case(graph.entity(tb.head).canonical_name), tb.relation.name,
                               fold_case(graph.entity(tb.tail).canonical_name)};
    return ka < kb;
  });
  std::map<std::string, nlohmann::json> edge_files;
  for (std::size_t index : order) {
    const Triplet& t = graph.triplets()[index];
    nlohmann::json obj;
    obj["head"] = graph.entity(t.head).canonical_name;
    obj["relation"] = t.relation.name;
    obj["tail"] = graph.entity(t.tail).canonical_name;
    obj["paper_count"] = t.paper_count;
    obj["provenance"] = provenance_name(t.provenance);
    auto [it, inserted] =
        edge_files.try_emplace(detail::sanitize_filename(t.relation.name), nlohmann::json::array());
    it->second.push_back(std::move(obj));
  }

  std::map<std::string, std::string> files;
  for (const auto& [name, content] : node_files)
    files.emplace("nodes/" + name + ".json", content.dump(2) + "\n");
  for (const auto& [name, content] : edge_files)
    files.emplace("edges/" + name + ".json", content.dump(2) + "\n");
  return files;
}

}  // namespace kgrag
