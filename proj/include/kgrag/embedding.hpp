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

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgrag/errors.hpp"
#include "kgrag/graph.hpp"
#include "kgrag/strings.hpp"

namespace kgrag {

// Text embedding provider: a fixed dimension declared once, and a function
// mapping a string to a raw (not necessarily normalized) vector of that
// dimension.
class Embedder {
 public:
  using Fn = std::function<std::vector<double>(std::string_view)>;

  Embedder(std::size_t dimension, Fn fn) : dimension_(dimension), fn_(std::move(fn)) {
    if (dimension_ == 0) throw Error(ErrorCode::invalid_config, "embedder dimension must be >= 1");
  }

  std::size_t dimension() const { return dimension_; }

  std::vector<double> embed(std::string_view text) const {
    std::vector<double> v = fn_(text);
    if (v.size() != dimension_)
      throw Error(ErrorCode::invalid_config,
                  "embedder returned dimension " + std::to_string(v.size()) + ", declared " +
                      std::to_string(dimension_));
    return v;
  }

 private:
  std::size_t dimension_;
  Fn fn_;
};

inline std::uint32_t fnv1a32(std::string_view data) {
  std::uint32_t h = 2166136261u;
  for (char c : data) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 16777619u;
  }
  return h;
}

// Built-in deterministic embedder: case-fold, trim, collapse whitespace
// runs, pad with '^'/'$' boundary markers, then feature-hash character
// trigrams (FNV-1a mod dimension) into a count vector. Only empty input
// hashes to the zero vector.
inline Embedder trigram_embedder(std::size_t dimension = 256) {
  return Embedder(dimension, [dimension](std::string_view text) {
    std::vector<double> v(dimension, 0.0);
    std::string s;
    s.reserve(text.size());
    bool pending_space = false;
    for (char c : fold_case(trim(text))) {
      if (is_ascii_space(c)) {
        pending_space = !s.empty();
        continue;
      }
      if (pending_space) s.push_back(' ');
      pending_space = false;
      s.push_back(c);
    }
    if (s.empty()) return v;
    const std::string padded = "^" + s + "$";
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i)
      v[fnv1a32(std::string_view(padded).substr(i, 3)) % dimension] += 1.0;
    return v;
  });
}

inline double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::length_mismatch, "cosine over vectors of different dimension");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline std::vector<double> l2_normalized(std::vector<double> v) {
  double norm_sq = 0.0;
  for (double x : v) norm_sq += x * x;
  if (norm_sq == 0.0) throw Error(ErrorCode::zero_vector, "cannot normalize the zero vector");
  const double norm = std::sqrt(norm_sq);
  for (double& x : v) x /= norm;
  return v;
}

// Embeds canonical_name + " " + definition, unit-normalized.
inline std::vector<double> embed_node(const Entity& entity, const Embedder& embedder) {
  if (trim(entity.canonical_name).empty())
    throw Error(ErrorCode::empty_name, "entity canonical_name must be non-empty");
  return l2_normalized(embedder.embed(entity.canonical_name + " " + entity.definition));
}

// Precomputed unit-norm node vectors, built once over a frozen graph and
// shared read-only by the retrieval operations.
class EmbeddingIndex {
 public:
  static EmbeddingIndex build(const KnowledgeGraph& graph, Embedder embedder) {
    EmbeddingIndex index(std::move(embedder));
    for (const auto& [id, entity] : graph.entities()) {
      try {
        index.vectors_.emplace(id, embed_node(entity, index.embedder_));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::zero_vector) throw;
        // Unembeddable entities are simply never ranked.
      }
    }
    return index;
  }

  const Embedder& embedder() const { return embedder_; }
  const std::map<EntityId, std::vector<double>>& vectors() const { return vectors_; }

  // Unit-normalized embedding of free text; nullopt when the embedder
  // yields the zero vector.
  std::optional<std::vector<double>> embed_text(std::string_view text) const {
    std::vector<double> v = embedder_.embed(text);
    double norm_sq = 0.0;
    for (double x : v) norm_sq += x * x;
    if (norm_sq == 0.0) return std::nullopt;
    const double norm = std::sqrt(norm_sq);
    for (double& x : v) x /= norm;
    return v;
  }

 private:
  explicit EmbeddingIndex(Embedder embedder) : embedder_(std::move(embedder)) {}

  Embedder embedder_;
  std::map<EntityId, std::vector<double>> vectors_;
};

}  // namespace kgrag
