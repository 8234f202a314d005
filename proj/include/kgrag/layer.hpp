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

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "kgrag/errors.hpp"
#include "kgrag/strings.hpp"

namespace kgrag {

// Entity layer: one of the five clinical strata (L1 Syndrome, L2 Diagnostic,
// L3 Gene, L4 Treatment, L5 Outcome) or an auxiliary category carrying a
// free-form tag such as "Protein" or "Anatomy".
class Layer {
 public:
  enum class Category { syndrome, diagnostic, gene, treatment, outcome, other };

  Layer() = default;

  static Layer syndrome() { return Layer(Category::syndrome); }
  static Layer diagnostic() { return Layer(Category::diagnostic); }
  static Layer gene() { return Layer(Category::gene); }
  static Layer treatment() { return Layer(Category::treatment); }
  static Layer outcome() { return Layer(Category::outcome); }

  static Layer other(std::string tag) {
    if (trim(tag).empty())
      throw Error(ErrorCode::invalid_layer, "auxiliary layer tag must be non-empty");
    Layer layer(Category::other);
    layer.tag_ = std::move(tag);
    return layer;
  }

  // Accepts "L1".."L5", the layer names (case-insensitive), or a free
  // auxiliary tag. "L<digits>" outside L1..L5 is rejected so typos like
  // "L9" surface as errors instead of becoming tags.
  static std::optional<Layer> parse(std::string_view text) {
    const std::string_view t = trim(text);
    if (t.empty()) return std::nullopt;
    const std::string folded = fold_case(t);
    if (folded == "l1" || folded == "syndrome") return syndrome();
    if (folded == "l2" || folded == "diagnostic") return diagnostic();
    if (folded == "l3" || folded == "gene") return gene();
    if (folded == "l4" || folded == "treatment") return treatment();
    if (folded == "l5" || folded == "outcome") return outcome();
    if (folded.size() >= 2 && folded[0] == 'l') {
      bool digits = true;
      for (std::size_t i = 1; i < folded.size(); ++i)
        if (folded[i] < '0' || folded[i] > '9') digits = false;
      if (digits) return std::nullopt;
    }
    return other(std::string(t));
  }

  Category category() const { return category_; }
  bool is_other() const { return category_ == Category::other; }
  const std::string& tag() const { return tag_; }

  // "L1".."L5" for the canonical strata, the tag otherwise. Used as the
  // serialized layer string and as the per-layer statistics key.
  std::string label() const {
    switch (category_) {
      case Category::syndrome: return "L1";
      case Category::diagnostic: return "L2";
      case Category::gene: return "L3";
      case Category::treatment: return "L4";
      case Category::outcome: return "L5";
      case Category::other: return tag_;
    }
    return tag_;
  }

  friend bool operator==(const Layer& a, const Layer& b) {
    return a.category_ == b.category_ && a.tag_ == b.tag_;
  }
  friend bool operator!=(const Layer& a, const Layer& b) { return !(a == b); }

 private:
  explicit Layer(Category category) : category_(category) {}

  Category category_ = Category::syndrome;
  std::string tag_;
};

}  // namespace kgrag
