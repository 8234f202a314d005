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

#include <string>
#include <string_view>

#include <json.hpp>

#include "kgrag/errors.hpp"
#include "kgrag/normalizer.hpp"
#include "kgrag/retrieval.hpp"

namespace kgrag {

// Batch-run configuration: the retrieval and normalizer knobs plus optional
// input/output paths, round-trippable through a JSON config file.
struct RunConfig {
  RetrievalConfig retrieval;
  NormalizerConfig normalizer;
  std::string graph_dir;
  std::string out_dir;
  std::string json_out;

  void validate() const {
    retrieval.validate();
    normalizer.validate();
  }
};

inline nlohmann::json run_config_to_json(const RunConfig& config) {
  nlohmann::json doc;
  doc["alpha"] = config.retrieval.alpha;
  doc["max_nodes"] = config.retrieval.max_nodes;
  doc["max_depth"] = config.retrieval.max_depth;
  doc["top_k"] = config.retrieval.top_k;
  doc["ppr_tolerance"] = config.retrieval.ppr_tolerance;
  doc["ppr_max_iterations"] = config.retrieval.ppr_max_iterations;
  doc["mode"] = retrieval_mode_name(config.retrieval.mode);
  doc["fuzzy_threshold"] = config.normalizer.fuzzy_threshold;
  doc["semantic_threshold"] = config.normalizer.semantic_threshold;
  doc["link_confidence"] = config.normalizer.link_confidence;
  if (!config.graph_dir.empty()) doc["graph_dir"] = config.graph_dir;
  if (!config.out_dir.empty()) doc["out_dir"] = config.out_dir;
  if (!config.json_out.empty()) doc["json_out"] = config.json_out;
  return doc;
}

// Unknown keys are rejected so config typos do not silently fall back to
// defaults.
inline RunConfig parse_run_config(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::malformed_json, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::malformed_json, "config must be a JSON object");

  RunConfig config;
  for (const auto& [key, value] : doc.items()) {
    auto number = [&](const char* name) {
      if (!value.is_number())
        throw Error(ErrorCode::malformed_json, std::string("config ") + name + " must be a number");
      return value.get<double>();
    };
    auto positive_integer = [&](const char* name) {
      if (!value.is_number_integer() || value.get<std::int64_t>() < 1)
        throw Error(ErrorCode::malformed_json,
                    std::string("config ") + name + " must be a positive integer");
      return static_cast<std::size_t>(value.get<std::int64_t>());
    };
    auto string_value = [&](const char* name) {
      if (!value.is_string())
        throw Error(ErrorCode::malformed_json, std::string("config ") + name + " must be a string");
      return value.get<std::string>();
    };
    if (key == "alpha") config.retrieval.alpha = number("alpha");
    else if (key == "max_nodes") config.retrieval.max_nodes = positive_integer("max_nodes");
    else if (key == "max_depth") config.retrieval.max_depth = positive_integer("max_depth");
    else if (key == "top_k") config.retrieval.top_k = positive_integer("top_k");
    else if (key == "ppr_tolerance") config.retrieval.ppr_tolerance = number("ppr_tolerance");
    else if (key == "ppr_max_iterations")
      config.retrieval.ppr_max_iterations = positive_integer("ppr_max_iterations");
    else if (key == "mode") {
      const auto mode = parse_retrieval_mode(string_value("mode"));
      if (!mode)
        throw Error(ErrorCode::invalid_config, "unknown mode \"" + string_value("mode") + "\"");
      config.retrieval.mode = *mode;
    } else if (key == "fuzzy_threshold")
      config.normalizer.fuzzy_threshold = number("fuzzy_threshold");
    else if (key == "semantic_threshold")
      config.normalizer.semantic_threshold = number("semantic_threshold");
    else if (key == "link_confidence")
      config.normalizer.link_confidence = number("link_confidence");
    else if (key == "graph_dir") config.graph_dir = string_value("graph_dir");
    else if (key == "out_dir") config.out_dir = string_value("out_dir");
    else if (key == "json_out") config.json_out = string_value("json_out");
    else
      throw Error(ErrorCode::invalid_config, "unknown config key \"" + key + "\"");
  }
  config.validate();
  return config;
}

}  // namespace kgrag
