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

#include <stdexcept>
#include <string>

namespace kgrag {

enum class ErrorCode {
  duplicate_name,
  empty_name,
  unknown_entity,
  self_loop,
  nonpositive_count,
  graph_frozen,
  graph_not_frozen,
  malformed_json,
  missing_field,
  invalid_layer,
  invalid_config,
  empty_mention,
  empty_seed_set,
  empty_graph,
  no_seed_in_candidates,
  zero_vector,
  dangling_triplet,
  empty_subgraph,
  length_mismatch,
  empty_set,
  all_cases_inapplicable,
  io_error,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::duplicate_name: return "DuplicateName";
    case ErrorCode::empty_name: return "EmptyName";
    case ErrorCode::unknown_entity: return "UnknownEntity";
    case ErrorCode::self_loop: return "SelfLoop";
    case ErrorCode::nonpositive_count: return "NonpositiveCount";
    case ErrorCode::graph_frozen: return "GraphFrozen";
    case ErrorCode::graph_not_frozen: return "GraphNotFrozen";
    case ErrorCode::malformed_json: return "MalformedJson";
    case ErrorCode::missing_field: return "MissingField";
    case ErrorCode::invalid_layer: return "InvalidLayer";
    case ErrorCode::invalid_config: return "InvalidConfig";
    case ErrorCode::empty_mention: return "EmptyMention";
    case ErrorCode::empty_seed_set: return "EmptySeedSet";
    case ErrorCode::empty_graph: return "EmptyGraph";
    case ErrorCode::no_seed_in_candidates: return "NoSeedInCandidates";
    case ErrorCode::zero_vector: return "ZeroVector";
    case ErrorCode::dangling_triplet: return "DanglingTriplet";
    case ErrorCode::empty_subgraph: return "EmptySubgraph";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::empty_set: return "EmptySet";
    case ErrorCode::all_cases_inapplicable: return "AllCasesInapplicable";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

// Thrown for contract violations. Operations whose contract collects
// failures (graph loading, candidate commit) report them in their result
// instead of throwing.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kgrag
