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

// kgrag: build, query, extend, and evaluate evidence-weighted knowledge
// graphs from the command line.
//
//   build     load node/edge JSON files, freeze, export, print statistics
//   retrieve  run graph retrieval for a query and print reasoning paths
//   extract   run rule-based relation extraction over sentences
//   eval      compute evaluation metrics (top1, rouge-l, kgec, dfs, gc)
//
// JSON goes to stdout, diagnostics to stderr. Exit codes: 0 success,
// 1 domain error, 2 usage or parse error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kgrag/kgrag.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int classify_exit_code(const kgrag::Error& error) {
  switch (error.code()) {
    case kgrag::ErrorCode::malformed_json:
    case kgrag::ErrorCode::missing_field:
    case kgrag::ErrorCode::invalid_layer:
    case kgrag::ErrorCode::invalid_config:
    case kgrag::ErrorCode::io_error:
    case kgrag::ErrorCode::nonpositive_count:
    case kgrag::ErrorCode::empty_name:
    case kgrag::ErrorCode::duplicate_name:
    case kgrag::ErrorCode::length_mismatch:
      return 2;
    default:
      return 1;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw kgrag::Error(kgrag::ErrorCode::io_error, "cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw kgrag::Error(kgrag::ErrorCode::io_error, "cannot write " + path.string());
  out << content;
  if (!out) throw kgrag::Error(kgrag::ErrorCode::io_error, "write failed for " + path.string());
}

std::vector<std::string> sorted_json_files(const fs::path& dir) {
  if (!fs::is_directory(dir))
    throw kgrag::Error(kgrag::ErrorCode::io_error, "not a directory: " + dir.string());
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

struct ParsedGraphFiles {
  std::vector<kgrag::NodeRecord> nodes;
  std::vector<kgrag::EdgeRecord> edges;
};

ParsedGraphFiles parse_graph_files(const std::vector<std::string>& node_files,
                                   const std::vector<std::string>& edge_files) {
  ParsedGraphFiles parsed;
  for (const std::string& path : node_files) {
    try {
      auto records = kgrag::parse_nodes(read_file(path));
      parsed.nodes.insert(parsed.nodes.end(), records.begin(), records.end());
    } catch (const kgrag::Error& e) {
      throw kgrag::Error(e.code(), path + ": " + e.what());
    }
  }
  for (const std::string& path : edge_files) {
    try {
      auto records = kgrag::parse_edges(read_file(path));
      parsed.edges.insert(parsed.edges.end(), records.begin(), records.end());
    } catch (const kgrag::Error& e) {
      throw kgrag::Error(e.code(), path + ": " + e.what());
    }
  }
  return parsed;
}

kgrag::LoadResult load_graph_dir(const std::string& dir, bool freeze_on_return = true) {
  const ParsedGraphFiles parsed = parse_graph_files(sorted_json_files(fs::path(dir) / "nodes"),
                                                    sorted_json_files(fs::path(dir) / "edges"));
  return kgrag::load_graph(parsed.nodes, parsed.edges, freeze_on_return);
}

void report_unresolved(const std::vector<kgrag::UnresolvedEndpoint>& unresolved) {
  for (const auto& endpoint : unresolved)
    std::cerr << "unresolved " << endpoint.side << " \"" << endpoint.endpoint
              << "\" (edge record " << endpoint.record_index << ")\n";
}

json stats_to_json(const kgrag::GraphStats& stats) {
  json doc;
  doc["node_count"] = stats.node_count;
  doc["edge_count"] = stats.edge_count;
  doc["per_layer_node_counts"] = stats.per_layer_node_counts;
  doc["per_relation_edge_counts"] = stats.per_relation_edge_counts;
  doc["cross_layer_count"] = stats.cross_layer_count;
  doc["cross_layer_fraction"] = stats.cross_layer_fraction;
  doc["median_paper_count"] = stats.median_paper_count;
  doc["flagged_count"] = stats.flagged_count;
  doc["empty"] = stats.empty;
  return doc;
}

json graph_to_json(const kgrag::KnowledgeGraph& graph) {
  std::vector<kgrag::EntityId> ids;
  for (const auto& [id, entity] : graph.entities()) ids.push_back(id);
  std::sort(ids.begin(), ids.end(), [&](kgrag::EntityId a, kgrag::EntityId b) {
    return kgrag::fold_case(graph.entity(a).canonical_name) <
           kgrag::fold_case(graph.entity(b).canonical_name);
  });
  json nodes = json::array();
  for (kgrag::EntityId id : ids) {
    const kgrag::Entity& e = graph.entity(id);
    json obj;
    obj["name"] = e.canonical_name;
    obj["identifier"] = e.identifier;
    obj["source"] = e.ontology_source;
    obj["layer"] = e.layer.label();
    if (!e.aliases.empty()) obj["aliases"] = e.aliases;
    if (!e.definition.empty()) obj["definition"] = e.definition;
    nodes.push_back(std::move(obj));
  }

  std::vector<std::size_t> order(graph.triplets().size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const kgrag::Triplet& ta = graph.triplets()[a];
    const kgrag::Triplet& tb = graph.triplets()[b];
    const auto ka = std::tuple{kgrag::fold_case(graph.entity(ta.head).canonical_name),
                               ta.relation.name,
                               kgrag::fold_case(graph.entity(ta.tail).canonical_name)};
    const auto kb = std::tuple{kgrag::fold_case(graph.entity(tb.head).canonical_name),
                               tb.relation.name,
                               kgrag::fold_case(graph.entity(tb.tail).canonical_name)};
    return ka < kb;
  });
  json edges = json::array();
  for (std::size_t index : order) {
    const kgrag::Triplet& t = graph.triplets()[index];
    json obj;
    obj["head"] = graph.entity(t.head).canonical_name;
    obj["relation"] = t.relation.name;
    obj["tail"] = graph.entity(t.tail).canonical_name;
    obj["paper_count"] = t.paper_count;
    obj["provenance"] = kgrag::provenance_name(t.provenance);
    obj["low_evidence"] = t.low_evidence;
    edges.push_back(std::move(obj));
  }

  json doc;
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  return doc;
}

void print_json(const json& doc) { std::cout << doc.dump(2) << "\n"; }

void export_to_directory(const kgrag::KnowledgeGraph& graph, const std::string& out_dir) {
  for (const auto& [relative, content] : kgrag::export_graph(graph))
    write_file(fs::path(out_dir) / relative, content);
}

struct RetrieveOptions {
  std::string graph_dir;
  std::string query;
  std::string json_out;
  std::string config_path;
  double alpha = 0.15;
  std::size_t max_nodes = 30;
  std::size_t max_depth = 4;
  std::size_t top_k = 10;
  std::string mode = "ppr_pcst";
};

int cmd_build(const std::vector<std::string>& node_files,
              const std::vector<std::string>& edge_files, const std::string& out_dir) {
  const ParsedGraphFiles parsed = parse_graph_files(node_files, edge_files);
  kgrag::LoadResult loaded = kgrag::load_graph(parsed.nodes, parsed.edges);
  export_to_directory(loaded.graph, out_dir);
  print_json(stats_to_json(loaded.graph.compute_stats()));
  if (!loaded.unresolved.empty()) {
    report_unresolved(loaded.unresolved);
    return 1;
  }
  return 0;
}

int cmd_retrieve(const RetrieveOptions& options, const CLI::App* sub) {
  kgrag::RunConfig config;
  if (!options.config_path.empty())
    config = kgrag::parse_run_config(read_file(options.config_path));
  if (sub->count("--alpha")) config.retrieval.alpha = options.alpha;
  if (sub->count("--max-nodes")) config.retrieval.max_nodes = options.max_nodes;
  if (sub->count("--max-depth")) config.retrieval.max_depth = options.max_depth;
  if (sub->count("--top-k")) config.retrieval.top_k = options.top_k;
  if (sub->count("--mode")) {
    const auto mode = kgrag::parse_retrieval_mode(options.mode);
    if (!mode)
      throw kgrag::Error(kgrag::ErrorCode::invalid_config,
                         "unknown mode \"" + options.mode + "\"");
    config.retrieval.mode = *mode;
  }
  if (sub->count("--graph")) config.graph_dir = options.graph_dir;
  if (sub->count("--json")) config.json_out = options.json_out;
  config.validate();
  if (config.graph_dir.empty())
    throw kgrag::Error(kgrag::ErrorCode::invalid_config,
                       "no graph directory (--graph flag or graph_dir config key)");

  kgrag::LoadResult loaded = load_graph_dir(config.graph_dir);
  const auto index = kgrag::EmbeddingIndex::build(loaded.graph, kgrag::trigram_embedder());
  const kgrag::RetrievalResult result =
      kgrag::retrieve(loaded.graph, options.query, config.retrieval, index, config.normalizer);

  for (const std::string& warning : result.warnings) std::cerr << "warning: " << warning << "\n";
  if (!result.serialized_context.empty()) std::cout << result.serialized_context << "\n";

  if (!config.json_out.empty()) {
    json doc = graph_to_json(result.subgraph);
    doc["mode"] = kgrag::retrieval_mode_name(result.mode_used);
    json seeds = json::array();
    for (kgrag::EntityId seed : result.seeds)
      seeds.push_back(result.subgraph.entity(seed).canonical_name);
    doc["seeds"] = std::move(seeds);
    json paths = json::array();
    for (const kgrag::ReasoningPath& path : result.paths)
      paths.push_back(kgrag::serialize_path(path, result.subgraph));
    doc["paths"] = std::move(paths);
    doc["warnings"] = result.warnings;
    write_file(fs::path(config.json_out), doc.dump(2) + "\n");
  }
  return 0;
}

json candidate_to_json(const kgrag::KnowledgeGraph& graph, const kgrag::CandidateTriplet& c) {
  json obj;
  obj["head"] = graph.entity(c.head).canonical_name;
  obj["relation"] = c.relation.name;
  obj["tail"] = graph.entity(c.tail).canonical_name;
  obj["paper_count"] = c.paper_count;
  obj["provenance"] = kgrag::provenance_name(c.provenance);
  obj["flagged"] = c.review_flag;
  if (!c.source_sentence.empty()) obj["sentence"] = c.source_sentence;
  return obj;
}

int cmd_extract(const std::string& graph_dir, const std::string& sentences_path,
                const std::string& templates_path, const std::string& external_path, bool commit,
                const std::string& out_dir) {
  kgrag::LoadResult loaded = load_graph_dir(graph_dir, /*freeze_on_return=*/!commit);
  kgrag::KnowledgeGraph& graph = loaded.graph;

  std::vector<kgrag::TriggerTemplate> templates = templates_path.empty()
                                                      ? kgrag::default_templates()
                                                      : kgrag::parse_templates(read_file(templates_path));

  const std::vector<std::string> sentences = kgrag::split_sentences(read_file(sentences_path));
  std::vector<kgrag::CandidateTriplet> candidates;
  for (const std::string& sentence : sentences) {
    const auto links = kgrag::link_entities(sentence, graph);
    auto found = kgrag::match_templates(graph, sentence, links, templates);
    candidates.insert(candidates.end(), found.begin(), found.end());
  }

  json unresolved_external = json::array();
  if (!external_path.empty()) {
    const auto external = kgrag::parse_external_candidates(read_file(external_path), graph);
    candidates.insert(candidates.end(), external.candidates.begin(), external.candidates.end());
    for (const auto& endpoint : external.unresolved) {
      json obj;
      obj["record"] = endpoint.record_index;
      obj["side"] = endpoint.side;
      obj["endpoint"] = endpoint.endpoint;
      unresolved_external.push_back(std::move(obj));
    }
  }

  const std::vector<kgrag::CandidateTriplet> resolved = kgrag::resolve_conflicts(candidates);
  std::set<std::tuple<kgrag::EntityId, std::string, kgrag::EntityId>> kept;
  for (const auto& candidate : resolved)
    kept.insert({candidate.head, candidate.relation.name, candidate.tail});

  json doc;
  doc["sentences"] = sentences.size();
  json accepted = json::array();
  for (const auto& candidate : resolved) accepted.push_back(candidate_to_json(graph, candidate));
  doc["accepted"] = std::move(accepted);
  json rejected = json::array();
  {
    // Report conflict losers: merged candidates that did not survive.
    std::set<std::tuple<kgrag::EntityId, std::string, kgrag::EntityId>> seen;
    for (const auto& candidate : candidates) {
      const auto key = std::tuple{candidate.head, candidate.relation.name, candidate.tail};
      if (kept.count(key) || !seen.insert(key).second) continue;
      json obj = candidate_to_json(graph, candidate);
      obj["reason"] = "conflict";
      rejected.push_back(std::move(obj));
    }
  }
  doc["rejected"] = std::move(rejected);
  if (!external_path.empty()) doc["unresolved_external"] = std::move(unresolved_external);

  if (commit) {
    const kgrag::CommitReport report = kgrag::commit_candidates(graph, resolved);
    graph.freeze();
    if (!out_dir.empty()) export_to_directory(graph, out_dir);
    json commit_doc;
    commit_doc["inserted"] = report.inserted;
    commit_doc["merged"] = report.merged;
    commit_doc["rejected"] = report.rejected;
    commit_doc["reasons"] = report.rejection_reasons;
    doc["commit"] = std::move(commit_doc);
  }
  print_json(doc);
  return 0;
}

std::vector<std::string> parse_string_array(const std::string& text, const std::string& what) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw kgrag::Error(kgrag::ErrorCode::malformed_json, what + ": " + e.what());
  }
  if (!doc.is_array())
    throw kgrag::Error(kgrag::ErrorCode::malformed_json, what + " must be a JSON array");
  std::vector<std::string> out;
  for (const auto& value : doc) {
    if (!value.is_string())
      throw kgrag::Error(kgrag::ErrorCode::malformed_json, what + " must contain only strings");
    out.push_back(value.get<std::string>());
  }
  return out;
}

int cmd_eval(const std::string& metric, const std::map<std::string, std::string>& inputs) {
  auto require = [&](const std::string& key) -> const std::string& {
    auto it = inputs.find(key);
    if (it == inputs.end() || it->second.empty())
      throw kgrag::Error(kgrag::ErrorCode::missing_field,
                         "metric " + metric + " requires --" + key);
    return it->second;
  };

  json doc;
  doc["metric"] = metric;
  if (metric == "top1") {
    const auto items = kgrag::parse_mcq_items(read_file(require("items")));
    const auto responses = parse_string_array(read_file(require("responses")), "responses");
    const auto result = kgrag::top1_accuracy(items, responses);
    doc["value"] = result.value;
    doc["correct"] = result.correct;
    doc["total"] = result.total;
  } else if (metric == "rouge-l") {
    const auto candidates = parse_string_array(read_file(require("candidates")), "candidates");
    const auto references = parse_string_array(read_file(require("references")), "references");
    if (candidates.size() != references.size())
      throw kgrag::Error(kgrag::ErrorCode::length_mismatch,
                         std::to_string(candidates.size()) + " candidates vs " +
                             std::to_string(references.size()) + " references");
    if (candidates.empty())
      throw kgrag::Error(kgrag::ErrorCode::empty_set, "no pairs to score");
    double precision = 0.0, recall = 0.0, f1 = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const auto score = kgrag::rouge_l(candidates[i], references[i]);
      precision += score.precision;
      recall += score.recall;
      f1 += score.f1;
    }
    const double n = static_cast<double>(candidates.size());
    doc["precision"] = precision / n;
    doc["recall"] = recall / n;
    doc["f1"] = f1 / n;
    doc["pairs"] = candidates.size();
  } else if (metric == "kgec") {
    json subgraph_doc;
    try {
      subgraph_doc = json::parse(read_file(require("subgraph")));
    } catch (const json::parse_error& e) {
      throw kgrag::Error(kgrag::ErrorCode::malformed_json, e.what());
    }
    if (!subgraph_doc.is_object() || !subgraph_doc.contains("nodes"))
      throw kgrag::Error(kgrag::ErrorCode::malformed_json,
                         "subgraph JSON must be an object with a \"nodes\" array");
    const auto nodes = kgrag::parse_nodes(subgraph_doc["nodes"].dump());
    kgrag::LoadResult subgraph = kgrag::load_graph(nodes, {});
    kgrag::LoadResult parent = load_graph_dir(require("graph"));
    const std::string text = read_file(require("text"));
    const auto result = kgrag::kg_evidence_coverage(subgraph.graph, text, parent.graph);
    doc["value"] = result.value;
    doc["mentioned"] = result.mentioned;
    doc["entities"] = result.entities;
  } else if (metric == "dfs" || metric == "gc") {
    const auto cases = kgrag::parse_cases(read_file(require("cases")));
    const auto rules = kgrag::parse_rules(read_file(require("rules")));
    if (metric == "dfs") {
      const auto result = kgrag::drug_safety_score(cases, rules);
      doc["value"] = result.value;
      doc["safe"] = result.safe;
      doc["total"] = result.total;
    } else {
      const auto result = kgrag::guideline_concordance(cases, rules);
      doc["value"] = result.value;
      doc["concordant"] = result.concordant;
      doc["applicable"] = result.applicable;
      doc["excluded"] = result.excluded;
    }
  } else {
    throw kgrag::Error(kgrag::ErrorCode::invalid_config, "unknown metric \"" + metric + "\"");
  }
  print_json(doc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evidence-weighted knowledge-graph engine with graph retrieval"};
  app.require_subcommand(1);

  // build
  auto* build = app.add_subcommand("build", "Load node/edge JSON files, export, print statistics");
  std::vector<std::string> node_files, edge_files;
  std::string out_dir;
  build->add_option("--nodes", node_files, "Node JSON files")->required()->expected(-1);
  build->add_option("--edges", edge_files, "Edge JSON files")->expected(-1);
  build->add_option("--out", out_dir, "Output directory for the exported graph")->required();

  // retrieve
  auto* retrieve = app.add_subcommand("retrieve", "Retrieve a subgraph and reasoning paths");
  RetrieveOptions retrieve_options;
  retrieve->add_option("--graph", retrieve_options.graph_dir, "Graph directory (from build)");
  retrieve->add_option("--query", retrieve_options.query, "Query text")->required();
  retrieve->add_option("--json", retrieve_options.json_out, "Write subgraph JSON to this path");
  retrieve->add_option("--config", retrieve_options.config_path, "JSON config file");
  retrieve->add_option("--alpha", retrieve_options.alpha, "PPR restart probability")
      ->capture_default_str();
  retrieve->add_option("--max-nodes", retrieve_options.max_nodes, "Subgraph node budget")
      ->capture_default_str();
  retrieve->add_option("--max-depth", retrieve_options.max_depth, "Hop limit")
      ->capture_default_str();
  retrieve->add_option("--top-k", retrieve_options.top_k, "Semantic candidate count")
      ->capture_default_str();
  retrieve->add_option("--mode", retrieve_options.mode, "ppr_pcst, semantic, or hybrid")
      ->capture_default_str();

  // extract
  auto* extract = app.add_subcommand("extract", "Rule-based relation extraction over sentences");
  std::string extract_graph, sentences_path, templates_path, external_path, extract_out;
  bool commit = false;
  extract->add_option("--graph", extract_graph, "Graph directory (from build)")->required();
  extract->add_option("--sentences", sentences_path, "Plain-text file; split on . ! ?")->required();
  extract->add_option("--templates", templates_path,
                      "Template JSON file (defaults to the built-in six)");
  extract->add_option("--external", external_path, "External-extractor candidate JSON file");
  extract->add_flag("--commit", commit, "Commit accepted candidates into a new graph export");
  extract->add_option("--out", extract_out, "Output directory for the committed graph");

  // eval
  auto* eval = app.add_subcommand("eval", "Compute evaluation metrics");
  std::string metric;
  std::map<std::string, std::string> eval_inputs{{"items", ""},      {"responses", ""},
                                                 {"candidates", ""}, {"references", ""},
                                                 {"subgraph", ""},   {"text", ""},
                                                 {"graph", ""},      {"cases", ""},
                                                 {"rules", ""}};
  eval->add_option("--metric", metric, "top1, rouge-l, kgec, dfs, or gc")->required();
  eval->add_option("--items", eval_inputs["items"], "MCQ items JSON (top1)");
  eval->add_option("--responses", eval_inputs["responses"], "Responses JSON array (top1)");
  eval->add_option("--candidates", eval_inputs["candidates"], "Candidate strings JSON (rouge-l)");
  eval->add_option("--references", eval_inputs["references"], "Reference strings JSON (rouge-l)");
  eval->add_option("--subgraph", eval_inputs["subgraph"], "Subgraph JSON from retrieve (kgec)");
  eval->add_option("--text", eval_inputs["text"], "Generated output text file (kgec)");
  eval->add_option("--graph", eval_inputs["graph"], "Graph directory (kgec)");
  eval->add_option("--cases", eval_inputs["cases"], "Cases JSON (dfs, gc)");
  eval->add_option("--rules", eval_inputs["rules"], "Rule table JSON (dfs, gc)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (build->parsed()) return cmd_build(node_files, edge_files, out_dir);
    if (retrieve->parsed()) return cmd_retrieve(retrieve_options, retrieve);
    if (extract->parsed()) {
      if (commit && extract_out.empty())
        throw kgrag::Error(kgrag::ErrorCode::invalid_config, "--commit requires --out");
      return cmd_extract(extract_graph, sentences_path, templates_path, external_path, commit,
                         extract_out);
    }
    if (eval->parsed()) return cmd_eval(metric, eval_inputs);
  } catch (const kgrag::Error& e) {
    std::cerr << e.what() << "\n";
    return classify_exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
