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

#include "kgrag/extractor.hpp"

using namespace kgrag;

namespace {

struct ClinicalFixture {
  KnowledgeGraph graph;
  EntityId valproate;
  EntityId stiripentol;
  EntityId dravet;
  EntityId scn1a;

  ClinicalFixture() {
    Entity vpa;
    vpa.canonical_name = "Valproate";
    vpa.layer = Layer::treatment();
    valproate = graph.add_entity(vpa);
    Entity stp;
    stp.canonical_name = "Stiripentol";
    stp.layer = Layer::treatment();
    stiripentol = graph.add_entity(stp);
    Entity drv;
    drv.canonical_name = "Dravet Syndrome";
    drv.layer = Layer::syndrome();
    dravet = graph.add_entity(drv);
    Entity scn;
    scn.canonical_name = "SCN1A";
    scn.layer = Layer::gene();
    scn1a = graph.add_entity(scn);
  }

  std::vector<CandidateTriplet> extract(const std::string& sentence) const {
    const auto links = link_entities(sentence, graph);
    return match_templates(graph, sentence, links, default_templates());
  }
};

CandidateTriplet candidate(EntityId head, const char* relation, EntityId tail,
                           std::int64_t count) {
  CandidateTriplet c;
  c.head = head;
  c.relation = RelationLabel::of(relation);
  c.tail = tail;
  c.paper_count = count;
  return c;
}

}  // namespace

TEST_CASE("match_templates extracts treats from the first-line pattern") {
  const ClinicalFixture fx;
  const auto candidates =
      fx.extract("Valproate is recommended as first-line treatment for Dravet Syndrome");
  REQUIRE(candidates.size() == 1);
  CHECK(candidates[0].head == fx.valproate);
  CHECK(candidates[0].relation.name == "treats");
  CHECK(candidates[0].tail == fx.dravet);
  CHECK(candidates[0].paper_count == 1);
  CHECK(candidates[0].provenance == Provenance::rule_based);
}

TEST_CASE("match_templates extracts both relations from the two-clause sentence") {
  const ClinicalFixture fx;
  const auto candidates = fx.extract(
      "Valproate is recommended as first-line treatment for Dravet Syndrome but should be "
      "avoided in patients with SCN1A gain-of-function variants");
  REQUIRE(candidates.size() == 2);
  CHECK(candidates[0].relation.name == "treats");
  CHECK(candidates[0].tail == fx.dravet);
  CHECK(candidates[1].relation.name == "contraindicated_with");
  CHECK(candidates[1].head == fx.valproate);
  CHECK(candidates[1].tail == fx.scn1a);
}

TEST_CASE("no trigger between the spans means no candidate") {
  const ClinicalFixture fx;
  CHECK(fx.extract("Valproate and Dravet Syndrome were discussed").empty());
}

TEST_CASE("triggers outside the between-span region do not fire") {
  const ClinicalFixture fx;
  // trigger before the first span
  CHECK(fx.extract("It is recommended for many: Valproate was given to Dravet Syndrome patients")
            .empty());
  // trigger after the second span
  CHECK(fx.extract("Valproate was studied in Dravet Syndrome and is recommended for adults")
            .empty());
  // layer order matters: Syndrome before Treatment does not match [Treatment]+[Syndrome]
  CHECK(fx.extract("Dravet Syndrome is recommended for treatment with Valproate").empty());
}

TEST_CASE("resolve_conflicts keeps the higher-count relation") {
  const ClinicalFixture fx;
  std::vector<CandidateTriplet> input{
      candidate(fx.valproate, "treats", fx.dravet, 5),
      candidate(fx.valproate, "contraindicated_with", fx.dravet, 2)};
  const auto resolved = resolve_conflicts(input);
  REQUIRE(resolved.size() == 1);
  CHECK(resolved[0].relation.name == "treats");
  CHECK_FALSE(resolved[0].review_flag);
}

TEST_CASE("resolve_conflicts merges duplicates before resolving") {
  const ClinicalFixture fx;
  std::vector<CandidateTriplet> input{candidate(fx.valproate, "treats", fx.dravet, 3),
                                      candidate(fx.valproate, "treats", fx.dravet, 2)};
  const auto resolved = resolve_conflicts(input);
  REQUIRE(resolved.size() == 1);
  CHECK(resolved[0].paper_count == 5);
}

TEST_CASE("resolve_conflicts retains and flags ties") {
  const ClinicalFixture fx;
  std::vector<CandidateTriplet> input{
      candidate(fx.valproate, "treats", fx.dravet, 3),
      candidate(fx.valproate, "associated_with", fx.dravet, 3)};
  const auto resolved = resolve_conflicts(input);
  REQUIRE(resolved.size() == 2);
  CHECK(resolved[0].review_flag);
  CHECK(resolved[1].review_flag);
}

TEST_CASE("resolve_conflicts never drops a group's maximal member and never grows") {
  const ClinicalFixture fx;
  std::vector<CandidateTriplet> input{
      candidate(fx.valproate, "treats", fx.dravet, 2),
      candidate(fx.valproate, "contraindicated_with", fx.dravet, 4),
      candidate(fx.stiripentol, "treats", fx.dravet, 1),
      candidate(fx.valproate, "contraindicated_with", fx.scn1a, 1)};
  const auto resolved = resolve_conflicts(input);
  REQUIRE(resolved.size() <= input.size());
  bool max_present = false;
  for (const auto& c : resolved)
    if (c.head == fx.valproate && c.tail == fx.dravet &&
        c.relation.name == "contraindicated_with")
      max_present = true;
  REQUIRE(max_present);
}

TEST_CASE("commit_candidates reports inserted, merged, and rejected") {
  ClinicalFixture fx;
  std::vector<CandidateTriplet> input{
      candidate(fx.valproate, "treats", fx.dravet, 3),
      candidate(fx.stiripentol, "treats", fx.dravet, 2),
      candidate(fx.valproate, "contraindicated_with", fx.scn1a, 1)};
  const auto report = commit_candidates(fx.graph, input);
  CHECK(report.inserted == 3);
  CHECK(report.merged == 0);
  CHECK(report.rejected == 0);

  SECTION("duplicate merges") {
    std::vector<CandidateTriplet> again{candidate(fx.valproate, "treats", fx.dravet, 1)};
    const auto second = commit_candidates(fx.graph, again);
    CHECK(second.merged == 1);
    CHECK(second.inserted == 0);
  }
  SECTION("self loop is rejected with a reason") {
    std::vector<CandidateTriplet> bad{candidate(fx.valproate, "treats", fx.valproate, 1)};
    const auto second = commit_candidates(fx.graph, bad);
    CHECK(second.rejected == 1);
    REQUIRE(second.rejection_reasons.size() == 1);
    CHECK(second.rejection_reasons[0].find("SelfLoop") != std::string::npos);
  }
  SECTION("frozen graph is a caller error") {
    fx.graph.freeze();
    CHECK_THROWS_AS(commit_candidates(fx.graph, input), Error);
  }
}

TEST_CASE("committing the same list twice doubles every count via merges") {
  ClinicalFixture fx;
  std::vector<CandidateTriplet> input{candidate(fx.valproate, "treats", fx.dravet, 3),
                                      candidate(fx.stiripentol, "treats", fx.dravet, 2)};
  const auto first = commit_candidates(fx.graph, input);
  REQUIRE(first.inserted == 2);
  const auto second = commit_candidates(fx.graph, input);
  CHECK(second.inserted == 0);
  CHECK(second.merged == 2);
  const auto t0 = fx.graph.find_triplet(fx.valproate, "treats", fx.dravet);
  REQUIRE(t0.has_value());
  CHECK(fx.graph.triplets()[*t0].paper_count == 6);
  const auto t1 = fx.graph.find_triplet(fx.stiripentol, "treats", fx.dravet);
  CHECK(fx.graph.triplets()[*t1].paper_count == 4);
}

TEST_CASE("split_sentences honors the terminator set and abbreviation guard") {
  const auto sentences = split_sentences(
      "Dr. Smith reviewed the chart. Was the EEG abnormal? Yes! "
      "Spike-wave discharges (e.g. at 3 Hz) were seen.");
  REQUIRE(sentences.size() == 4);
  CHECK(sentences[0] == "Dr. Smith reviewed the chart.");
  CHECK(sentences[1] == "Was the EEG abnormal?");
  CHECK(sentences[2] == "Yes!");
  CHECK(sentences[3] == "Spike-wave discharges (e.g. at 3 Hz) were seen.");
}

TEST_CASE("split_sentences keeps trailing text without a terminator") {
  const auto sentences = split_sentences("One sentence. And a dangling tail");
  REQUIRE(sentences.size() == 2);
  CHECK(sentences[1] == "And a dangling tail");
}

TEST_CASE("parse_templates validates layers, phrases, and relation names") {
  const auto templates = parse_templates(
      R"([{"subject_layer":"L4","trigger_phrases":["reduces"],"object_layer":"L5",
           "relation":"reduces_risk_of"}])");
  REQUIRE(templates.size() == 1);
  CHECK(templates[0].subject_layer == Layer::treatment());
  CHECK(templates[0].object_layer == Layer::outcome());
  CHECK_FALSE(templates[0].relation.canonical);

  CHECK_THROWS_AS(parse_templates(
                      R"([{"subject_layer":"L9","trigger_phrases":["x"],
                           "object_layer":"L5","relation":"r"}])"),
                  Error);
  CHECK_THROWS_AS(parse_templates(
                      R"([{"subject_layer":"L4","trigger_phrases":[],
                           "object_layer":"L5","relation":"r"}])"),
                  Error);
}

TEST_CASE("custom templates extend the built-in set") {
  ClinicalFixture fx;
  Entity outcome;
  outcome.canonical_name = "Seizure Freedom";
  outcome.layer = Layer::outcome();
  const EntityId freedom = fx.graph.add_entity(outcome);
  auto templates = default_templates();
  for (auto& tmpl : parse_templates(
           R"([{"subject_layer":"L4","trigger_phrases":["achieves"],"object_layer":"L5",
                "relation":"leads_to"}])"))
    templates.push_back(tmpl);

  const std::string sentence = "Stiripentol achieves durable Seizure Freedom";
  const auto links = link_entities(sentence, fx.graph);
  const auto candidates = match_templates(fx.graph, sentence, links, templates);
  REQUIRE(candidates.size() == 1);
  CHECK(candidates[0].relation.name == "leads_to");
  CHECK(candidates[0].tail == freedom);
}

TEST_CASE("external candidates parse with endpoint resolution and provenance rules") {
  ClinicalFixture fx;
  const auto result = parse_external_candidates(
      R"([{"head":"Valproate","relation":"treats","tail":"Dravet Syndrome","paper_count":4},
          {"head":"Missing","relation":"treats","tail":"Dravet Syndrome"},
          {"head":"Stiripentol","relation":"treats","tail":"Dravet Syndrome",
           "provenance":"rule_based"}])",
      fx.graph);
  REQUIRE(result.candidates.size() == 2);
  CHECK(result.candidates[0].provenance == Provenance::external_extractor);
  CHECK(result.candidates[0].paper_count == 4);
  CHECK(result.candidates[1].provenance == Provenance::rule_based);
  CHECK(result.candidates[1].paper_count == 1);
  REQUIRE(result.unresolved.size() == 1);
  CHECK(result.unresolved[0].endpoint == "Missing");

  CHECK_THROWS_AS(parse_external_candidates(
                      R"([{"head":"Valproate","relation":"r","tail":"SCN1A",
                           "provenance":"manual"}])",
                      fx.graph),
                  Error);
}

TEST_CASE("synthetic mini-corpus extraction is exact") {
  // One sentence per built-in template plus distractors; extraction must
  // recover exactly the generating set.
  KnowledgeGraph graph;
  auto add = [&](const char* name, Layer layer) {
    Entity entity;
    entity.canonical_name = name;
    entity.layer = layer;
    return graph.add_entity(entity);
  };
  const EntityId drug = add("Drugalux", Layer::treatment());
  const EntityId syndrome = add("Synapax", Layer::syndrome());
  const EntityId gene = add("Genorin", Layer::gene());
  const EntityId marker = add("Markerol", Layer::diagnostic());
  const EntityId protein = add("Protexin", Layer::other("Protein"));
  const EntityId region = add("Cortexia", Layer::other("Anatomy"));

  struct Expected {
    std::string sentence;
    EntityId head;
    const char* relation;
    EntityId tail;
  };
  const std::vector<Expected> positives = {
      {"Drugalux is recommended for Synapax", drug, "treats", syndrome},
      {"Drugalux must be avoided when Genorin is present", drug, "contraindicated_with", gene},
      {"Genorin is strongly associated with Synapax", gene, "associated_with", syndrome},
      {"Markerol is characteristic of Synapax", marker, "characteristic_of", syndrome},
      {"Genorin encodes the channel subunit Protexin", gene, "encodes", protein},
      {"Genorin is expressed in the Cortexia", gene, "expressed_in", region}};
  const std::vector<std::string> distractors = {
      "Drugalux was mentioned alongside Synapax without comment",
      "Genorin and Synapax appeared together in the cohort table",
      "Markerol levels near Synapax baselines stayed flat"};

  const auto templates = default_templates();
  for (const auto& expected : positives) {
    const auto links = link_entities(expected.sentence, graph);
    const auto candidates = match_templates(graph, expected.sentence, links, templates);
    REQUIRE(candidates.size() == 1);
    CHECK(candidates[0].head == expected.head);
    CHECK(candidates[0].relation.name == expected.relation);
    CHECK(candidates[0].tail == expected.tail);
  }
  for (const auto& sentence : distractors) {
    const auto links = link_entities(sentence, graph);
    CHECK(match_templates(graph, sentence, links, templates).empty());
  }
}
