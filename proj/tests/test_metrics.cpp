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

#include <algorithm>
#include <random>

#include "kgrag/metrics.hpp"
#include "support/oracles.hpp"

using namespace kgrag;

namespace {

McqItem stiripentol_item() {
  McqItem item;
  item.id = "q1";
  item.options = {{"A", "Carbamazepine"}, {"B", "Stiripentol"}, {"C", "Phenytoin"}};
  item.gold_label = "B";
  return item;
}

std::vector<std::string> random_tokens(std::mt19937& rng, std::size_t max_len) {
  static const std::vector<std::string> vocab = {"a", "b", "c", "d", "e"};
  std::vector<std::string> tokens;
  const std::size_t length = rng() % (max_len + 1);
  for (std::size_t i = 0; i < length; ++i) tokens.push_back(vocab[rng() % vocab.size()]);
  return tokens;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += " ";
    out += tokens[i];
  }
  return out;
}

GuidelineRule rule(std::vector<std::string> context, std::vector<std::string> recommended,
                   std::vector<std::string> contraindicated) {
  GuidelineRule r;
  r.context = std::move(context);
  r.recommended = std::move(recommended);
  r.contraindicated = std::move(contraindicated);
  return r;
}

EvalCase eval_case(std::vector<std::string> context, std::vector<std::string> recommended) {
  EvalCase c;
  c.context = std::move(context);
  c.recommended = std::move(recommended);
  return c;
}

}  // namespace

TEST_CASE("extract_choice handles the letter formatting variants") {
  const McqItem item = stiripentol_item();
  for (const char* variant : {"B", "B)", "B.", "(B)", "Answer: B"})
    CHECK(extract_choice(variant, item.options) == std::optional<std::string>("B"));
}

TEST_CASE("extract_choice falls back to the option text") {
  const McqItem item = stiripentol_item();
  CHECK(extract_choice("The correct choice is Stiripentol", item.options) ==
        std::optional<std::string>("B"));
  CHECK(extract_choice("the correct choice is stiripentol", item.options) ==
        std::optional<std::string>("B"));
}

TEST_CASE("extract_choice returns nothing when no option matches") {
  const McqItem item = stiripentol_item();
  CHECK_FALSE(extract_choice("no idea", item.options).has_value());
  // lowercase letters and letters inside words do not count
  CHECK_FALSE(extract_choice("maybe b or something", item.options).has_value());
  CHECK_FALSE(extract_choice("ABsolutely unclear", item.options).has_value());
}

TEST_CASE("extract_choice takes the first standalone letter") {
  const McqItem item = stiripentol_item();
  CHECK(extract_choice("A then B", item.options) == std::optional<std::string>("A"));
  CHECK(extract_choice("Answer: B) Stiripentol", item.options) ==
        std::optional<std::string>("B"));
}

TEST_CASE("top1_accuracy counts absent extractions as incorrect") {
  const std::vector<McqItem> items(4, stiripentol_item());

  SECTION("all correct") {
    const std::vector<std::string> responses(4, "B");
    CHECK(top1_accuracy(items, responses).value == Catch::Approx(1.0));
  }
  SECTION("none correct") {
    const std::vector<std::string> responses(4, "A");
    CHECK(top1_accuracy(items, responses).value == Catch::Approx(0.0));
  }
  SECTION("three of four") {
    const std::vector<std::string> responses{"B", "B)", "Answer: B", "no idea"};
    CHECK(top1_accuracy(items, responses).value == Catch::Approx(0.75));
  }
  SECTION("length mismatch and empty sets are errors") {
    const std::vector<std::string> two(2, "B");
    CHECK_THROWS_AS(top1_accuracy(items, two), Error);
    CHECK_THROWS_AS(top1_accuracy({}, {}), Error);
  }
}

TEST_CASE("rouge_l fixtures") {
  CHECK(rouge_l("same text", "same text").f1 == Catch::Approx(1.0));
  CHECK(rouge_l("alpha beta", "gamma delta").f1 == Catch::Approx(0.0));
  CHECK(rouge_l("", "reference").f1 == 0.0);
  CHECK(rouge_l("candidate", "").precision == 0.0);

  const RougeScore score = rouge_l("the cat sat", "the cat ran");
  CHECK(score.precision == Catch::Approx(2.0 / 3.0).margin(1e-12));
  CHECK(score.recall == Catch::Approx(2.0 / 3.0).margin(1e-12));
  CHECK(score.f1 == Catch::Approx(2.0 / 3.0).margin(1e-12));
}

TEST_CASE("rouge_l tokenization folds case and strips punctuation") {
  CHECK(rouge_l("The CAT, sat!", "the cat sat").f1 == Catch::Approx(1.0));
}

TEST_CASE("rouge_l equals the recursive DP oracle on random pairs") {
  std::mt19937 rng(777);
  for (int round = 0; round < 300; ++round) {
    const auto cand = random_tokens(rng, 12);
    const auto ref = random_tokens(rng, 12);
    const RougeScore score = rouge_l(join(cand), join(ref));
    if (cand.empty() || ref.empty()) {
      CHECK(score.f1 == 0.0);
      continue;
    }
    const double lcs = static_cast<double>(test::lcs_recursive_oracle(cand, ref));
    const double precision = lcs / static_cast<double>(cand.size());
    const double recall = lcs / static_cast<double>(ref.size());
    const double f1 =
        precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    REQUIRE(score.precision == precision);
    REQUIRE(score.recall == recall);
    REQUIRE(score.f1 == f1);
    // symmetry of F1
    REQUIRE(rouge_l(join(ref), join(cand)).f1 == score.f1);
  }
}

namespace {

KnowledgeGraph coverage_graph() {
  KnowledgeGraph graph;
  Entity vpa;
  vpa.canonical_name = "Valproate";
  vpa.layer = Layer::treatment();
  vpa.aliases = {"VPA"};
  graph.add_entity(vpa);
  Entity dravet;
  dravet.canonical_name = "Dravet Syndrome";
  dravet.layer = Layer::syndrome();
  graph.add_entity(dravet);
  graph.freeze();
  return graph;
}

}  // namespace

TEST_CASE("kg_evidence_coverage counts alias-aware word-bounded mentions") {
  const KnowledgeGraph graph = coverage_graph();

  SECTION("half the entities are mentioned") {
    const auto result = kg_evidence_coverage(graph, "we recommend valproate here", graph);
    CHECK(result.value == Catch::Approx(0.5));
    CHECK(result.mentioned == 1);
    CHECK(result.entities == 2);
  }
  SECTION("all entities mentioned") {
    CHECK(kg_evidence_coverage(graph, "Valproate helps in Dravet Syndrome", graph).value ==
          Catch::Approx(1.0));
  }
  SECTION("alias mention counts for its entity") {
    CHECK(kg_evidence_coverage(graph, "VPA was continued", graph).value == Catch::Approx(0.5));
  }
  SECTION("word boundaries: substrings do not count") {
    CHECK(kg_evidence_coverage(graph, "valproatex is not a drug", graph).value ==
          Catch::Approx(0.0));
  }
  SECTION("empty subgraph is an error") {
    KnowledgeGraph empty;
    CHECK_THROWS_MATCHES(kg_evidence_coverage(empty, "text", graph), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == ErrorCode::empty_subgraph;
                         }));
  }
}

TEST_CASE("kg_evidence_coverage is monotone under appended text") {
  const KnowledgeGraph graph = coverage_graph();
  std::mt19937 rng(515);
  std::string text = "nothing yet";
  double previous = kg_evidence_coverage(graph, text, graph).value;
  const std::vector<std::string> additions = {" and then", " VPA", " nonsense",
                                              " Dravet Syndrome", " closing words"};
  for (const std::string& addition : additions) {
    text += addition;
    const double current = kg_evidence_coverage(graph, text, graph).value;
    REQUIRE(current >= previous);
    previous = current;
  }
  CHECK(previous == Catch::Approx(1.0));
}

TEST_CASE("drug_safety_score flags contraindicated recommendations") {
  const std::vector<GuidelineRule> rules = {
      rule({"SCN1A gain-of-function"}, {"Stiripentol"}, {"Valproate", "Carbamazepine"})};

  SECTION("firing rule makes the case unsafe") {
    const std::vector<EvalCase> cases = {
        eval_case({"SCN1A gain-of-function"}, {"Valproate"})};
    CHECK(drug_safety_score(cases, rules).value == Catch::Approx(0.0));
  }
  SECTION("no applicable rule means safe") {
    const std::vector<EvalCase> cases = {eval_case({"unrelated context"}, {"Valproate"})};
    CHECK(drug_safety_score(cases, rules).value == Catch::Approx(1.0));
  }
  SECTION("one safe of two") {
    const std::vector<EvalCase> cases = {
        eval_case({"SCN1A gain-of-function"}, {"Valproate"}),
        eval_case({"SCN1A gain-of-function"}, {"Stiripentol"})};
    const auto result = drug_safety_score(cases, rules);
    CHECK(result.value == Catch::Approx(0.5));
    CHECK(result.safe == 1);
    CHECK(result.total == 2);
  }
  SECTION("empty case set") {
    CHECK_THROWS_AS(drug_safety_score({}, rules), Error);
  }
}

TEST_CASE("guideline_concordance excludes cases no rule covers") {
  const std::vector<GuidelineRule> rules = {
      rule({"Dravet Syndrome"}, {"Stiripentol", "Valproate"}, {})};

  SECTION("recommendation inside the recommended set concords") {
    const std::vector<EvalCase> cases = {eval_case({"Dravet Syndrome"}, {"Stiripentol"})};
    CHECK(guideline_concordance(cases, rules).value == Catch::Approx(1.0));
  }
  SECTION("recommendation outside it does not") {
    const std::vector<EvalCase> cases = {eval_case({"Dravet Syndrome"}, {"Phenytoin"})};
    CHECK(guideline_concordance(cases, rules).value == Catch::Approx(0.0));
  }
  SECTION("two applicable, one concordant, one excluded") {
    const std::vector<EvalCase> cases = {
        eval_case({"Dravet Syndrome"}, {"Stiripentol"}),
        eval_case({"Dravet Syndrome"}, {"Phenytoin"}),
        eval_case({"Lennox-Gastaut Syndrome"}, {"Valproate"})};
    const auto result = guideline_concordance(cases, rules);
    CHECK(result.value == Catch::Approx(0.5));
    CHECK(result.applicable == 2);
    CHECK(result.concordant == 1);
    CHECK(result.excluded == 1);
  }
  SECTION("all cases inapplicable is a distinct error") {
    const std::vector<EvalCase> cases = {eval_case({"other"}, {"x"})};
    CHECK_THROWS_MATCHES(guideline_concordance(cases, rules), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                           return e.code() == ErrorCode::all_cases_inapplicable;
                         }));
  }
  SECTION("empty case set") {
    CHECK_THROWS_AS(guideline_concordance({}, rules), Error);
  }
}

TEST_CASE("safety and concordance are invariant under case permutation") {
  const std::vector<GuidelineRule> rules = {
      rule({"ctx1"}, {"good1"}, {"bad1"}), rule({"ctx2"}, {"good2"}, {"bad2"})};
  std::vector<EvalCase> cases = {
      eval_case({"ctx1"}, {"good1"}), eval_case({"ctx1"}, {"bad1"}),
      eval_case({"ctx2"}, {"good2"}), eval_case({"ctx2", "extra"}, {"bad2"}),
      eval_case({"nothing"}, {"good1"})};
  const double safety = drug_safety_score(cases, rules).value;
  const double concordance = guideline_concordance(cases, rules).value;
  std::mt19937 rng(2);
  for (int round = 0; round < 5; ++round) {
    std::shuffle(cases.begin(), cases.end(), rng);
    CHECK(drug_safety_score(cases, rules).value == Catch::Approx(safety));
    CHECK(guideline_concordance(cases, rules).value == Catch::Approx(concordance));
  }
}

TEST_CASE("rule tables parse and reject overlap between recommended and contraindicated") {
  const auto rules = parse_rules(
      R"([{"context":["a"],"recommended":["r"],"contraindicated":["c"]}])");
  REQUIRE(rules.size() == 1);
  CHECK(rules[0].context == std::vector<std::string>{"a"});

  CHECK_THROWS_MATCHES(
      parse_rules(R"([{"context":[],"recommended":["x"],"contraindicated":["X"]}])"), Error,
      Catch::Matchers::Predicate<Error>(
          [](const Error& e) { return e.code() == ErrorCode::invalid_config; }));
}

TEST_CASE("mcq items parse with ordered options and validated gold labels") {
  const auto items = parse_mcq_items(
      R"([{"id":"q1","question":"pick","options":{"B":"two","A":"one","C":"three"},"gold":"A"}])");
  REQUIRE(items.size() == 1);
  REQUIRE(items[0].options.size() == 3);
  CHECK(items[0].options[0].first == "A");  // label order, not file order
  CHECK(items[0].options[2].first == "C");

  CHECK_THROWS_AS(parse_mcq_items(R"([{"id":"q","options":{"A":"x","B":"y"},"gold":"Z"}])"),
                  Error);
  CHECK_THROWS_AS(parse_mcq_items(R"([{"id":"q","options":{"A":"x"},"gold":"A"}])"), Error);
}

TEST_CASE("cases parse from the documented shape") {
  const auto cases = parse_cases(R"([{"context":["a","b"],"recommended":["r"]}])");
  REQUIRE(cases.size() == 1);
  CHECK(cases[0].context.size() == 2);
  CHECK_THROWS_AS(parse_cases(R"([{"context":["a"]}])"), Error);
}
