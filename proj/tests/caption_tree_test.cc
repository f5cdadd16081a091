// Copyright 2026 The captree Authors.
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


#include <set>
#include <string>
#include <vector>

#include "captree/caption_tree.h"
#include "captree/error.h"
#include "captree/negatives.h"
#include "captree/oracle.h"
#include "captree/wordnet.h"
#include "doctest.h"

namespace captree {
namespace {

constexpr char kExample[] =
    "several people standing in a green field together while flying kites";

std::vector<std::string> Positives(const CaptionTree& tree) {
  std::vector<std::string> out;
  for (const TreeLevel& level : tree.levels) out.push_back(level.positive);
  return out;
}

const Tagger& DefaultTagger() {
  static const Tagger tagger(Lexicon::Builtin());
  return tagger;
}

const WordNetStore& Fixture() {
  static const WordNetStore store =
      WordNetStore::Load(std::string(CAPTREE_TEST_DATA) + "/wordnet");
  return store;
}

CaptionTree ExampleTree(TreeStructure structure) {
  static const StubOracle oracle =
      StubOracle::Load(std::string(CAPTREE_TEST_DATA) + "/oracle_stub.json");
  CaptionTree tree =
      BuildTree("1", ParseCaption(kExample, DefaultTagger()), structure);
  NegativeStrategy strategy;
  strategy.store = &Fixture();
  strategy.oracle = &oracle;
  AttachNegatives(tree, strategy);
  return tree;
}

TEST_CASE("incremental worked example") {
  const CaptionTree tree = BuildIncremental(
      "1", ParseCaption(kExample, DefaultTagger()), "and");
  CHECK(Positives(tree) == std::vector<std::string>{
                               "several people",
                               "several people and a green field",
                               "several people standing in a green field",
                               kExample});
  CHECK(tree.levels[1].tokens[2].text == "and");
  CHECK_FALSE(tree.levels[1].tokens[2].origin.has_value());
  CHECK(tree.levels[0].introduced == std::vector<int>{0, 1});
  CHECK(tree.levels[1].introduced == std::vector<int>{4, 5, 6});
  CHECK(tree.levels[2].introduced == std::vector<int>{2, 3});
  CHECK(tree.levels[3].introduced == std::vector<int>{7, 8, 9, 10});
  for (size_t i = 0; i < tree.levels.size(); ++i) {
    CHECK(tree.levels[i].level_index == static_cast<int>(i));
  }
}

TEST_CASE("single phrase collapses") {
  const ParsedCaption car = ParseCaption("a red car", DefaultTagger());
  CHECK(Positives(BuildIncremental("c", car)) ==
        std::vector<std::string>{"a red car"});
  CHECK(Positives(BuildBasic("c", car)) == std::vector<std::string>{"a red car"});
}

TEST_CASE("three phrases with a caption-final phrase") {
  const ParsedCaption dog =
      ParseCaption("a dog chasing a cat in a park", DefaultTagger());
  REQUIRE(dog.noun_phrases.size() == 3);
  CHECK(Positives(BuildIncremental("d", dog)) ==
        std::vector<std::string>{"a dog", "a dog and a cat",
                                 "a dog chasing a cat",
                                 "a dog chasing a cat in a park"});
  CHECK(Positives(BuildBasic("d", dog)) ==
        std::vector<std::string>{"a dog", "a cat",
                                 "a dog chasing a cat in a park"});
}

TEST_CASE("three phrases before the end") {
  const ParsedCaption p = ParseCaption(
      "a dog chasing a cat in a park at night", DefaultTagger());
  REQUIRE(p.noun_phrases.size() == 4);
  CHECK(Positives(BuildIncremental("d", p, "with")) ==
        std::vector<std::string>{
            "a dog", "a dog with a cat", "a dog chasing a cat",
            "a dog chasing a cat with a park", "a dog chasing a cat in a park",
            "a dog chasing a cat in a park at night"});
}

TEST_CASE("basic worked example") {
  const CaptionTree tree =
      BuildBasic("1", ParseCaption(kExample, DefaultTagger()));
  CHECK(Positives(tree) ==
        std::vector<std::string>{"several people", "a green field", kExample});
  CHECK(tree.structure == TreeStructure::kBasic);
}

TEST_CASE("structural invariants") {
  for (const char* caption :
       {kExample, "a man riding a horse on a beach at sunset",
        "two dogs play with a ball near a lake", "a red car"}) {
    const ParsedCaption parsed = ParseCaption(caption, DefaultTagger());
    const CaptionTree tree = BuildIncremental("x", parsed);
    CHECK(tree.levels.back().positive == parsed.normalized());
    std::set<int> seen;
    for (size_t l = 0; l < tree.levels.size(); ++l) {
      for (int origin : tree.levels[l].introduced) {
        CHECK(seen.insert(origin).second);
      }
      if (l + 1 < tree.levels.size()) {
        std::multiset<int> next;
        for (const auto& t : tree.levels[l + 1].tokens) {
          if (t.origin) next.insert(*t.origin);
        }
        for (const auto& t : tree.levels[l].tokens) {
          if (t.origin) CHECK(next.contains(*t.origin));
        }
      }
    }
    CHECK(BuildIncremental("x", parsed) == tree);
  }
}

TEST_CASE("no noun phrase") {
  ParsedCaption parsed;
  parsed.raw = "running";
  parsed.tokens = {{"running", 0}};
  parsed.tags = {PosTag::kVerb};
  CHECK_THROWS_AS(BuildIncremental("x", parsed), Error);
  CHECK_THROWS_AS(BuildBasic("x", parsed), Error);
}

TEST_CASE("constrain without limits is identity") {
  const CaptionTree tree = ExampleTree(TreeStructure::kIncremental);
  CHECK(Constrain(tree, {}, 9) == tree);
}

TEST_CASE("depth one keeps every negative on the full caption") {
  const CaptionTree tree = ExampleTree(TreeStructure::kIncremental);
  REQUIRE(tree.negative_count() == 8);
  TreeConstraints limits;
  limits.max_depth = 1;
  const CaptionTree flat = Constrain(tree, limits, 0);
  REQUIRE(flat.levels.size() == 1);
  const TreeLevel& level = flat.levels[0];
  CHECK(level.positive == kExample);
  REQUIRE(level.negatives.size() == 8);
  std::vector<std::string> replacements;
  for (const Negative& n : level.negatives) {
    replacements.push_back(n.replacement);
    CHECK(n.text == RenderReplacement(level, n.replaced_index, n.replacement));
    CHECK(level.tokens[n.replaced_index].text == n.replaced_word);
  }
  CHECK(replacements ==
        std::vector<std::string>{"one", "animals", "gathered", "out", "blue",
                                 "forest", "soaring", "sales"});
  CHECK(level.negatives[0].text ==
        "one people standing in a green field together while flying kites");
}

TEST_CASE("depth two keeps the deepest levels") {
  const CaptionTree tree = ExampleTree(TreeStructure::kIncremental);
  TreeConstraints limits;
  limits.max_depth = 2;
  const CaptionTree cut = Constrain(tree, limits, 0);
  REQUIRE(cut.levels.size() == 2);
  CHECK(cut.levels[0].positive == "several people standing in a green field");
  CHECK(cut.levels[0].level_index == 0);
  CHECK(cut.levels[0].negatives.size() == 6);
  CHECK(cut.levels[1].negatives.size() == 2);
  CHECK(cut.negative_count() == tree.negative_count());
}

TEST_CASE("max negatives takes the first in traversal order") {
  const CaptionTree tree = ExampleTree(TreeStructure::kIncremental);
  TreeConstraints limits;
  limits.max_negatives = 2;
  const CaptionTree cut = Constrain(tree, limits, 0);
  CHECK(cut.negative_count() == 2);
  CHECK(cut.levels[0].negatives == tree.levels[0].negatives);
  for (size_t l = 1; l < cut.levels.size(); ++l) {
    CHECK(cut.levels[l].negatives.empty());
  }
  limits.max_negatives = 100;
  CHECK(Constrain(tree, limits, 0).negative_count() == 8);
}

TEST_CASE("seeded negative sampling") {
  const CaptionTree tree = ExampleTree(TreeStructure::kIncremental);
  TreeConstraints limits;
  limits.max_negatives = 3;
  limits.shuffle_negatives = true;
  const CaptionTree a = Constrain(tree, limits, 5);
  CHECK(a.negative_count() == 3);
  CHECK(Constrain(tree, limits, 5) == a);
}

TEST_CASE("invalid constraints") {
  const CaptionTree tree = ExampleTree(TreeStructure::kBasic);
  TreeConstraints limits;
  limits.max_depth = 0;
  try {
    Constrain(tree, limits, 0);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidConstraint);
  }
  limits.max_depth.reset();
  limits.max_negatives = -1;
  CHECK_THROWS_AS(Constrain(tree, limits, 0), Error);
}

TEST_CASE("names round trip") {
  for (auto s : {TreeStructure::kBasic, TreeStructure::kIncremental}) {
    CHECK(ParseTreeStructure(TreeStructureName(s)) == s);
  }
  for (auto s : {NegativeSource::kAntonym, NegativeSource::kCoHyponym,
                 NegativeSource::kMaskFill, NegativeSource::kRandomPos}) {
    CHECK(ParseNegativeSource(NegativeSourceName(s)) == s);
  }
  CHECK_FALSE(ParseTreeStructure("flat").has_value());
}

}  // namespace
}  // namespace captree
