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


#ifndef CAPTREE_NEGATIVES_H_
#define CAPTREE_NEGATIVES_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "captree/caption_tree.h"
#include "captree/oracle.h"
#include "captree/wordnet.h"

namespace captree {

enum class StrategyKind {
  // WordNet only: antonyms for adjectives and adpositions, co-hyponyms,
  // then a random word of the same category.
  kWordNet,
  // Oracle opposite, then WordNet co-hyponym.
  kWordNetLlmPrompt,
  // Oracle opposite, WordNet co-hyponym, then oracle mask fill.
  kWordNetLlmPromptMask,
};

std::string_view StrategyKindName(StrategyKind kind);
std::optional<StrategyKind> ParseStrategyKind(std::string_view name);

struct NegativeStrategy {
  StrategyKind kind = StrategyKind::kWordNetLlmPrompt;
  const WordNetStore* store = nullptr;
  // Required by the two oracle-backed kinds.
  const WordOracle* oracle = nullptr;
  uint64_t seed = 0;
  // Pool for random adposition replacements (WordNet has no adpositions).
  std::vector<std::string> adpositions;

  // Throws kInvalidArgument when a required handle is missing.
  void Validate() const;
};

// True iff `candidate` is a single token different from `positive_word` and
// not a WordNet synonym of it.
bool ValidateCandidate(std::string_view positive_word,
                       std::string_view candidate, PosTag tag,
                       const WordNetStore& store);

// One negative per replaceable token of the level that is not a connector
// and whose caption index is not in `covered` (tokens shown by shallower
// levels flow down unchanged). Tokens for which no step of the chain yields
// a valid candidate are skipped. Oracle failures propagate.
std::vector<Negative> GenerateForLevel(const TreeLevel& level,
                                       const std::set<int>& covered,
                                       const NegativeStrategy& strategy);

// Fills every level of `tree` in order.
void AttachNegatives(CaptionTree& tree, const NegativeStrategy& strategy);

}  // namespace captree

#endif  // CAPTREE_NEGATIVES_H_
