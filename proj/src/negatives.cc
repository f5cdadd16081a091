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


#include "captree/negatives.h"

#include <limits>

#include "captree/error.h"
#include "captree/util.h"

namespace captree {
namespace {

constexpr int kRandomDraws = 16;

struct Candidate {
  std::string word;
  NegativeSource source;
};

std::optional<Candidate> FirstValid(const std::vector<std::string>& words,
                                    std::string_view positive, PosTag tag,
                                    const WordNetStore& store,
                                    NegativeSource source) {
  for (const std::string& word : words) {
    if (ValidateCandidate(positive, word, tag, store)) {
      return Candidate{word, source};
    }
  }
  return std::nullopt;
}

std::optional<Candidate> FromOracle(const std::optional<std::string>& reply,
                                    std::string_view positive, PosTag tag,
                                    const WordNetStore& store,
                                    NegativeSource source) {
  if (!reply) return std::nullopt;
  const std::string word = SanitizeWord(*reply);
  if (!ValidateCandidate(positive, word, tag, store)) return std::nullopt;
  return Candidate{word, source};
}

// Runs the replacement chain for token `index` of `level`.
std::optional<Candidate> ReplacementFor(const TreeLevel& level, int index,
                                        const NegativeStrategy& strategy) {
  const LevelToken& token = level.tokens[index];
  const WordNetStore& store = *strategy.store;
  const std::string& word = token.text;
  const uint64_t seed =
      MixSeed(strategy.seed, level.positive + "#" + std::to_string(index));

  // Opposite.
  if (strategy.kind == StrategyKind::kWordNet) {
    if ((token.tag == PosTag::kAdj || token.tag == PosTag::kAdp) &&
        store.Contains(word, token.tag)) {
      if (auto c = FirstValid(store.Antonyms(word, token.tag), word,
                              token.tag, store, NegativeSource::kAntonym)) {
        return c;
      }
    }
  } else if (auto c = FromOracle(strategy.oracle->Opposite(word), word,
                                 token.tag, store, NegativeSource::kAntonym)) {
    return c;
  }

  // Co-hyponym.
  if (store.Contains(word, token.tag)) {
    auto siblings = store.CoHyponyms(
        word, token.tag, std::numeric_limits<size_t>::max(), seed);
    if (auto c = FirstValid(siblings, word, token.tag, store,
                            NegativeSource::kCoHyponym)) {
      return c;
    }
  }

  // Mask completion.
  if (strategy.kind == StrategyKind::kWordNetLlmPromptMask) {
    const std::string prompt = RenderReplacement(level, index, kMaskToken);
    if (auto c = FromOracle(strategy.oracle->FillMask(prompt), word,
                            token.tag, store, NegativeSource::kMaskFill)) {
      return c;
    }
  }

  // Random word of the same category.
  if (strategy.kind == StrategyKind::kWordNet &&
      (token.tag == PosTag::kAdj || token.tag == PosTag::kAdp)) {
    const std::vector<std::string>& pool = token.tag == PosTag::kAdj
                                               ? store.adjective_lemmas()
                                               : strategy.adpositions;
    if (!pool.empty()) {
      SeededRng rng(seed);
      for (int draw = 0; draw < kRandomDraws; ++draw) {
        const std::string& pick = pool[rng.below(pool.size())];
        if (ValidateCandidate(word, pick, token.tag, store)) {
          return Candidate{pick, NegativeSource::kRandomPos};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view StrategyKindName(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kWordNet: return "wn";
    case StrategyKind::kWordNetLlmPrompt: return "wn+llm";
    case StrategyKind::kWordNetLlmPromptMask: return "wn+llm+mask";
  }
  return "wn";
}

std::optional<StrategyKind> ParseStrategyKind(std::string_view name) {
  for (StrategyKind kind :
       {StrategyKind::kWordNet, StrategyKind::kWordNetLlmPrompt,
        StrategyKind::kWordNetLlmPromptMask}) {
    if (StrategyKindName(kind) == name) return kind;
  }
  return std::nullopt;
}

void NegativeStrategy::Validate() const {
  if (store == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                "negative generation needs a WordNet store");
  }
  if (kind != StrategyKind::kWordNet && oracle == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("strategy ") + std::string(StrategyKindName(kind)) +
                    " needs a word oracle");
  }
}

bool ValidateCandidate(std::string_view positive_word,
                       std::string_view candidate, PosTag tag,
                       const WordNetStore& store) {
  if (candidate.empty() || candidate == positive_word) return false;
  if (SanitizeWord(candidate) != candidate) return false;
  return !store.IsSynonym(positive_word, candidate, tag);
}

std::vector<Negative> GenerateForLevel(const TreeLevel& level,
                                       const std::set<int>& covered,
                                       const NegativeStrategy& strategy) {
  strategy.Validate();
  std::vector<Negative> negatives;
  for (size_t i = 0; i < level.tokens.size(); ++i) {
    const LevelToken& token = level.tokens[i];
    if (!token.origin || covered.contains(*token.origin) ||
        !IsReplaceable(token.tag)) {
      continue;
    }
    const int index = static_cast<int>(i);
    auto candidate = ReplacementFor(level, index, strategy);
    if (!candidate) continue;
    Negative negative;
    negative.text = RenderReplacement(level, index, candidate->word);
    negative.replaced_index = index;
    negative.replaced_word = token.text;
    negative.replacement = std::move(candidate->word);
    negative.source = candidate->source;
    negatives.push_back(std::move(negative));
  }
  return negatives;
}

void AttachNegatives(CaptionTree& tree, const NegativeStrategy& strategy) {
  std::set<int> covered;
  for (TreeLevel& level : tree.levels) {
    level.negatives = GenerateForLevel(level, covered, strategy);
    for (const LevelToken& token : level.tokens) {
      if (token.origin) covered.insert(*token.origin);
    }
  }
}

}  // namespace captree
