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


#include "captree/caption_tree.h"

#include <algorithm>
#include <set>

#include "captree/error.h"
#include "captree/util.h"

namespace captree {
namespace {

std::vector<LevelToken> CaptionRange(const ParsedCaption& parsed, int start,
                                     int end) {
  std::vector<LevelToken> tokens;
  for (int i = start; i < end; ++i) {
    tokens.push_back({parsed.tokens[i].text, parsed.tags[i], i});
  }
  return tokens;
}

TreeLevel MakeLevel(std::vector<LevelToken> tokens) {
  TreeLevel level;
  std::vector<std::string> words;
  for (const LevelToken& token : tokens) words.push_back(token.text);
  level.positive = Join(words, " ");
  level.tokens = std::move(tokens);
  return level;
}

// Drops repeated texts, then numbers the levels and records which caption
// tokens each one exposes first.
void FinishLevels(std::vector<TreeLevel>& levels) {
  std::vector<TreeLevel> unique;
  for (TreeLevel& level : levels) {
    const bool repeated =
        std::any_of(unique.begin(), unique.end(), [&](const TreeLevel& kept) {
          return kept.positive == level.positive;
        });
    if (!repeated) unique.push_back(std::move(level));
  }
  std::set<int> seen;
  for (size_t i = 0; i < unique.size(); ++i) {
    TreeLevel& level = unique[i];
    level.level_index = static_cast<int>(i);
    level.introduced.clear();
    for (const LevelToken& token : level.tokens) {
      if (token.origin && seen.insert(*token.origin).second) {
        level.introduced.push_back(*token.origin);
      }
    }
    std::sort(level.introduced.begin(), level.introduced.end());
  }
  levels = std::move(unique);
}

void RequirePhrases(const ParsedCaption& parsed) {
  if (parsed.noun_phrases.empty()) {
    throw Error(ErrorCode::kNoNounPhrase,
                "caption \"" + parsed.raw + "\" has no noun phrase");
  }
}

std::optional<int> PositionOfOrigin(const TreeLevel& level, int origin) {
  for (size_t i = 0; i < level.tokens.size(); ++i) {
    if (level.tokens[i].origin == origin) return static_cast<int>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view TreeStructureName(TreeStructure structure) {
  return structure == TreeStructure::kBasic ? "basic" : "incremental";
}

std::optional<TreeStructure> ParseTreeStructure(std::string_view name) {
  if (name == "basic") return TreeStructure::kBasic;
  if (name == "incremental") return TreeStructure::kIncremental;
  return std::nullopt;
}

std::string_view NegativeSourceName(NegativeSource source) {
  switch (source) {
    case NegativeSource::kAntonym: return "antonym";
    case NegativeSource::kCoHyponym: return "co_hyponym";
    case NegativeSource::kMaskFill: return "mask_fill";
    case NegativeSource::kRandomPos: return "random_pos";
  }
  return "co_hyponym";
}

std::optional<NegativeSource> ParseNegativeSource(std::string_view name) {
  for (NegativeSource s :
       {NegativeSource::kAntonym, NegativeSource::kCoHyponym,
        NegativeSource::kMaskFill, NegativeSource::kRandomPos}) {
    if (NegativeSourceName(s) == name) return s;
  }
  return std::nullopt;
}

size_t CaptionTree::negative_count() const {
  size_t count = 0;
  for (const TreeLevel& level : levels) count += level.negatives.size();
  return count;
}

void TreeConstraints::Validate() const {
  if (max_depth && *max_depth < 1) {
    throw Error(ErrorCode::kInvalidConstraint,
                "max_depth must be >= 1, got " + std::to_string(*max_depth));
  }
  if (max_negatives && *max_negatives < 1) {
    throw Error(ErrorCode::kInvalidConstraint,
                "max_negatives must be >= 1, got " +
                    std::to_string(*max_negatives));
  }
}

CaptionTree BuildIncremental(std::string caption_id,
                             const ParsedCaption& parsed,
                             std::string_view connector) {
  RequirePhrases(parsed);
  const auto& phrases = parsed.noun_phrases;
  const int length = static_cast<int>(parsed.tokens.size());

  std::vector<TreeLevel> levels;
  if (phrases.front().end < length) {
    levels.push_back(
        MakeLevel(CaptionRange(parsed, phrases[0].start, phrases[0].end)));
  }
  for (size_t i = 1; i < phrases.size(); ++i) {
    const NounPhrase& phrase = phrases[i];
    if (phrase.end == length) break;
    std::vector<LevelToken> joined = levels.back().tokens;
    joined.push_back({std::string(connector), PosTag::kConj, std::nullopt});
    for (LevelToken& token : CaptionRange(parsed, phrase.start, phrase.end)) {
      joined.push_back(std::move(token));
    }
    levels.push_back(MakeLevel(std::move(joined)));
    levels.push_back(MakeLevel(CaptionRange(parsed, 0, phrase.end)));
  }
  levels.push_back(MakeLevel(CaptionRange(parsed, 0, length)));
  FinishLevels(levels);

  CaptionTree tree;
  tree.caption_id = std::move(caption_id);
  tree.source = parsed;
  tree.structure = TreeStructure::kIncremental;
  tree.levels = std::move(levels);
  tree.connector = std::string(connector);
  return tree;
}

CaptionTree BuildBasic(std::string caption_id, const ParsedCaption& parsed) {
  RequirePhrases(parsed);
  const int length = static_cast<int>(parsed.tokens.size());
  std::vector<TreeLevel> levels;
  for (const NounPhrase& phrase : parsed.noun_phrases) {
    if (phrase.end == length) continue;
    levels.push_back(MakeLevel(CaptionRange(parsed, phrase.start, phrase.end)));
  }
  levels.push_back(MakeLevel(CaptionRange(parsed, 0, length)));
  FinishLevels(levels);

  CaptionTree tree;
  tree.caption_id = std::move(caption_id);
  tree.source = parsed;
  tree.structure = TreeStructure::kBasic;
  tree.levels = std::move(levels);
  tree.connector = std::string(kDefaultConnector);
  return tree;
}

CaptionTree BuildTree(std::string caption_id, const ParsedCaption& parsed,
                      TreeStructure structure, std::string_view connector) {
  if (structure == TreeStructure::kBasic) {
    CaptionTree tree = BuildBasic(std::move(caption_id), parsed);
    tree.connector = std::string(connector);
    return tree;
  }
  return BuildIncremental(std::move(caption_id), parsed, connector);
}

std::optional<int> ReplacedOrigin(const TreeLevel& level,
                                  const Negative& negative) {
  if (negative.replaced_index < 0 ||
      negative.replaced_index >= static_cast<int>(level.tokens.size())) {
    return std::nullopt;
  }
  return level.tokens[negative.replaced_index].origin;
}

std::string RenderReplacement(const TreeLevel& level, int index,
                              std::string_view word) {
  std::vector<std::string> words;
  words.reserve(level.tokens.size());
  for (size_t i = 0; i < level.tokens.size(); ++i) {
    words.push_back(static_cast<int>(i) == index ? std::string(word)
                                                 : level.tokens[i].text);
  }
  return Join(words, " ");
}

CaptionTree Constrain(const CaptionTree& tree, const TreeConstraints& limits,
                      uint64_t seed) {
  limits.Validate();
  CaptionTree out = tree;

  if (limits.max_depth &&
      static_cast<size_t>(*limits.max_depth) < out.levels.size()) {
    const size_t drop = out.levels.size() - *limits.max_depth;
    std::vector<TreeLevel> kept(out.levels.begin() + drop, out.levels.end());
    for (size_t d = 0; d < drop; ++d) {
      const TreeLevel& dropped = out.levels[d];
      for (const Negative& negative : dropped.negatives) {
        const auto origin = ReplacedOrigin(dropped, negative);
        if (!origin) {
          throw Error(ErrorCode::kInvalidArgument,
                      "negative \"" + negative.text +
                          "\" does not replace a caption token");
        }
        bool placed = false;
        for (TreeLevel& level : kept) {
          const auto position = PositionOfOrigin(level, *origin);
          if (!position) continue;
          Negative moved = negative;
          moved.replaced_index = *position;
          moved.text = RenderReplacement(level, *position, moved.replacement);
          level.negatives.push_back(std::move(moved));
          placed = true;
          break;
        }
        if (!placed) {
          throw Error(ErrorCode::kInvalidArgument,
                      "no kept level shows caption token " +
                          std::to_string(*origin));
        }
      }
    }
    for (TreeLevel& level : kept) {
      std::stable_sort(level.negatives.begin(), level.negatives.end(),
                       [](const Negative& a, const Negative& b) {
                         return a.replaced_index < b.replaced_index;
                       });
    }
    out.levels = std::move(kept);
    FinishLevels(out.levels);
  }

  if (limits.max_negatives &&
      static_cast<size_t>(*limits.max_negatives) < out.negative_count()) {
    std::vector<std::pair<size_t, size_t>> slots;
    for (size_t l = 0; l < out.levels.size(); ++l) {
      for (size_t n = 0; n < out.levels[l].negatives.size(); ++n) {
        slots.emplace_back(l, n);
      }
    }
    if (limits.shuffle_negatives) {
      SeededRng rng(MixSeed(seed, tree.caption_id));
      rng.shuffle(slots);
    }
    slots.resize(*limits.max_negatives);
    std::sort(slots.begin(), slots.end());
    std::vector<std::vector<Negative>> survivors(out.levels.size());
    for (const auto& [l, n] : slots) {
      survivors[l].push_back(out.levels[l].negatives[n]);
    }
    for (size_t l = 0; l < out.levels.size(); ++l) {
      out.levels[l].negatives = std::move(survivors[l]);
    }
  }
  return out;
}

}  // namespace captree
