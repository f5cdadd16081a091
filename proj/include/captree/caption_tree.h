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


#ifndef CAPTREE_CAPTION_TREE_H_
#define CAPTREE_CAPTION_TREE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "captree/caption.h"

namespace captree {

enum class TreeStructure { kBasic, kIncremental };

std::string_view TreeStructureName(TreeStructure structure);
std::optional<TreeStructure> ParseTreeStructure(std::string_view name);

enum class NegativeSource { kAntonym, kCoHyponym, kMaskFill, kRandomPos };

std::string_view NegativeSourceName(NegativeSource source);
std::optional<NegativeSource> ParseNegativeSource(std::string_view name);

// One-word replacement of a level's positive text.
struct Negative {
  std::string text;
  // Position within the level positive, not the original caption.
  int replaced_index = 0;
  std::string replaced_word;
  std::string replacement;
  NegativeSource source = NegativeSource::kCoHyponym;

  friend bool operator==(const Negative&, const Negative&) = default;
};

struct LevelToken {
  std::string text;
  PosTag tag = PosTag::kNoun;
  // Index of the token in the source caption; empty for connector words.
  std::optional<int> origin;

  friend bool operator==(const LevelToken&, const LevelToken&) = default;
};

struct TreeLevel {
  int level_index = 0;
  std::string positive;
  std::vector<LevelToken> tokens;
  std::vector<Negative> negatives;
  // Caption token indices that no shallower level shows.
  std::vector<int> introduced;

  friend bool operator==(const TreeLevel&, const TreeLevel&) = default;
};

struct CaptionTree {
  std::string caption_id;
  ParsedCaption source;
  TreeStructure structure = TreeStructure::kIncremental;
  std::vector<TreeLevel> levels;
  std::string connector = "and";

  size_t negative_count() const;

  friend bool operator==(const CaptionTree&, const CaptionTree&) = default;
};

struct TreeConstraints {
  std::optional<int> max_depth;
  std::optional<int> max_negatives;
  // Pick the surviving negatives with a seeded draw instead of taking the
  // first ones in (level, token) order.
  bool shuffle_negatives = false;

  // Throws kInvalidConstraint.
  void Validate() const;
};

inline constexpr std::string_view kDefaultConnector = "and";

// Coarse-to-fine levels: the first noun phrase, then for every further
// phrase a "<previous level> <connector> <phrase>" level and a caption
// prefix ending at the phrase, then the full caption. A phrase that ends the
// caption contributes only the full-caption level. Levels with duplicate
// text keep their first occurrence.
CaptionTree BuildIncremental(std::string caption_id,
                             const ParsedCaption& parsed,
                             std::string_view connector = kDefaultConnector);

// One level per noun phrase on its own, then the full caption. As above, a
// phrase ending the caption is covered by the full-caption level.
CaptionTree BuildBasic(std::string caption_id, const ParsedCaption& parsed);

CaptionTree BuildTree(std::string caption_id, const ParsedCaption& parsed,
                      TreeStructure structure,
                      std::string_view connector = kDefaultConnector);

// Applies depth and negative-count limits to a tree that already carries
// negatives.
//
// max_depth = k keeps the k deepest levels. A negative from a dropped level
// is re-rendered on the shallowest kept level that shows the replaced
// caption token, so the negative count is unchanged. Each kept level's
// negatives end up in token order.
//
// max_negatives = m then keeps the first m negatives in (level, token) order,
// or a seeded sample of m when shuffle_negatives is set.
CaptionTree Constrain(const CaptionTree& tree, const TreeConstraints& limits,
                      uint64_t seed);

// Original-caption index of the token a negative replaces.
std::optional<int> ReplacedOrigin(const TreeLevel& level,
                                  const Negative& negative);

// The level's tokens with position `index` swapped for `word`.
std::string RenderReplacement(const TreeLevel& level, int index,
                              std::string_view word);

}  // namespace captree

#endif  // CAPTREE_CAPTION_TREE_H_
