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


#ifndef CAPTREE_INTERPRET_H_
#define CAPTREE_INTERPRET_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "captree/scorer.h"

namespace captree {

enum class RemovalStrategy { kPerText, kAnchor, kDiRe };

std::string_view RemovalStrategyName(RemovalStrategy strategy);
std::optional<RemovalStrategy> ParseRemovalStrategy(std::string_view name);

// Single text built from the differing parts of a positive/negative pair:
// "<pos diff> <shared suffix> or <neg diff> <shared suffix>".
struct AnchorText {
  std::string text;
  // Half-open token ranges of the differing spans in each input.
  std::pair<int, int> pos_diff_span;
  std::pair<int, int> neg_diff_span;
};

// Throws kIdenticalTexts, or kUndiffable when one side's differing span is
// empty (a pure insertion).
AnchorText MakeAnchorText(std::string_view positive, std::string_view negative);

// Differential relevance: positive map minus negative map, cell by cell.
// Throws kShapeMismatch.
RelevancyMap DiRe(const RelevancyMap& positive, const RelevancyMap& negative);

// Cells in ascending relevance, ties by (row, col). The first
// floor(fraction * H * W) cells are the removed ones, so removal sets nest
// as the fraction grows.
struct RemovalPlan {
  std::vector<Cell> order;
  double fraction = 0.0;
  size_t removed_count = 0;

  std::span<const Cell> removed() const {
    return std::span<const Cell>(order).first(removed_count);
  }
};

// Throws kInvalidArgument for a fraction outside [0, 1].
RemovalPlan PlanRemoval(const RelevancyMap& relevancy, double fraction);

// Removes the least relevant tokens. Toy cells are blanked; every image
// records the removed cells in `masked` for the scorer. Throws
// kShapeMismatch when the map does not fit the image.
ImageRef RemoveTokens(const ImageRef& image, const RelevancyMap& relevancy,
                      double fraction);

// The maps a strategy removes by: the positive and the negative map for
// kPerText, the anchor-text map for kAnchor, the DiRe map for kDiRe.
std::vector<RelevancyMap> RemovalMaps(const ImageRef& image,
                                      std::string_view positive,
                                      std::string_view negative,
                                      RemovalStrategy strategy,
                                      const Scorer& scorer);

enum class Choice { kPositive, kNegative };

struct Prediction {
  Choice choice = Choice::kNegative;
  // positive_score - negative_score.
  double margin = 0.0;
  double positive_score = 0.0;
  double negative_score = 0.0;
};

// Picks the text closer to the image after token removal.
//   kPerText: each text removes tokens by its own map and is scored against
//             its own masked image.
//   kAnchor:  one map from the anchor text masks one shared image.
//   kDiRe:    one map from DiRe(positive, negative) masks one shared image.
// An image left with no visible token scores 0. Ties go to kNegative.
Prediction Predict(const ImageRef& image, std::string_view positive,
                   std::string_view negative, RemovalStrategy strategy,
                   double fraction, const Scorer& scorer);

struct PerturbationCase {
  ImageRef image;
  std::string positive;
  std::string negative;
};

struct PerturbationPoint {
  double fraction = 0.0;
  double accuracy = 0.0;
  RemovalStrategy strategy = RemovalStrategy::kPerText;
};

// Accuracy (share of cases predicted kPositive) at each fraction. Fractions
// must be strictly increasing within [0, 1]. Throws kEmptyDataset.
std::vector<PerturbationPoint> PerturbationCurve(
    std::span<const PerturbationCase> cases, RemovalStrategy strategy,
    std::span<const double> fractions, const Scorer& scorer, int workers = 1);

// "strategy,fraction,accuracy" with a header line.
std::string CurveCsv(std::span<const PerturbationPoint> points);

// {"image_id", "text", "h", "w", "grid": [[...]]}
std::string RelevancyJson(const RelevancyMap& map);

// Binary PGM (P5), values scaled linearly from [min, max] to [0, 255].
std::string RelevancyPgm(const RelevancyMap& map);

}  // namespace captree

#endif  // CAPTREE_INTERPRET_H_
