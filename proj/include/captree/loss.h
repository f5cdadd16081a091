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


#ifndef CAPTREE_LOSS_H_
#define CAPTREE_LOSS_H_

#include <span>
#include <vector>

#include "captree/util.h"

namespace captree {

struct LossConfig {
  // Weight of the tree loss in the blend; strictly between 0 and 1.
  double alpha = 0.5;
  // Multiplier applied to cosine scores before they are used as logits.
  double temperature = 1.0;

  void Validate() const;
};

// Scores of one tree level: index 0 is the positive caption, the rest are
// its negatives.
struct LevelScores {
  std::vector<double> logits;
};

// -log softmax(logits)[target], via log-sum-exp with max subtraction.
// Throws kIndexOutOfRange.
double CrossEntropy(std::span<const double> logits, size_t target);

// Symmetric CLIP loss over a square matrix whose diagonal holds the matched
// pairs: the mean of the row-wise (image) and column-wise (text) average
// cross entropies. Throws kNonSquare or kEmptyInput.
double ContrastiveLoss(const Grid<double>& scores);

// Sum over levels of CrossEntropy(level, 0). Throws kEmptyTree.
double TreeLoss(std::span<const LevelScores> levels);

// alpha * tree + (1 - alpha) * contrast.
double TotalLoss(double tree, double contrast, const LossConfig& config);

}  // namespace captree

#endif  // CAPTREE_LOSS_H_
