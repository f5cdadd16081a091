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


#include "captree/loss.h"

#include <algorithm>
#include <cmath>

#include "captree/error.h"

namespace captree {
namespace {

void RequireFinite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(what) + " contains a non-finite value");
    }
  }
}

}  // namespace

void LossConfig::Validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorCode::kInvalidArgument,
                "temperature must be positive, got " +
                    std::to_string(temperature));
  }
}

double CrossEntropy(std::span<const double> logits, size_t target) {
  if (target >= logits.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "target " + std::to_string(target) + " with " +
                    std::to_string(logits.size()) + " logits");
  }
  RequireFinite(logits, "logits");
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - peak);
  return std::log(sum) - (logits[target] - peak);
}

double ContrastiveLoss(const Grid<double>& scores) {
  if (scores.rows() != scores.cols()) {
    throw Error(ErrorCode::kNonSquare,
                std::to_string(scores.rows()) + "x" +
                    std::to_string(scores.cols()) + " similarity matrix");
  }
  const int n = scores.rows();
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "empty similarity matrix");

  double image_loss = 0.0;
  double text_loss = 0.0;
  std::vector<double> line(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) line[k] = scores.at(i, k);
    image_loss += CrossEntropy(line, static_cast<size_t>(i));
    for (int k = 0; k < n; ++k) line[k] = scores.at(k, i);
    text_loss += CrossEntropy(line, static_cast<size_t>(i));
  }
  return (image_loss / n + text_loss / n) / 2.0;
}

double TreeLoss(std::span<const LevelScores> levels) {
  if (levels.empty()) throw Error(ErrorCode::kEmptyTree, "no tree levels");
  double total = 0.0;
  for (const LevelScores& level : levels) {
    if (level.logits.empty()) {
      throw Error(ErrorCode::kEmptyTree, "tree level without captions");
    }
    total += CrossEntropy(level.logits, 0);
  }
  return total;
}

double TotalLoss(double tree, double contrast, const LossConfig& config) {
  return config.alpha * tree + (1.0 - config.alpha) * contrast;
}

}  // namespace captree
