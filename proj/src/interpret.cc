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


#include "captree/interpret.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "captree/caption.h"
#include "captree/error.h"
#include "json.hpp"

namespace captree {
namespace {

// Absorbs representation error in products like 0.7 * 10 so the count
// matches the exact rational floor.
constexpr double kCountSlack = 1e-9;

std::string FormatDouble(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

void RequireFraction(double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "removal fraction must lie in [0, 1], got " +
                    FormatDouble(fraction));
  }
}

double ScoreMasked(const ImageRef& image, const Embedding& text,
                   const Scorer& scorer) {
  if (!image.has_visible_tokens()) return 0.0;
  return Cosine(scorer.EmbedImage(image), text);
}

Prediction Decide(double positive_score, double negative_score) {
  Prediction p;
  p.positive_score = positive_score;
  p.negative_score = negative_score;
  p.margin = positive_score - negative_score;
  p.choice = positive_score > negative_score ? Choice::kPositive
                                             : Choice::kNegative;
  return p;
}

// Per-case state reused across fractions: text embeddings and the
// relevancy map(s) the strategy removes by.
struct PreparedCase {
  Embedding positive;
  Embedding negative;
  RelevancyMap shared;
  RelevancyMap positive_map;
  RelevancyMap negative_map;
};

PreparedCase Prepare(const ImageRef& image, std::string_view positive,
                     std::string_view negative, RemovalStrategy strategy,
                     const Scorer& scorer) {
  PreparedCase prepared;
  prepared.positive = scorer.EmbedText(positive);
  prepared.negative = scorer.EmbedText(negative);
  switch (strategy) {
    case RemovalStrategy::kPerText:
      prepared.positive_map = scorer.Relevancy(image, positive);
      prepared.negative_map = scorer.Relevancy(image, negative);
      break;
    case RemovalStrategy::kAnchor:
      prepared.shared =
          scorer.Relevancy(image, MakeAnchorText(positive, negative).text);
      break;
    case RemovalStrategy::kDiRe:
      prepared.shared = DiRe(scorer.Relevancy(image, positive),
                             scorer.Relevancy(image, negative));
      break;
  }
  return prepared;
}

Prediction PredictPrepared(const ImageRef& image, const PreparedCase& prepared,
                           RemovalStrategy strategy, double fraction,
                           const Scorer& scorer) {
  if (strategy == RemovalStrategy::kPerText) {
    const ImageRef for_positive =
        RemoveTokens(image, prepared.positive_map, fraction);
    const ImageRef for_negative =
        RemoveTokens(image, prepared.negative_map, fraction);
    return Decide(ScoreMasked(for_positive, prepared.positive, scorer),
                  ScoreMasked(for_negative, prepared.negative, scorer));
  }
  const ImageRef masked = RemoveTokens(image, prepared.shared, fraction);
  if (!masked.has_visible_tokens()) return Decide(0.0, 0.0);
  const Embedding embedded = scorer.EmbedImage(masked);
  return Decide(Cosine(embedded, prepared.positive),
                Cosine(embedded, prepared.negative));
}

}  // namespace

std::string_view RemovalStrategyName(RemovalStrategy strategy) {
  switch (strategy) {
    case RemovalStrategy::kPerText: return "per-text";
    case RemovalStrategy::kAnchor: return "anchor";
    case RemovalStrategy::kDiRe: return "dire";
  }
  return "per-text";
}

std::optional<RemovalStrategy> ParseRemovalStrategy(std::string_view name) {
  for (RemovalStrategy s : {RemovalStrategy::kPerText, RemovalStrategy::kAnchor,
                            RemovalStrategy::kDiRe}) {
    if (RemovalStrategyName(s) == name) return s;
  }
  return std::nullopt;
}

AnchorText MakeAnchorText(std::string_view positive,
                          std::string_view negative) {
  const std::vector<Token> pos = Tokenize(positive);
  const std::vector<Token> neg = Tokenize(negative);
  if (JoinTokens(pos) == JoinTokens(neg)) {
    throw Error(ErrorCode::kIdenticalTexts,
                "\"" + JoinTokens(pos) + "\" on both sides");
  }
  const size_t shortest = std::min(pos.size(), neg.size());
  size_t prefix = 0;
  while (prefix < shortest && pos[prefix].text == neg[prefix].text) ++prefix;
  size_t suffix = 0;
  while (suffix < shortest - prefix &&
         pos[pos.size() - 1 - suffix].text == neg[neg.size() - 1 - suffix].text) {
    ++suffix;
  }
  const int pos_end = static_cast<int>(pos.size() - suffix);
  const int neg_end = static_cast<int>(neg.size() - suffix);
  const int start = static_cast<int>(prefix);
  if (pos_end == start || neg_end == start) {
    throw Error(ErrorCode::kUndiffable,
                "\"" + JoinTokens(pos) + "\" and \"" + JoinTokens(neg) +
                    "\" differ by an insertion only");
  }

  std::vector<std::string> words;
  auto append = [&](const std::vector<Token>& tokens, int from, int to) {
    for (int i = from; i < to; ++i) words.push_back(tokens[i].text);
  };
  append(pos, start, static_cast<int>(pos.size()));
  words.push_back("or");
  append(neg, start, static_cast<int>(neg.size()));

  AnchorText anchor;
  anchor.text = Join(words, " ");
  anchor.pos_diff_span = {start, pos_end};
  anchor.neg_diff_span = {start, neg_end};
  return anchor;
}

RelevancyMap DiRe(const RelevancyMap& positive, const RelevancyMap& negative) {
  if (!positive.grid.same_shape(negative.grid)) {
    throw Error(ErrorCode::kShapeMismatch,
                std::to_string(positive.grid.rows()) + "x" +
                    std::to_string(positive.grid.cols()) + " vs " +
                    std::to_string(negative.grid.rows()) + "x" +
                    std::to_string(negative.grid.cols()));
  }
  if (positive.image_id != negative.image_id) {
    throw Error(ErrorCode::kShapeMismatch,
                "maps belong to different images (" + positive.image_id +
                    ", " + negative.image_id + ")");
  }
  RelevancyMap out{positive.grid, positive.image_id,
                   positive.text + " - " + negative.text};
  auto& values = out.grid.values();
  const auto& subtrahend = negative.grid.values();
  for (size_t i = 0; i < values.size(); ++i) values[i] -= subtrahend[i];
  return out;
}

RemovalPlan PlanRemoval(const RelevancyMap& relevancy, double fraction) {
  RequireFraction(fraction);
  const Grid<double>& grid = relevancy.grid;
  RemovalPlan plan;
  plan.fraction = fraction;
  plan.order.reserve(grid.size());
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) plan.order.push_back({r, c});
  }
  // Row-major construction plus a stable sort breaks ties by (row, col).
  std::stable_sort(plan.order.begin(), plan.order.end(),
                   [&](const Cell& a, const Cell& b) {
                     return grid.at(a.row, a.col) < grid.at(b.row, b.col);
                   });
  const double total = static_cast<double>(grid.size());
  plan.removed_count = std::min(
      grid.size(),
      static_cast<size_t>(std::floor(fraction * total + kCountSlack)));
  return plan;
}

ImageRef RemoveTokens(const ImageRef& image, const RelevancyMap& relevancy,
                      double fraction) {
  if (auto shape = image.shape();
      shape && *shape != std::make_pair(relevancy.grid.rows(),
                                        relevancy.grid.cols())) {
    throw Error(ErrorCode::kShapeMismatch,
                "relevancy map does not match the token grid of " + image.id);
  }
  const RemovalPlan plan = PlanRemoval(relevancy, fraction);
  ImageRef out = image;
  if (!out.toy) {
    out.path_shape = std::make_pair(relevancy.grid.rows(),
                                    relevancy.grid.cols());
  }
  for (const Cell& cell : plan.removed()) {
    out.masked.push_back(cell);
    if (out.toy) out.toy->grid.at(cell.row, cell.col).clear();
  }
  std::sort(out.masked.begin(), out.masked.end());
  out.masked.erase(std::unique(out.masked.begin(), out.masked.end()),
                   out.masked.end());
  return out;
}

std::vector<RelevancyMap> RemovalMaps(const ImageRef& image,
                                      std::string_view positive,
                                      std::string_view negative,
                                      RemovalStrategy strategy,
                                      const Scorer& scorer) {
  PreparedCase prepared = Prepare(image, positive, negative, strategy, scorer);
  if (strategy == RemovalStrategy::kPerText) {
    return {std::move(prepared.positive_map), std::move(prepared.negative_map)};
  }
  return {std::move(prepared.shared)};
}

Prediction Predict(const ImageRef& image, std::string_view positive,
                   std::string_view negative, RemovalStrategy strategy,
                   double fraction, const Scorer& scorer) {
  RequireFraction(fraction);
  const PreparedCase prepared =
      Prepare(image, positive, negative, strategy, scorer);
  return PredictPrepared(image, prepared, strategy, fraction, scorer);
}

std::vector<PerturbationPoint> PerturbationCurve(
    std::span<const PerturbationCase> cases, RemovalStrategy strategy,
    std::span<const double> fractions, const Scorer& scorer, int workers) {
  if (cases.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no perturbation cases");
  }
  for (size_t i = 0; i < fractions.size(); ++i) {
    RequireFraction(fractions[i]);
    if (i > 0 && !(fractions[i] > fractions[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "fractions must be strictly increasing");
    }
  }
  // hits[case][fraction]
  const auto hits = ParallelMap(cases.size(), workers, [&](size_t i) {
    const PerturbationCase& c = cases[i];
    const PreparedCase prepared =
        Prepare(c.image, c.positive, c.negative, strategy, scorer);
    std::vector<int> row;
    row.reserve(fractions.size());
    for (double fraction : fractions) {
      row.push_back(PredictPrepared(c.image, prepared, strategy, fraction,
                                    scorer)
                        .choice == Choice::kPositive);
    }
    return row;
  });
  std::vector<PerturbationPoint> curve;
  for (size_t f = 0; f < fractions.size(); ++f) {
    size_t correct = 0;
    for (const auto& row : hits) correct += static_cast<size_t>(row[f]);
    curve.push_back({fractions[f],
                     static_cast<double>(correct) /
                         static_cast<double>(cases.size()),
                     strategy});
  }
  return curve;
}

std::string CurveCsv(std::span<const PerturbationPoint> points) {
  std::string out = "strategy,fraction,accuracy\n";
  for (const PerturbationPoint& p : points) {
    out += std::string(RemovalStrategyName(p.strategy)) + "," +
           FormatDouble(p.fraction) + "," + FormatDouble(p.accuracy) + "\n";
  }
  return out;
}

std::string RelevancyJson(const RelevancyMap& map) {
  nlohmann::ordered_json doc;
  doc["image_id"] = map.image_id;
  doc["text"] = map.text;
  doc["h"] = map.grid.rows();
  doc["w"] = map.grid.cols();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int r = 0; r < map.grid.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int c = 0; c < map.grid.cols(); ++c) row.push_back(map.grid.at(r, c));
    rows.push_back(std::move(row));
  }
  doc["grid"] = std::move(rows);
  return doc.dump();
}

std::string RelevancyPgm(const RelevancyMap& map) {
  const auto& values = map.grid.values();
  std::string out = "P5\n" + std::to_string(map.grid.cols()) + " " +
                    std::to_string(map.grid.rows()) + "\n255\n";
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double span = *hi - *lo;
  for (double v : values) {
    const double scaled = span > 0.0 ? (v - *lo) / span * 255.0 : 0.0;
    out.push_back(static_cast<char>(
        static_cast<unsigned char>(std::lround(std::clamp(scaled, 0.0, 255.0)))));
  }
  return out;
}

}  // namespace captree
