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


#include "captree/scorer.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "captree/caption.h"
#include "captree/error.h"
#include "http_client.h"

namespace captree {
namespace {

void NormalizeInPlace(std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  const double norm = std::sqrt(sum);
  if (norm == 0.0 || !std::isfinite(norm)) {
    throw Error(ErrorCode::kEmptyInput, "cannot normalize a zero vector");
  }
  for (double& x : v) x /= norm;
}

Embedding EmbeddingFromJson(const nlohmann::json& value,
                            const std::string& where) {
  if (!value.is_array() || value.empty()) {
    throw Error(ErrorCode::kParse, where + ": embedding is not a vector");
  }
  Embedding e;
  for (const auto& x : value) {
    if (!x.is_number()) {
      throw Error(ErrorCode::kParse, where + ": non-numeric embedding entry");
    }
    e.values.push_back(x.get<double>());
  }
  if (std::all_of(e.values.begin(), e.values.end(),
                  [](double x) { return x == 0.0; })) {
    throw Error(ErrorCode::kParse, where + ": zero embedding");
  }
  NormalizeInPlace(e.values);
  return e;
}

nlohmann::json ImageBody(const ImageRef& image) {
  if (image.path.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "remote scorer needs an image path for " + image.id);
  }
  nlohmann::json body;
  body["image_path"] = image.path;
  nlohmann::json mask = nlohmann::json::array();
  for (const Cell& cell : image.masked) mask.push_back({cell.row, cell.col});
  body["mask"] = std::move(mask);
  return body;
}

bool IsMasked(const ImageRef& image, int r, int c) {
  return std::find(image.masked.begin(), image.masked.end(), Cell{r, c}) !=
         image.masked.end();
}

}  // namespace

double Embedding::norm() const {
  double sum = 0.0;
  for (double x : values) sum += x * x;
  return std::sqrt(sum);
}

double Cosine(const Embedding& a, const Embedding& b) {
  if (a.values.empty() || b.values.empty()) return 0.0;
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kShapeMismatch,
                "embedding dimensions " + std::to_string(a.dim()) + " vs " +
                    std::to_string(b.dim()));
  }
  double dot = 0.0;
  for (size_t i = 0; i < a.dim(); ++i) dot += a.values[i] * b.values[i];
  return std::clamp(dot, -1.0, 1.0);
}

ToyImage ToyImage::FromJson(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("toy image: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("id") || !doc.contains("grid") ||
      !doc["id"].is_string() || !doc["grid"].is_array() ||
      doc["grid"].empty()) {
    throw Error(ErrorCode::kParse,
                "toy image needs a string 'id' and a non-empty 'grid'");
  }
  const auto& rows = doc["grid"];
  const int h = static_cast<int>(rows.size());
  if (!rows[0].is_array() || rows[0].empty()) {
    throw Error(ErrorCode::kParse, "toy image rows must be non-empty arrays");
  }
  const int w = static_cast<int>(rows[0].size());
  ToyImage image{doc["id"].get<std::string>(), Grid<std::string>(h, w)};
  for (int r = 0; r < h; ++r) {
    if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != w) {
      throw Error(ErrorCode::kParse, "toy image rows differ in length");
    }
    for (int c = 0; c < w; ++c) {
      if (!rows[r][c].is_string()) {
        throw Error(ErrorCode::kParse, "toy image cells must be strings");
      }
      image.grid.at(r, c) = rows[r][c].get<std::string>();
    }
  }
  return image;
}

ToyImage ToyImage::Load(const std::filesystem::path& path) {
  return FromJson(ReadFile(path));
}

std::string ToyImage::ToJson() const {
  nlohmann::ordered_json doc;
  doc["id"] = id;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int r = 0; r < grid.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int c = 0; c < grid.cols(); ++c) row.push_back(grid.at(r, c));
    rows.push_back(std::move(row));
  }
  doc["grid"] = std::move(rows);
  return doc.dump();
}

ImageRef ImageRef::FromToy(ToyImage image) {
  ImageRef ref;
  ref.id = image.id;
  ref.toy = std::move(image);
  return ref;
}

ImageRef ImageRef::FromPath(std::string id, std::string path) {
  ImageRef ref;
  ref.id = std::move(id);
  ref.path = std::move(path);
  return ref;
}

std::optional<std::pair<int, int>> ImageRef::shape() const {
  if (toy) return std::make_pair(toy->grid.rows(), toy->grid.cols());
  return path_shape;
}

bool ImageRef::has_visible_tokens() const {
  if (toy) {
    for (int r = 0; r < toy->grid.rows(); ++r) {
      for (int c = 0; c < toy->grid.cols(); ++c) {
        if (!toy->grid.at(r, c).empty() && !IsMasked(*this, r, c)) return true;
      }
    }
    return false;
  }
  if (path_shape) {
    const std::set<Cell> unique(masked.begin(), masked.end());
    return static_cast<int>(unique.size()) <
           path_shape->first * path_shape->second;
  }
  return true;
}

std::vector<Embedding> Scorer::EmbedTexts(
    std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) out.push_back(EmbedText(text));
  return out;
}

SimilarityMatrix ComputeSimilarityMatrix(const Scorer& scorer,
                                         std::span<const ImageRef> images,
                                         std::span<const std::string> texts) {
  if (images.empty() || texts.empty()) {
    throw Error(ErrorCode::kEmptyInput,
                "similarity matrix needs at least one image and one text");
  }
  const std::vector<Embedding> text_embeddings = scorer.EmbedTexts(texts);
  SimilarityMatrix matrix;
  matrix.scores = Grid<double>(static_cast<int>(images.size()),
                               static_cast<int>(texts.size()));
  for (size_t j = 0; j < images.size(); ++j) {
    const Embedding image = scorer.EmbedImage(images[j]);
    matrix.row_ids.push_back(images[j].id);
    for (size_t k = 0; k < texts.size(); ++k) {
      matrix.scores.at(static_cast<int>(j), static_cast<int>(k)) =
          Cosine(image, text_embeddings[k]);
    }
  }
  matrix.col_ids.assign(texts.begin(), texts.end());
  return matrix;
}

ToyScorer::ToyScorer(uint64_t seed, int dim) : seed_(seed), dim_(dim) {
  if (dim < 1) {
    throw Error(ErrorCode::kInvalidArgument, "embedding dimension must be >= 1");
  }
}

std::vector<double> ToyScorer::RawVector(std::string_view name) const {
  // Box-Muller over the seeded generator gives an isotropic direction.
  SeededRng rng(MixSeed(seed_, name));
  std::vector<double> v(static_cast<size_t>(dim_));
  for (int i = 0; i < dim_; i += 2) {
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    v[i] = radius * std::cos(2.0 * std::numbers::pi * u2);
    if (i + 1 < dim_) v[i + 1] = radius * std::sin(2.0 * std::numbers::pi * u2);
  }
  NormalizeInPlace(v);
  return v;
}

Embedding ToyScorer::ConceptVector(std::string_view name) const {
  return Embedding{RawVector(name)};
}

Embedding ToyScorer::EmbedText(std::string_view text) const {
  std::vector<Token> tokens;
  try {
    tokens = Tokenize(text);
  } catch (const Error&) {
    throw Error(ErrorCode::kEmptyInput, "empty text");
  }
  std::vector<double> sum(static_cast<size_t>(dim_), 0.0);
  for (const Token& token : tokens) {
    const std::vector<double> v = RawVector(token.text);
    for (int i = 0; i < dim_; ++i) sum[i] += v[i];
  }
  NormalizeInPlace(sum);
  return Embedding{std::move(sum)};
}

const ToyImage& ToyScorer::RequireToy(const ImageRef& image) const {
  if (!image.toy) {
    throw Error(ErrorCode::kInvalidArgument,
                "toy scorer needs a toy image for " + image.id);
  }
  return *image.toy;
}

Embedding ToyScorer::EmbedImage(const ImageRef& image) const {
  const ToyImage& toy = RequireToy(image);
  std::vector<double> sum(static_cast<size_t>(dim_), 0.0);
  int count = 0;
  for (int r = 0; r < toy.grid.rows(); ++r) {
    for (int c = 0; c < toy.grid.cols(); ++c) {
      const std::string& name = toy.grid.at(r, c);
      if (name.empty() || IsMasked(image, r, c)) continue;
      const std::vector<double> v = RawVector(name);
      for (int i = 0; i < dim_; ++i) sum[i] += v[i];
      ++count;
    }
  }
  if (count == 0) {
    throw Error(ErrorCode::kEmptyInput, "image " + image.id + " is blank");
  }
  NormalizeInPlace(sum);
  return Embedding{std::move(sum)};
}

RelevancyMap ToyScorer::Relevancy(const ImageRef& image,
                                  std::string_view text) const {
  const ToyImage& toy = RequireToy(image);
  const Embedding text_embedding = EmbedText(text);
  RelevancyMap map{Grid<double>(toy.grid.rows(), toy.grid.cols(), 0.0),
                   image.id, std::string(text)};
  for (int r = 0; r < toy.grid.rows(); ++r) {
    for (int c = 0; c < toy.grid.cols(); ++c) {
      const std::string& name = toy.grid.at(r, c);
      if (name.empty() || IsMasked(image, r, c)) continue;
      map.grid.at(r, c) = Cosine(ConceptVector(name), text_embedding);
    }
  }
  return map;
}

RemoteScorer::RemoteScorer(std::string base_url, RetryPolicy retry)
    : base_url_(std::move(base_url)), retry_(retry) {}

std::vector<Embedding> RemoteScorer::EmbedTexts(
    std::span<const std::string> texts) const {
  for (const std::string& text : texts) {
    if (NormalizeText(text).empty()) {
      throw Error(ErrorCode::kEmptyInput, "empty text");
    }
  }
  nlohmann::json body;
  body["texts"] = std::vector<std::string>(texts.begin(), texts.end());
  const nlohmann::json reply = internal::PostJson(
      base_url_, "/embed_text", body, retry_, ErrorCode::kRemoteUnavailable);
  if (!reply.is_object() || !reply.contains("embeddings") ||
      !reply["embeddings"].is_array() ||
      reply["embeddings"].size() != texts.size()) {
    throw Error(ErrorCode::kParse,
                base_url_ + "/embed_text: expected " +
                    std::to_string(texts.size()) + " embeddings");
  }
  std::vector<Embedding> out;
  for (const auto& value : reply["embeddings"]) {
    out.push_back(EmbeddingFromJson(value, base_url_ + "/embed_text"));
  }
  for (const Embedding& e : out) {
    if (e.dim() != out.front().dim()) {
      throw Error(ErrorCode::kParse, base_url_ + "/embed_text: ragged reply");
    }
  }
  return out;
}

Embedding RemoteScorer::EmbedText(std::string_view text) const {
  const std::string owned(text);
  return EmbedTexts(std::span<const std::string>(&owned, 1)).front();
}

Embedding RemoteScorer::EmbedImage(const ImageRef& image) const {
  if (!image.has_visible_tokens()) {
    throw Error(ErrorCode::kEmptyInput, "image " + image.id + " is blank");
  }
  const nlohmann::json reply =
      internal::PostJson(base_url_, "/embed_image", ImageBody(image), retry_,
                         ErrorCode::kRemoteUnavailable);
  if (!reply.is_object() || !reply.contains("embedding")) {
    throw Error(ErrorCode::kParse, base_url_ + "/embed_image: no embedding");
  }
  return EmbeddingFromJson(reply["embedding"], base_url_ + "/embed_image");
}

RelevancyMap RemoteScorer::Relevancy(const ImageRef& image,
                                     std::string_view text) const {
  nlohmann::json body = ImageBody(image);
  body["text"] = text;
  const nlohmann::json reply = internal::PostJson(
      base_url_, "/relevancy", body, retry_, ErrorCode::kRemoteUnavailable);
  const std::string where = base_url_ + "/relevancy";
  if (!reply.is_object() || !reply.contains("grid") || !reply.contains("h") ||
      !reply.contains("w") || !reply["h"].is_number_integer() ||
      !reply["w"].is_number_integer()) {
    throw Error(ErrorCode::kParse, where + ": expected grid, h and w");
  }
  const int h = reply["h"].get<int>();
  const int w = reply["w"].get<int>();
  const auto& rows = reply["grid"];
  if (h < 1 || w < 1 || !rows.is_array() ||
      static_cast<int>(rows.size()) != h) {
    throw Error(ErrorCode::kParse, where + ": grid does not match h");
  }
  RelevancyMap map{Grid<double>(h, w), image.id, std::string(text)};
  for (int r = 0; r < h; ++r) {
    if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != w) {
      throw Error(ErrorCode::kParse, where + ": grid does not match w");
    }
    for (int c = 0; c < w; ++c) {
      if (!rows[r][c].is_number()) {
        throw Error(ErrorCode::kParse, where + ": non-numeric cell");
      }
      const double v = rows[r][c].get<double>();
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kParse, where + ": non-finite cell");
      }
      map.grid.at(r, c) = v;
    }
  }
  if (auto shape = image.shape(); shape && *shape != std::make_pair(h, w)) {
    throw Error(ErrorCode::kShapeMismatch,
                where + ": grid shape differs from the image token grid");
  }
  return map;
}

}  // namespace captree
