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


#ifndef CAPTREE_SCORER_H_
#define CAPTREE_SCORER_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "captree/oracle.h"
#include "captree/util.h"

namespace captree {

// Unit-L2-norm vector.
struct Embedding {
  std::vector<double> values;

  size_t dim() const { return values.size(); }
  double norm() const;
};

// Dot product of two embeddings; 0 when either is empty.
double Cosine(const Embedding& a, const Embedding& b);

struct Cell {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

// Stand-in for a pixel image: a grid of concept names, one per image token.
// Empty strings are blank tokens.
struct ToyImage {
  std::string id;
  Grid<std::string> grid;

  // {"id": ..., "grid": [[...], ...]}
  static ToyImage FromJson(std::string_view text);
  static ToyImage Load(const std::filesystem::path& path);
  std::string ToJson() const;

  friend bool operator==(const ToyImage&, const ToyImage&) = default;
};

// Image handed to a scorer: either an in-memory toy grid or a file path the
// remote adapter can open, plus the tokens removed from it.
struct ImageRef {
  std::string id;
  std::optional<ToyImage> toy;
  std::string path;
  std::vector<Cell> masked;
  // Token grid of a path image, learned from its first relevancy map.
  std::optional<std::pair<int, int>> path_shape;

  static ImageRef FromToy(ToyImage image);
  static ImageRef FromPath(std::string id, std::string path);

  // Token-grid shape when it is known locally.
  std::optional<std::pair<int, int>> shape() const;
  // False once every token has been removed (toy: all cells blank).
  bool has_visible_tokens() const;
};

struct SimilarityMatrix {
  Grid<double> scores;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
};

struct RelevancyMap {
  Grid<double> grid;
  std::string image_id;
  std::string text;
};

class Scorer {
 public:
  virtual ~Scorer() = default;

  // Throws kEmptyInput for empty text.
  virtual Embedding EmbedText(std::string_view text) const = 0;
  // Throws kEmptyInput for an image with no visible token.
  virtual Embedding EmbedImage(const ImageRef& image) const = 0;
  virtual RelevancyMap Relevancy(const ImageRef& image,
                                 std::string_view text) const = 0;

  virtual std::vector<Embedding> EmbedTexts(
      std::span<const std::string> texts) const;
};

// scores[j][k] = cosine(image j, text k).
SimilarityMatrix ComputeSimilarityMatrix(const Scorer& scorer,
                                         std::span<const ImageRef> images,
                                         std::span<const std::string> texts);

// Offline bag-of-concepts scorer. A word or cell concept maps to a seeded
// pseudo-random unit vector; texts and images embed as the normalized mean
// of their members' vectors. Relevance of a cell is the cosine between its
// concept vector and the text embedding; blank cells score 0.
class ToyScorer : public Scorer {
 public:
  static constexpr int kDefaultDim = 64;

  explicit ToyScorer(uint64_t seed = 0, int dim = kDefaultDim);

  Embedding EmbedText(std::string_view text) const override;
  Embedding EmbedImage(const ImageRef& image) const override;
  RelevancyMap Relevancy(const ImageRef& image,
                         std::string_view text) const override;

  // Unit vector for one word or concept.
  Embedding ConceptVector(std::string_view name) const;

  int dim() const { return dim_; }

 private:
  const ToyImage& RequireToy(const ImageRef& image) const;
  std::vector<double> RawVector(std::string_view name) const;

  uint64_t seed_;
  int dim_;
};

// Client for the model adapter:
//   POST /embed_text  {"texts": [...]}                 -> {"embeddings": [[...]]}
//   POST /embed_image {"image_path": p, "mask": [[r,c]...]} -> {"embedding": [...]}
//   POST /relevancy   {"image_path": p, "mask": [...], "text": t}
//                                                      -> {"grid": [[...]], "h": H, "w": W}
// Returned vectors are renormalized to unit length.
class RemoteScorer : public Scorer {
 public:
  explicit RemoteScorer(std::string base_url, RetryPolicy retry = {});

  Embedding EmbedText(std::string_view text) const override;
  Embedding EmbedImage(const ImageRef& image) const override;
  RelevancyMap Relevancy(const ImageRef& image,
                         std::string_view text) const override;
  std::vector<Embedding> EmbedTexts(
      std::span<const std::string> texts) const override;

 private:
  std::string base_url_;
  RetryPolicy retry_;
};

}  // namespace captree

#endif  // CAPTREE_SCORER_H_
