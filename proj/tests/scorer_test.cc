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


#include <cmath>
#include <string>
#include <vector>

#include "captree/error.h"
#include "captree/scorer.h"
#include "doctest.h"

namespace captree {
namespace {

ToyImage Grid2(std::string id, std::vector<std::vector<std::string>> rows) {
  ToyImage image{std::move(id),
                 Grid<std::string>(static_cast<int>(rows.size()),
                                   static_cast<int>(rows[0].size()))};
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < rows[r].size(); ++c) {
      image.grid.at(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    }
  }
  return image;
}

double Dot(const Embedding& a, const Embedding& b) {
  double s = 0;
  for (size_t i = 0; i < a.dim(); ++i) s += a.values[i] * b.values[i];
  return s;
}

TEST_CASE("toy embeddings are deterministic unit vectors") {
  const ToyScorer scorer(3);
  const Embedding a = scorer.EmbedText("a dog on grass");
  CHECK(a.dim() == 64);
  CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ToyScorer(3).EmbedText("a dog on grass").values == a.values);
  CHECK(ToyScorer(4).EmbedText("a dog on grass").values != a.values);
  // Word order does not matter in a bag of concepts.
  const Embedding shuffled = scorer.EmbedText("grass on a dog");
  for (size_t i = 0; i < a.dim(); ++i) {
    CHECK(shuffled.values[i] == doctest::Approx(a.values[i]).epsilon(1e-12));
  }
  CHECK(ToyScorer(0, 7).EmbedText("x").dim() == 7);
}

TEST_CASE("text embedding is the normalized sum of word vectors") {
  const ToyScorer scorer(1);
  const Embedding dog = scorer.ConceptVector("dog");
  const Embedding grass = scorer.ConceptVector("grass");
  std::vector<double> sum(64);
  for (int i = 0; i < 64; ++i) sum[i] = dog.values[i] + grass.values[i];
  double n = 0;
  for (double x : sum) n += x * x;
  n = std::sqrt(n);
  const Embedding text = scorer.EmbedText("dog grass");
  for (int i = 0; i < 64; ++i) CHECK(text.values[i] == doctest::Approx(sum[i] / n));
}

TEST_CASE("overlap raises similarity") {
  const ToyScorer scorer(5);
  const ImageRef image =
      ImageRef::FromToy(Grid2("i", {{"dog", "grass"}, {"grass", ""}}));
  const Embedding e = scorer.EmbedImage(image);
  CHECK(e.norm() == doctest::Approx(1.0));
  CHECK(Cosine(e, scorer.EmbedText("dog grass")) >
        Cosine(e, scorer.EmbedText("cat sand")));
  CHECK(Cosine(e, scorer.EmbedText("dog")) > Cosine(e, scorer.EmbedText("cat")));
}

TEST_CASE("relevancy peaks on the named concept") {
  const ToyScorer scorer(2);
  const ImageRef image = ImageRef::FromToy(
      Grid2("i", {{"sky", "kite", "sky"}, {"grass", "dog", ""}}));
  const RelevancyMap map = scorer.Relevancy(image, "kite");
  CHECK(map.grid.rows() == 2);
  CHECK(map.grid.cols() == 3);
  CHECK(map.grid.at(0, 1) == doctest::Approx(1.0));
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (r == 0 && c == 1) continue;
      CHECK(map.grid.at(r, c) < map.grid.at(0, 1));
    }
  }
  CHECK(map.grid.at(1, 2) == 0.0);
  CHECK(map.text == "kite");
  CHECK(map.image_id == "i");
}

TEST_CASE("masked cells drop out") {
  const ToyScorer scorer(2);
  ImageRef image = ImageRef::FromToy(Grid2("i", {{"dog", "cat"}}));
  image.masked = {{0, 1}};
  CHECK(Cosine(scorer.EmbedImage(image), scorer.ConceptVector("dog")) ==
        doctest::Approx(1.0));
  CHECK(scorer.Relevancy(image, "cat").grid.at(0, 1) == 0.0);
  CHECK(image.has_visible_tokens());
  image.masked.push_back({0, 0});
  CHECK_FALSE(image.has_visible_tokens());
  try {
    scorer.EmbedImage(image);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyInput);
  }
}

TEST_CASE("empty inputs") {
  const ToyScorer scorer;
  CHECK_THROWS_AS(scorer.EmbedText(""), Error);
  CHECK_THROWS_AS(scorer.EmbedText(" ,. "), Error);
  CHECK_THROWS_AS(scorer.EmbedImage(ImageRef::FromToy(Grid2("b", {{"", ""}}))),
                  Error);
  CHECK_THROWS_AS(scorer.EmbedImage(ImageRef::FromPath("p", "/x.png")), Error);
  CHECK_THROWS_AS(ToyScorer(0, 0), Error);
}

TEST_CASE("similarity matrix matches pairwise cosines") {
  const ToyScorer scorer(8);
  const std::vector<ImageRef> images{
      ImageRef::FromToy(Grid2("a", {{"dog", "ball"}})),
      ImageRef::FromToy(Grid2("b", {{"cat", ""}, {"sofa", "cat"}})),
      ImageRef::FromToy(Grid2("c", {{"car"}}))};
  const std::vector<std::string> texts{"a dog with a ball", "a cat", "red car",
                                       "sofa"};
  const SimilarityMatrix m = ComputeSimilarityMatrix(scorer, images, texts);
  REQUIRE(m.scores.rows() == 3);
  REQUIRE(m.scores.cols() == 4);
  CHECK(m.row_ids == std::vector<std::string>{"a", "b", "c"});
  CHECK(m.col_ids == texts);
  for (int j = 0; j < 3; ++j) {
    const Embedding img = scorer.EmbedImage(images[j]);
    for (int k = 0; k < 4; ++k) {
      CHECK(m.scores.at(j, k) ==
            doctest::Approx(Dot(img, scorer.EmbedText(texts[k]))).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(
      ComputeSimilarityMatrix(scorer, images, std::vector<std::string>{}),
      Error);
}

TEST_CASE("cosine") {
  CHECK(Cosine({}, {{1.0}}) == 0.0);
  CHECK(Cosine({{1.0, 0.0}}, {{0.0, 1.0}}) == 0.0);
  CHECK_THROWS_AS(Cosine({{1.0}}, {{1.0, 0.0}}), Error);
}

TEST_CASE("toy image json") {
  const ToyImage image = Grid2("img", {{"a", ""}, {"b", "c"}});
  CHECK(image.ToJson() == R"({"id":"img","grid":[["a",""],["b","c"]]})");
  CHECK(ToyImage::FromJson(image.ToJson()) == image);
  for (const char* bad :
       {"{", "[]", R"({"id":"x"})", R"({"id":"x","grid":[]})",
        R"({"id":"x","grid":[["a"],["b","c"]]})",
        R"({"id":"x","grid":[[1]]})"}) {
    try {
      ToyImage::FromJson(bad);
      FAIL("accepted " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParse);
    }
  }
}

TEST_CASE("image shapes") {
  CHECK(ImageRef::FromToy(Grid2("x", {{"a", "b", "c"}})).shape() ==
        std::make_pair(1, 3));
  ImageRef path = ImageRef::FromPath("p", "/img/p.jpg");
  CHECK_FALSE(path.shape().has_value());
  CHECK(path.has_visible_tokens());
  path.path_shape = std::make_pair(1, 2);
  path.masked = {{0, 0}, {0, 0}};
  CHECK(path.has_visible_tokens());
  path.masked.push_back({0, 1});
  CHECK_FALSE(path.has_visible_tokens());
}

}  // namespace
}  // namespace captree
