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


// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Expected values come from independent oracles below, not
// from the library under test.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "captree/analysis.h"
#include "captree/caption_tree.h"
#include "captree/config.h"
#include "captree/error.h"
#include "captree/interpret.h"
#include "captree/loss.h"
#include "captree/negatives.h"
#include "captree/oracle.h"
#include "captree/records.h"
#include "captree/scorer.h"
#include "captree/util.h"
#include "captree/wordnet.h"
#include "json.hpp"

namespace captree {
namespace {

namespace fs = std::filesystem;

using Outcome = std::optional<std::string>;  // failure detail, empty on pass

constexpr char kExample[] =
    "several people standing in a green field together while flying kites";

const fs::path kData = CAPTREE_TEST_DATA;

const Tagger& DefaultTagger() {
  static const Tagger tagger(Lexicon::Builtin());
  return tagger;
}

const WordNetStore& FixtureWordNet() {
  static const WordNetStore store = WordNetStore::Load(kData / "wordnet");
  return store;
}

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string FirstLine(const fs::path& path) {
  std::string text = ReadFile(path);
  if (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

CaptionTree StubTree(TreeStructure structure) {
  const StubOracle oracle = StubOracle::Load(kData / "oracle_stub.json");
  CaptionTree tree =
      BuildTree("1", ParseCaption(kExample, DefaultTagger()), structure);
  NegativeStrategy strategy;
  strategy.store = &FixtureWordNet();
  strategy.oracle = &oracle;
  AttachNegatives(tree, strategy);
  return tree;
}

// ---------------------------------------------------------------- trees

int RunCli(const std::string& args) {
  const std::string command =
      std::string("\"") + CAPTREE_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Quote(const fs::path& path) { return "\"" + path.string() + "\""; }

// Runs build-tree on the golden caption and compares its output file.
Outcome CliMatchesGolden(const std::string& structure) {
  const fs::path out =
      fs::path(CAPTREE_TEST_TMP) / "acceptance" / (structure + ".jsonl");
  fs::create_directories(out.parent_path());
  const int rc = RunCli("build-tree --captions " +
                        Quote(kData / "golden" / "caption.txt") + " --out " +
                        Quote(out) + " --structure " + structure + " --wordnet " +
                        Quote(kData / "wordnet") + " --oracle " +
                        Quote(kData / "oracle_stub.json"));
  if (rc != 0) return "build-tree exited " + std::to_string(rc);
  if (ReadFile(out) != ReadFile(kData / "golden" / (structure + ".jsonl"))) {
    return "CLI output differs from the golden file";
  }
  return std::nullopt;
}


Outcome GoldenIncremental() {
  const CaptionTree tree = StubTree(TreeStructure::kIncremental);
  if (TreeToJsonLine(tree) != FirstLine(kData / "golden" / "incremental.jsonl")) {
    return "JSONL differs from the golden file";
  }
  if (Outcome cli = CliMatchesGolden("incremental")) return cli;
  const std::vector<std::string> levels{
      "several people", "several people and a green field",
      "several people standing in a green field", kExample};
  if (tree.levels.size() != levels.size()) return "level count";
  for (size_t i = 0; i < levels.size(); ++i) {
    if (tree.levels[i].positive != levels[i]) return "level " + std::to_string(i);
  }
  if (tree.negative_count() != 8) {
    return "expected 8 negatives, got " + std::to_string(tree.negative_count());
  }
  std::string all;
  for (const TreeLevel& level : tree.levels) {
    for (const Negative& n : level.negatives) all += "|" + n.text + "|";
  }
  for (const char* phrase :
       {"one people", "several animals", "a blue field", "a green forest",
        "gathered", "standing out", "soaring", "sales"}) {
    if (all.find(phrase) == std::string::npos) {
      return std::string("missing negative \"") + phrase + "\"";
    }
  }
  return std::nullopt;
}

Outcome GoldenBasic() {
  const CaptionTree tree = StubTree(TreeStructure::kBasic);
  if (TreeToJsonLine(tree) != FirstLine(kData / "golden" / "basic.jsonl")) {
    return "JSONL differs from the golden file";
  }
  if (Outcome cli = CliMatchesGolden("basic")) return cli;
  const std::vector<std::string> levels{"several people", "a green field",
                                        kExample};
  if (tree.levels.size() != 3) return "expected 3 levels";
  for (size_t i = 0; i < 3; ++i) {
    if (tree.levels[i].positive != levels[i]) return "level " + std::to_string(i);
  }
  return std::nullopt;
}

// ----------------------------------------------------------------- loss

// Plain softmax followed by -log; no stabilization.
double NaiveCe(const std::vector<double>& z, size_t target) {
  std::vector<double> e;
  double denom = 0.0;
  for (double x : z) {
    e.push_back(std::exp(x));
    denom += e.back();
  }
  return -std::log(e[target] / denom);
}

bool Close(double got, double want, double rel) {
  return std::abs(got - want) <= rel * std::max(1.0, std::abs(want));
}

Outcome LossOracle() {
  SeededRng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(16));
    Grid<double> s(n, n);
    for (double& v : s.values()) v = rng.uniform() * 6.0 - 3.0;
    double img = 0.0, txt = 0.0;
    for (int i = 0; i < n; ++i) {
      std::vector<double> row, col;
      for (int k = 0; k < n; ++k) {
        row.push_back(s.at(i, k));
        col.push_back(s.at(k, i));
      }
      img += NaiveCe(row, i);
      txt += NaiveCe(col, i);
    }
    const double want = 0.5 * (img / n + txt / n);
    if (!Close(ContrastiveLoss(s), want, 1e-9)) {
      return "contrastive trial " + std::to_string(trial) + ": " +
             Fmt(ContrastiveLoss(s)) + " vs " + Fmt(want);
    }
  }
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<LevelScores> levels(1 + rng.below(6));
    double want = 0.0;
    for (LevelScores& level : levels) {
      level.logits.resize(1 + rng.below(10));
      for (double& z : level.logits) z = rng.uniform() * 2.0 - 1.0;
      want += NaiveCe(level.logits, 0);
    }
    if (!Close(TreeLoss(levels), want, 1e-9)) {
      return "tree trial " + std::to_string(trial);
    }
    LossConfig config;
    config.alpha = 0.01 + 0.98 * rng.uniform();
    const double contrast = rng.uniform() * 3.0;
    const double total = config.alpha * want + (1.0 - config.alpha) * contrast;
    if (!Close(TotalLoss(TreeLoss(levels), contrast, config), total, 1e-9)) {
      return "total trial " + std::to_string(trial);
    }
  }
  for (int n = 1; n <= 16; ++n) {
    const double c = rng.uniform();
    if (std::abs(ContrastiveLoss(Grid<double>(n, n, c)) - std::log(n)) > 1e-12) {
      return "uniform contrastive N=" + std::to_string(n);
    }
    const std::vector<LevelScores> uniform{{std::vector<double>(n, c)}};
    if (std::abs(TreeLoss(uniform) - std::log(n)) > 1e-12) {
      return "uniform tree N=" + std::to_string(n);
    }
  }
  return std::nullopt;
}

Outcome LossBlend() {
  LossConfig half;
  half.alpha = 0.5;
  if (TotalLoss(1.0, 0.5, half) != 0.75) {
    return "total(1.0, 0.5, 0.5) = " + Fmt(TotalLoss(1.0, 0.5, half));
  }
  SeededRng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    LossConfig config;
    config.alpha = 0.01 + 0.98 * rng.uniform();
    const double t1 = rng.uniform() * 4, c1 = rng.uniform() * 4;
    const double t2 = rng.uniform() * 4, c2 = rng.uniform() * 4;
    const double k = rng.uniform() * 3;
    const double additive = TotalLoss(t1 + t2, c1 + c2, config) -
                            TotalLoss(t1, c1, config) - TotalLoss(t2, c2, config);
    const double scaling = TotalLoss(k * t1, k * c1, config) -
                           k * TotalLoss(t1, c1, config);
    if (std::abs(additive) > 1e-12 || std::abs(scaling) > 1e-12) {
      return "linearity trial " + std::to_string(trial);
    }
  }
  return std::nullopt;
}

// ------------------------------------------------------- interpretability

Outcome AnchorGolden() {
  const std::string got = MakeAnchorText("people playing with airborne frisbee",
                                         "people playing with sitting frisbee")
                              .text;
  if (got != "airborne frisbee or sitting frisbee") return "got \"" + got + "\"";
  return std::nullopt;
}

RelevancyMap RandomMap(SeededRng& rng, int h, int w, std::string id = "img") {
  RelevancyMap m{Grid<double>(h, w), std::move(id), "t"};
  for (double& v : m.grid.values()) {
    // A coarse grid of values so ties are common.
    v = rng.below(3) == 0 ? static_cast<double>(rng.below(4)) / 4.0
                          : rng.uniform() * 2.0 - 1.0;
  }
  return m;
}

Outcome DiReProperties() {
  SeededRng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const int h = 1 + static_cast<int>(rng.below(12));
    const int w = 1 + static_cast<int>(rng.below(12));
    const RelevancyMap a = RandomMap(rng, h, w);
    const RelevancyMap b = RandomMap(rng, h, w);
    const RelevancyMap ab = DiRe(a, b);
    const RelevancyMap ba = DiRe(b, a);
    const RelevancyMap aa = DiRe(a, a);
    for (size_t i = 0; i < a.grid.values().size(); ++i) {
      if (ab.grid.values()[i] != a.grid.values()[i] - b.grid.values()[i]) {
        return "difference trial " + std::to_string(trial);
      }
      if (ab.grid.values()[i] != -ba.grid.values()[i]) {
        return "antisymmetry trial " + std::to_string(trial);
      }
      if (aa.grid.values()[i] != 0.0) return "identity trial " + std::to_string(trial);
    }
    const RelevancyMap other = RandomMap(rng, h + 1 + static_cast<int>(rng.below(2)), w);
    try {
      DiRe(a, other);
      return "shape mismatch accepted in trial " + std::to_string(trial);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kShapeMismatch) return "wrong error code";
    }
  }
  return std::nullopt;
}

Outcome RemovalNesting() {
  SeededRng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int h = 1 + static_cast<int>(rng.below(16));
    const int w = 1 + static_cast<int>(rng.below(16));
    const RelevancyMap m = RandomMap(rng, h, w);
    const size_t cells = static_cast<size_t>(h * w);
    std::set<Cell> previous;
    for (int tenth = 0; tenth <= 10; ++tenth) {
      const RemovalPlan plan = PlanRemoval(m, tenth / 10.0);
      const std::set<Cell> removed(plan.removed().begin(), plan.removed().end());
      // Exact floor(f * HW) with f = tenth / 10, in integers.
      if (removed.size() != plan.removed().size() ||
          removed.size() != tenth * cells / 10) {
        return "size at " + std::to_string(tenth) + "/10, trial " +
               std::to_string(trial);
      }
      if (!std::includes(removed.begin(), removed.end(), previous.begin(),
                         previous.end())) {
        return "not nested at " + std::to_string(tenth) + "/10";
      }
      double highest_removed = -INFINITY;
      for (const Cell& c : removed) {
        highest_removed = std::max(highest_removed, m.grid.at(c.row, c.col));
      }
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          if (!removed.contains({r, c}) && m.grid.at(r, c) < highest_removed) {
            return "kept a less relevant cell";
          }
        }
      }
      previous = removed;
    }
  }
  return std::nullopt;
}

// Independent re-implementation of the toy pipeline on top of the concept
// vectors: bag-of-concepts embeddings, relevance ranking, token removal and
// the strict-greater decision rule.
class Recount {
 public:
  explicit Recount(const ToyScorer& scorer) : scorer_(scorer) {}

  bool PositiveWins(const ToyImage& image, const std::string& pos,
                    const std::string& neg, double fraction) const {
    const std::vector<double> anchor = Text(AnchorOf(pos, neg));
    const int h = image.grid.rows(), w = image.grid.cols();
    std::vector<std::pair<double, int>> ranked;
    for (int i = 0; i < h * w; ++i) {
      const std::string& name = image.grid.values()[i];
      const double rel =
          name.empty() ? 0.0 : std::clamp(Dot(Vec(name), anchor), -1.0, 1.0);
      ranked.push_back({rel, i});
    }
    std::sort(ranked.begin(), ranked.end());
    const size_t removed =
        static_cast<size_t>(std::floor(fraction * h * w + 1e-9));
    std::vector<double> sum(scorer_.dim(), 0.0);
    int visible = 0;
    for (size_t k = removed; k < ranked.size(); ++k) {
      const std::string& name = image.grid.values()[ranked[k].second];
      if (name.empty()) continue;
      const std::vector<double> v = Vec(name);
      for (size_t d = 0; d < sum.size(); ++d) sum[d] += v[d];
      ++visible;
    }
    if (visible == 0) return false;
    Normalize(sum);
    const double p = std::clamp(Dot(sum, Text(pos)), -1.0, 1.0);
    const double n = std::clamp(Dot(sum, Text(neg)), -1.0, 1.0);
    return p > n;
  }

 private:
  static std::string AnchorOf(const std::string& pos, const std::string& neg) {
    const auto a = SplitWhitespace(pos), b = SplitWhitespace(neg);
    size_t pre = 0;
    while (pre < a.size() && pre < b.size() && a[pre] == b[pre]) ++pre;
    std::vector<std::string> out(a.begin() + pre, a.end());
    out.push_back("or");
    out.insert(out.end(), b.begin() + pre, b.end());
    return Join(out, " ");
  }
  std::vector<double> Vec(const std::string& name) const {
    return scorer_.ConceptVector(name).values;
  }
  std::vector<double> Text(const std::string& text) const {
    std::vector<double> sum(scorer_.dim(), 0.0);
    for (const std::string& word : SplitWhitespace(text)) {
      const std::vector<double> v = Vec(word);
      for (size_t d = 0; d < sum.size(); ++d) sum[d] += v[d];
    }
    Normalize(sum);
    return sum;
  }
  static void Normalize(std::vector<double>& v) {
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    for (double& x : v) x /= n;
  }
  static double Dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }

  const ToyScorer& scorer_;
};

Outcome AnchorImprovesAccuracy() {
  const ToyScorer scorer(31);
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"dog", "cat"}, {"car", "truck"}, {"apple", "banana"},
      {"red", "blue"}, {"kite", "ball"}, {"man", "woman"}};

  // Distractor concepts lean towards the negative word and away from the
  // positive one.
  std::map<std::string, std::vector<std::string>> distractors;
  for (const auto& [pos, neg] : pairs) {
    const Embedding p = scorer.ConceptVector(pos);
    const Embedding n = scorer.ConceptVector(neg);
    auto& list = distractors[pos + "/" + neg];
    for (int i = 0; list.size() < 6; ++i) {
      const std::string name = neg + "_like_" + std::to_string(i);
      const Embedding v = scorer.ConceptVector(name);
      if (Cosine(v, n) > 0.25 && Cosine(v, p) < 0.0) list.push_back(name);
    }
  }

  SeededRng rng(77);
  std::vector<PerturbationCase> cases;
  for (int i = 0; i < 100; ++i) {
    const auto& [pos, neg] = pairs[rng.below(pairs.size())];
    const auto& list = distractors[pos + "/" + neg];
    const int h = 3 + static_cast<int>(rng.below(3));
    const int w = 3 + static_cast<int>(rng.below(3));
    ToyImage image{"img" + std::to_string(i), Grid<std::string>(h, w)};
    for (std::string& cell : image.grid.values()) {
      const uint64_t roll = rng.below(10);
      cell = roll == 0 ? "" : list[rng.below(list.size())];
    }
    const int copies = 1 + static_cast<int>(rng.below(2));
    for (int c = 0; c < copies; ++c) {
      image.grid.values()[rng.below(image.grid.size())] = pos;
    }
    cases.push_back({ImageRef::FromToy(std::move(image)), "a " + pos, "a " + neg});
  }

  const std::vector<double> fractions = RunConfig::DefaultFractions();
  const auto curve = PerturbationCurve(cases, RemovalStrategy::kAnchor, fractions,
                                       scorer, 2);
  const Recount recount(scorer);
  for (size_t f = 0; f < fractions.size(); ++f) {
    int hits = 0;
    for (const PerturbationCase& c : cases) {
      const bool want = recount.PositiveWins(*c.image.toy, c.positive, c.negative,
                                             fractions[f]);
      const bool got = Predict(c.image, c.positive, c.negative,
                               RemovalStrategy::kAnchor, fractions[f], scorer)
                           .choice == Choice::kPositive;
      if (want != got) {
        return "record " + c.image.id + " at fraction " + Fmt(fractions[f]) +
               " disagrees with the recount";
      }
      hits += want;
    }
    if (curve[f].accuracy != hits / 100.0) {
      return "curve accuracy at " + Fmt(fractions[f]) + " is " +
             Fmt(curve[f].accuracy) + ", recount " + Fmt(hits / 100.0);
    }
  }
  double best = 0.0;
  for (const auto& point : curve) best = std::max(best, point.accuracy);
  if (!(best > curve.front().accuracy)) {
    return "no fraction beats fraction 0 (" + Fmt(curve.front().accuracy) + ")";
  }
  return std::nullopt;
}

// ----------------------------------------------------------- constraints

std::string RandomCaption(SeededRng& rng) {
  static const std::vector<std::string> nouns{
      "dog", "cat", "car", "truck", "apple", "banana", "park", "field",
      "people", "kites", "man", "table", "bench"};
  static const std::vector<std::string> adjectives{
      "green", "blue", "red", "yellow", "white", "small", "large", "young", "old"};
  static const std::vector<std::string> verbs{"standing", "flying", "chasing",
                                              "sitting", "holding"};
  static const std::vector<std::string> adps{"in", "on", "near", "with"};
  auto pick = [&](const std::vector<std::string>& v) { return v[rng.below(v.size())]; };
  auto phrase = [&] {
    std::string out = rng.below(2) ? "a " : "";
    if (rng.below(2)) out += pick(adjectives) + " ";
    return out + pick(nouns);
  };
  std::string caption = phrase();
  const int more = static_cast<int>(rng.below(4));
  for (int i = 0; i < more; ++i) {
    if (rng.below(2)) caption += " " + pick(verbs);
    caption += " " + pick(adps) + " " + phrase();
  }
  return caption;
}

bool OneWordEdit(const TreeLevel& level, const Negative& n) {
  return n.replaced_index >= 0 &&
         n.replaced_index < static_cast<int>(level.tokens.size()) &&
         level.tokens[n.replaced_index].text == n.replaced_word &&
         n.text == RenderReplacement(level, n.replaced_index, n.replacement);
}

Outcome ConstraintInvariants() {
  SeededRng rng(13);
  NegativeStrategy strategy;
  strategy.kind = StrategyKind::kWordNet;
  strategy.store = &FixtureWordNet();
  strategy.adpositions = {"in", "on", "near", "with", "under"};
  for (int trial = 0; trial < 200; ++trial) {
    const std::string caption = RandomCaption(rng);
    const TreeStructure structure =
        rng.below(2) ? TreeStructure::kIncremental : TreeStructure::kBasic;
    CaptionTree tree = BuildTree("c" + std::to_string(trial),
                                 ParseCaption(caption, DefaultTagger()), structure);
    strategy.seed = trial;
    AttachNegatives(tree, strategy);
    const size_t total = tree.negative_count();
    const int depth = static_cast<int>(tree.levels.size());

    for (int k = 1; k <= depth + 1; ++k) {
      TreeConstraints limits;
      limits.max_depth = k;
      const CaptionTree cut = Constrain(tree, limits, trial);
      if (cut.levels.size() != static_cast<size_t>(std::min(k, depth))) {
        return "\"" + caption + "\": depth " + std::to_string(k);
      }
      if (cut.negative_count() != total) {
        return "\"" + caption + "\": max_depth " + std::to_string(k) + " kept " +
               std::to_string(cut.negative_count()) + " of " +
               std::to_string(total) + " negatives";
      }
      for (const TreeLevel& level : cut.levels) {
        for (const Negative& n : level.negatives) {
          if (!OneWordEdit(level, n)) return "\"" + caption + "\": bad re-render";
        }
      }
    }
    for (size_t m = 1; m <= total + 2; ++m) {
      for (bool shuffle : {false, true}) {
        TreeConstraints limits;
        limits.max_negatives = static_cast<int>(m);
        limits.shuffle_negatives = shuffle;
        if (rng.below(2)) limits.max_depth = 1 + static_cast<int>(rng.below(depth));
        const CaptionTree cut = Constrain(tree, limits, trial);
        if (cut.negative_count() != std::min(m, total)) {
          return "\"" + caption + "\": max_negatives " + std::to_string(m) +
                 " kept " + std::to_string(cut.negative_count());
        }
      }
    }
  }
  return std::nullopt;
}

// -------------------------------------------------------------- analysis

EvalRecord RandomRecord(SeededRng& rng, int id) {
  static const std::vector<std::pair<std::string, PosTag>> words{
      {"small", PosTag::kAdj}, {"large", PosTag::kAdj}, {"off", PosTag::kAdp},
      {"on", PosTag::kAdp},    {"dog", PosTag::kNoun},  {"cat", PosTag::kNoun},
      {"runs", PosTag::kVerb}, {"sits", PosTag::kVerb}, {"a", PosTag::kDet}};
  EvalRecord record;
  record.caption_id = std::to_string(id);
  record.image_id = record.caption_id;
  const int depth = 1 + static_cast<int>(rng.below(4));
  for (int l = 0; l < depth; ++l) {
    TreeLevel level;
    level.level_index = l;
    std::vector<std::string> texts;
    const int length = 2 + static_cast<int>(rng.below(4));
    for (int t = 0; t < length; ++t) {
      const auto& [word, tag] = words[rng.below(words.size())];
      level.tokens.push_back({word, tag, t});
      texts.push_back(word);
    }
    level.positive = Join(texts, " ");
    const int negatives = static_cast<int>(rng.below(4));
    for (int n = 0; n < negatives; ++n) {
      const int index = static_cast<int>(rng.below(length));
      if (!IsReplaceable(level.tokens[index].tag)) continue;
      std::string replacement = words[rng.below(words.size() - 1)].first;
      if (replacement == level.tokens[index].text) replacement = "other";
      level.negatives.push_back({RenderReplacement(level, index, replacement),
                                 index, level.tokens[index].text, replacement,
                                 NegativeSource::kCoHyponym});
    }
    LevelOutcome outcome;
    const int offered = static_cast<int>(level.negatives.size());
    outcome.chosen = rng.below(3) == 0 ? static_cast<int>(rng.below(offered + 1)) : 0;
    outcome.scores.assign(offered + 1, 0.0);
    if (!record.failed_level && outcome.chosen != 0) {
      record.failed_level = l;
      record.failed_pos =
          level.tokens[level.negatives[outcome.chosen - 1].replaced_index].tag;
    }
    record.levels.push_back(std::move(outcome));
    record.tree.levels.push_back(std::move(level));
  }
  return record;
}

bool ValidPosSchema(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.size() != 3 || doc["schema"] != kPosFailureSchema ||
      !doc["rows"].is_array() || !doc["total"].is_number_integer()) {
    return false;
  }
  std::set<std::string> tags;
  for (const auto& row : doc["rows"]) {
    if (!row.is_object() || row.size() != 2 || !row["pos"].is_string() ||
        !row["failures"].is_number_integer()) {
      return false;
    }
    tags.insert(row["pos"].get<std::string>());
  }
  return tags == std::set<std::string>{"NOUN", "VERB", "ADJ", "ADP"};
}

bool ValidBiasSchema(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.size() != 2 || doc["schema"] != kBiasSchema ||
      !doc["rows"].is_array()) {
    return false;
  }
  for (const auto& row : doc["rows"]) {
    if (!row.is_object() || row.size() != 5 || !row["positive_word"].is_string() ||
        !row["negative_word"].is_string() || !row["trials"].is_number_integer() ||
        !row["failures"].is_number_integer() ||
        !(row["fail_rate"].is_null() || row["fail_rate"].is_number())) {
      return false;
    }
    if (row["failures"].get<int>() > row["trials"].get<int>()) return false;
  }
  return true;
}

Outcome AnalysisRecount() {
  SeededRng rng(1000);
  std::vector<EvalRecord> records;
  for (int i = 0; i < 1000; ++i) records.push_back(RandomRecord(rng, i));

  // Single pass over the records.
  std::map<std::string, int> pos_counts;
  std::map<std::pair<std::string, std::string>, std::pair<int, int>> pairs;
  int failed = 0;
  for (const EvalRecord& r : records) {
    for (size_t l = 0; l < r.levels.size(); ++l) {
      const TreeLevel& level = r.tree.levels[l];
      for (size_t n = 0; n < level.negatives.size(); ++n) {
        auto& [trials, failures] =
            pairs[{level.negatives[n].replaced_word, level.negatives[n].replacement}];
        ++trials;
        failures += r.levels[l].chosen == static_cast<int>(n) + 1;
      }
      if (r.levels[l].chosen != 0) {
        const Negative& winner = level.negatives[r.levels[l].chosen - 1];
        ++pos_counts[std::string(PosTagName(level.tokens[winner.replaced_index].tag))];
        ++failed;
        break;
      }
    }
  }

  const auto counts = PosFailureCounts(records);
  int total = 0;
  for (const auto& [tag, n] : counts) {
    const auto it = pos_counts.find(std::string(PosTagName(tag)));
    if (n != (it == pos_counts.end() ? 0 : it->second)) {
      return std::string("count for ") + std::string(PosTagName(tag));
    }
    total += n;
  }
  if (total != failed) return "failed level total";

  std::vector<std::pair<std::string, std::string>> queries;
  for (const auto& [key, value] : pairs) queries.push_back(key);
  queries.push_back({"never", "seen"});
  const auto rows = WordPairFailRates(records, queries);
  for (size_t i = 0; i < queries.size(); ++i) {
    const auto it = pairs.find(queries[i]);
    const int trials = it == pairs.end() ? 0 : it->second.first;
    const int failures = it == pairs.end() ? 0 : it->second.second;
    if (rows[i].trials != trials || rows[i].failures != failures) {
      return "pair " + queries[i].first + "/" + queries[i].second;
    }
    if (trials == 0 ? rows[i].fail_rate.has_value()
                    : rows[i].fail_rate != static_cast<double>(failures) / trials) {
      return "rate for " + queries[i].first + "/" + queries[i].second;
    }
  }

  if (!ValidPosSchema(nlohmann::json::parse(PosFailureJson(counts)))) {
    return "POS report schema";
  }
  if (!ValidBiasSchema(nlohmann::json::parse(BiasJson(rows)))) {
    return "bias report schema";
  }
  return std::nullopt;
}

// ---------------------------------------------------------- determinism


std::map<std::string, std::string> Snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) {
      files[fs::relative(entry.path(), dir).string()] = ReadFile(entry.path());
    }
  }
  return files;
}

Outcome PipelineRun(const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path p = kData / "pipeline";
  auto q = [](const fs::path& path) { return "\"" + path.string() + "\""; };
  const std::string common = "--wordnet " + q(kData / "wordnet") + " --oracle " +
                             q(kData / "oracle_stub.json") + " --seed 3 --workers 2";
  const std::vector<std::pair<std::string, std::string>> steps{
      {"build-tree", "build-tree --captions " + q(p / "captions.txt") + " --out " +
                         q(dir / "trees.jsonl")},
      {"eval", "eval --trees " + q(dir / "trees.jsonl") + " --images " +
                   q(p / "images.jsonl") + " --out " + q(dir / "eval")},
      {"perturb", "perturb --trees " + q(dir / "trees.jsonl") + " --images " +
                      q(p / "images.jsonl") + " --out " + q(dir / "perturb")},
      {"analyze", "analyze --eval " + q(dir / "eval" / "eval.jsonl") + " --pairs " +
                      q(p / "pairs.tsv") + " --images " + q(p / "images.jsonl") +
                      " --out " + q(dir / "analyze")}};
  for (const auto& [name, args] : steps) {
    if (const int rc = RunCli(args + " " + common); rc != 0) {
      return name + " exited " + std::to_string(rc);
    }
  }
  return std::nullopt;
}

Outcome Determinism() {
  const fs::path root = fs::path(CAPTREE_TEST_TMP) / "acceptance";
  for (const char* run : {"run1", "run2"}) {
    if (Outcome failure = PipelineRun(root / run)) return failure;
  }
  const auto a = Snapshot(root / "run1");
  const auto b = Snapshot(root / "run2");
  if (a.size() < 11) return "only " + std::to_string(a.size()) + " artifacts";
  if (a != b) {
    for (const auto& [name, bytes] : a) {
      if (!b.contains(name) || b.at(name) != bytes) return name + " differs";
    }
    return "artifact sets differ";
  }
  return std::nullopt;
}

// --------------------------------------------------------------- driver

struct Criterion {
  const char* name;
  std::function<Outcome()> check;
  double limit_seconds;  // 0 = no runtime bound
};

}  // namespace
}  // namespace captree

int main() {
  using namespace captree;
  const std::vector<Criterion> criteria{
      {"golden incremental tree", GoldenIncremental, 1.0},
      {"golden basic tree", GoldenBasic, 1.0},
      {"loss matches naive oracle", LossOracle, 5.0},
      {"loss blend", LossBlend, 0.0},
      {"anchor text golden", AnchorGolden, 0.0},
      {"dire properties", DiReProperties, 0.0},
      {"removal nesting", RemovalNesting, 0.0},
      {"anchor removal improves accuracy", AnchorImprovesAccuracy, 10.0},
      {"constraint invariants", ConstraintInvariants, 0.0},
      {"analysis recount", AnalysisRecount, 0.0},
      {"pipeline determinism", Determinism, 0.0},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = std::string("threw ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (!outcome && c.limit_seconds > 0 && seconds >= c.limit_seconds) {
      outcome = "took " + Fmt(seconds) + " s";
    }
    if (outcome) {
      ++failures;
      std::printf("FAIL  %-34s %.3f s  %s\n", c.name, seconds, outcome->c_str());
    } else {
      std::printf("PASS  %-34s %.3f s\n", c.name, seconds);
    }
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
