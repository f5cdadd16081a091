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


#include "captree/commands.h"

#include <cstdio>
#include <set>

#include "captree/analysis.h"
#include "captree/caption_tree.h"
#include "captree/interpret.h"
#include "captree/loss.h"
#include "captree/negatives.h"
#include "captree/records.h"
#include "captree/util.h"
#include "json.hpp"

namespace captree {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string JoinLines(const std::vector<std::string>& lines) {
  std::string out;
  for (const std::string& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

const ImageRef& ImageFor(const std::map<std::string, ImageRef>& images,
                         const std::string& caption_id) {
  auto it = images.find(caption_id);
  if (it == images.end()) {
    throw Error(ErrorCode::kParse,
                "no image listed for caption \"" + caption_id + "\"");
  }
  return it->second;
}

std::vector<CaptionTree> ReadNonEmptyTrees(const fs::path& path,
                                           const Tagger& tagger) {
  std::vector<CaptionTree> trees = ReadTrees(path, tagger);
  if (trees.empty()) {
    throw Error(ErrorCode::kEmptyDataset, path.string() + " holds no trees");
  }
  return trees;
}

std::string CaseName(size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "case%04zu", index);
  return buf;
}

std::vector<std::string> MapKinds(RemovalStrategy strategy) {
  switch (strategy) {
    case RemovalStrategy::kPerText: return {"positive", "negative"};
    case RemovalStrategy::kAnchor: return {"anchor"};
    case RemovalStrategy::kDiRe: return {"dire"};
  }
  return {};
}

// Every distinct substitution made in an evaluated level, sorted.
std::vector<std::pair<std::string, std::string>> ObservedPairs(
    std::span<const EvalRecord> records) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const EvalRecord& record : records) {
    const int evaluated = EvaluatedLevelCount(record);
    for (int l = 0; l < evaluated; ++l) {
      for (const Negative& n : record.tree.levels[l].negatives) {
        seen.emplace(n.replaced_word, n.replacement);
      }
    }
  }
  return {seen.begin(), seen.end()};
}

ordered_json PosCountsJson(const std::map<PosTag, int>& counts) {
  ordered_json out = ordered_json::object();
  for (const auto& [tag, count] : counts) out[std::string(PosTagName(tag))] = count;
  return out;
}

}  // namespace

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidConstraint:
      return kExitUsage;
    case ErrorCode::kOracleUnavailable:
    case ErrorCode::kRemoteUnavailable:
      return kExitUnavailable;
    default:
      return kExitInput;
  }
}

Tagger MakeTagger(const RunConfig& config) {
  return Tagger(config.lexicon.empty() ? Lexicon::Builtin()
                                       : Lexicon::Load(config.lexicon));
}

WordNetStore LoadWordNet(const RunConfig& config) {
  const std::string dir = config.ResolvedWordNetDir();
  if (dir.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "no WordNet directory: pass --wordnet or set " +
                    std::string(kWordNetEnvVar));
  }
  return WordNetStore::Load(dir);
}

std::unique_ptr<WordOracle> MakeOracle(const RunConfig& config) {
  if (config.oracle == "none") return nullptr;
  if (IsUrl(config.oracle)) return std::make_unique<RemoteOracle>(config.oracle);
  return std::make_unique<StubOracle>(StubOracle::Load(config.oracle));
}

std::unique_ptr<Scorer> MakeScorer(const RunConfig& config) {
  if (config.scorer == "toy") return std::make_unique<ToyScorer>(config.seed);
  return std::make_unique<RemoteScorer>(config.scorer);
}

std::map<std::string, ImageRef> ReadImageManifest(const fs::path& path) {
  const std::string text = ReadFile(path);
  const fs::path base = path.parent_path();
  std::map<std::string, ImageRef> images;
  size_t line_no = 0;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    const std::string_view line(text.data() + start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kParse, where + ": " + e.what());
    }
    if (!doc.is_object() || doc.size() != 2 || !doc.contains("caption_id") ||
        !doc.contains("image") || !doc["caption_id"].is_string() ||
        !doc["image"].is_string()) {
      throw Error(ErrorCode::kParse,
                  where + ": expected {\"caption_id\": ..., \"image\": ...}");
    }
    const std::string id = doc["caption_id"].get<std::string>();
    const fs::path image_path = base / doc["image"].get<std::string>();
    ImageRef ref;
    try {
      ref = image_path.extension() == ".json"
                ? ImageRef::FromToy(ToyImage::Load(image_path))
                : ImageRef::FromPath(image_path.stem().string(),
                                     fs::absolute(image_path).string());
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.message());
    }
    if (!images.emplace(id, std::move(ref)).second) {
      throw Error(ErrorCode::kParse,
                  where + ": duplicate caption id \"" + id + "\"");
    }
  }
  return images;
}

void RunBuildTree(const RunConfig& config, const fs::path& captions,
                  const fs::path& out) {
  config.Validate();
  const std::vector<CaptionLine> lines = ParseCaptionFile(ReadFile(captions));
  if (lines.empty()) {
    throw Error(ErrorCode::kEmptyDataset, captions.string() + " holds no captions");
  }
  std::set<std::string> ids;
  for (const CaptionLine& line : lines) {
    if (!ids.insert(line.id).second) {
      throw Error(ErrorCode::kParse, "duplicate caption id \"" + line.id + "\"");
    }
  }
  const Tagger tagger = MakeTagger(config);
  const WordNetStore store = LoadWordNet(config);
  const std::unique_ptr<WordOracle> oracle = MakeOracle(config);

  NegativeStrategy strategy;
  strategy.kind = config.negatives;
  strategy.store = &store;
  strategy.oracle = oracle.get();
  strategy.seed = config.seed;
  strategy.adpositions = tagger.lexicon().WordsWithTag(PosTag::kAdp);
  strategy.Validate();

  const std::vector<std::string> rendered =
      ParallelMap(lines.size(), config.workers, [&](size_t i) {
        const CaptionLine& line = lines[i];
        try {
          CaptionTree tree =
              BuildTree(line.id, ParseCaption(line.caption, tagger),
                        config.structure, config.connector);
          AttachNegatives(tree, strategy);
          return TreeToJsonLine(
              Constrain(tree, config.constraints, config.seed));
        } catch (const Error& e) {
          throw Error(e.code(), "caption \"" + line.id + "\": " + e.message());
        }
      });
  WriteFileAtomic(out, JoinLines(rendered));
}

void RunEval(const RunConfig& config, const fs::path& trees_path,
             const fs::path& images_path, const fs::path& out_dir) {
  config.Validate();
  const Tagger tagger = MakeTagger(config);
  const std::vector<CaptionTree> trees = ReadNonEmptyTrees(trees_path, tagger);
  const std::map<std::string, ImageRef> images = ReadImageManifest(images_path);
  const std::unique_ptr<Scorer> scorer = MakeScorer(config);

  std::vector<ImageRef> batch_images;
  std::vector<std::string> batch_texts;
  for (const CaptionTree& tree : trees) {
    batch_images.push_back(ImageFor(images, tree.caption_id));
    batch_texts.push_back(tree.levels.back().positive);
  }
  const std::vector<EvalRecord> records =
      ParallelMap(trees.size(), config.workers, [&](size_t i) {
        return EvaluateTree(trees[i], batch_images[i], *scorer);
      });

  const double t = config.loss.temperature;
  double tree_loss = 0.0;
  std::vector<int> evaluated;
  std::vector<int> correct;
  for (const EvalRecord& record : records) {
    std::vector<LevelScores> levels;
    for (size_t l = 0; l < record.levels.size(); ++l) {
      LevelScores scores;
      for (double s : record.levels[l].scores) scores.logits.push_back(t * s);
      levels.push_back(std::move(scores));
      if (evaluated.size() <= l) {
        evaluated.push_back(0);
        correct.push_back(0);
      }
      ++evaluated[l];
      if (record.levels[l].chosen == 0) ++correct[l];
    }
    tree_loss += TreeLoss(levels);
  }
  tree_loss /= static_cast<double>(records.size());

  SimilarityMatrix similarity =
      ComputeSimilarityMatrix(*scorer, batch_images, batch_texts);
  for (double& s : similarity.scores.values()) s *= t;
  const double contrastive = ContrastiveLoss(similarity.scores);

  ordered_json summary;
  summary["schema"] = kEvalSummarySchema;
  summary["records"] = records.size();
  summary["alpha"] = config.loss.alpha;
  summary["temperature"] = t;
  summary["tree_loss"] = tree_loss;
  summary["contrastive_loss"] = contrastive;
  summary["total_loss"] = TotalLoss(tree_loss, contrastive, config.loss);
  ordered_json accuracy = ordered_json::array();
  for (size_t l = 0; l < evaluated.size(); ++l) {
    accuracy.push_back({{"level", l},
                        {"evaluated", evaluated[l]},
                        {"correct", correct[l]},
                        {"accuracy", static_cast<double>(correct[l]) /
                                         static_cast<double>(evaluated[l])}});
  }
  summary["level_accuracy"] = std::move(accuracy);
  int failed = 0;
  for (const EvalRecord& record : records) failed += record.failed_level ? 1 : 0;
  summary["failed_records"] = failed;
  summary["pos_failures"] = PosCountsJson(PosFailureCounts(records));

  std::vector<std::string> lines;
  for (const EvalRecord& record : records) {
    lines.push_back(EvalRecordToJsonLine(record));
  }
  WriteFileAtomic(out_dir / "eval.jsonl", JoinLines(lines));
  WriteFileAtomic(out_dir / "summary.json", summary.dump(2) + "\n");
}

void RunPerturb(const RunConfig& config, const fs::path& trees_path,
                const fs::path& images_path, const fs::path& out_dir) {
  config.Validate();
  const Tagger tagger = MakeTagger(config);
  const std::vector<CaptionTree> trees = ReadNonEmptyTrees(trees_path, tagger);
  const std::map<std::string, ImageRef> images = ReadImageManifest(images_path);
  const std::unique_ptr<Scorer> scorer = MakeScorer(config);

  std::vector<PerturbationCase> cases;
  for (const CaptionTree& tree : trees) {
    const ImageRef& image = ImageFor(images, tree.caption_id);
    for (const TreeLevel& level : tree.levels) {
      for (const Negative& negative : level.negatives) {
        cases.push_back({image, level.positive, negative.text});
      }
    }
  }
  const std::vector<PerturbationPoint> curve = PerturbationCurve(
      cases, config.removal, config.fractions, *scorer, config.workers);

  const size_t exported = std::min(cases.size(), static_cast<size_t>(config.heatmaps));
  const std::vector<std::string> kinds = MapKinds(config.removal);
  for (size_t i = 0; i < exported; ++i) {
    const PerturbationCase& c = cases[i];
    const std::vector<RelevancyMap> maps =
        RemovalMaps(c.image, c.positive, c.negative, config.removal, *scorer);
    for (size_t m = 0; m < maps.size(); ++m) {
      const fs::path stem = out_dir / "heatmaps" / (CaseName(i) + "-" + kinds[m]);
      WriteFileAtomic(fs::path(stem) += ".json", RelevancyJson(maps[m]) + "\n");
      WriteFileAtomic(fs::path(stem) += ".pgm", RelevancyPgm(maps[m]));
    }
  }
  WriteFileAtomic(out_dir / "curve.csv", CurveCsv(curve));
}

void RunAnalyze(const RunConfig& config, const fs::path& eval_path,
                const fs::path& pairs_path, const fs::path& images_path,
                const fs::path& out_dir) {
  config.Validate();
  const Tagger tagger = MakeTagger(config);
  const std::vector<EvalRecord> records = ReadEvalRecords(eval_path, tagger);
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyDataset, eval_path.string() + " holds no records");
  }
  const auto pairs = pairs_path.empty() ? ObservedPairs(records)
                                        : ParsePairsFile(ReadFile(pairs_path));

  const std::map<PosTag, int> counts = PosFailureCounts(records);
  const std::vector<BiasRow> rows = WordPairFailRates(records, pairs);

  std::vector<size_t> failed;
  for (size_t i = 0; i < records.size(); ++i) {
    if (records[i].failed_level) failed.push_back(i);
  }
  std::vector<std::string> expansions;
  if (!failed.empty()) {
    const std::map<std::string, ImageRef> images = ReadImageManifest(images_path);
    const std::unique_ptr<Scorer> scorer = MakeScorer(config);
    const WordNetStore store = config.expand_k > 0 || !config.ResolvedWordNetDir().empty()
                                   ? LoadWordNet(config)
                                   : WordNetStore();
    expansions = ParallelMap(failed.size(), config.workers, [&](size_t i) {
      const EvalRecord& record = records[failed[i]];
      return ExpansionJson(ExpandFailureNode(
          record, ImageFor(images, record.caption_id), store, *scorer,
          static_cast<size_t>(config.expand_k), config.seed, config.loss));
    });
  }

  WriteFileAtomic(out_dir / "pos_failures.json", PosFailureJson(counts));
  WriteFileAtomic(out_dir / "pos_failures.txt", PosFailureTable(counts));
  WriteFileAtomic(out_dir / "bias.json", BiasJson(rows));
  WriteFileAtomic(out_dir / "bias.txt", BiasTable(rows));
  WriteFileAtomic(out_dir / "expansions.jsonl", JoinLines(expansions));
}

}  // namespace captree
