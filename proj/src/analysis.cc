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


#include "captree/analysis.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "captree/error.h"
#include "json.hpp"

namespace captree {
namespace {

void AddWordCandidates(std::vector<ExpansionCandidate>& out,
                       std::set<std::string>& used, const TreeLevel& level,
                       int index, const std::string& word, PosTag tag,
                       const WordNetStore& store, size_t k, uint64_t seed,
                       CandidateKind synonym_kind, CandidateKind sibling_kind) {
  if (k == 0 || !store.Contains(word, tag)) return;
  size_t added = 0;
  auto add = [&](const std::string& candidate, CandidateKind kind) {
    if (added >= k || !used.insert(candidate).second) return;
    out.push_back({RenderReplacement(level, index, candidate), candidate, kind,
                   0.0});
    ++added;
  };
  for (const std::string& synonym : store.Synonyms(word, tag)) {
    add(synonym, synonym_kind);
  }
  for (const std::string& sibling : store.CoHyponyms(word, tag, k, seed)) {
    add(sibling, sibling_kind);
  }
}

std::string Percent(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", rate * 100.0);
  return buf;
}

std::string PadRight(std::string s, size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string PadLeft(const std::string& s, size_t width) {
  return s.size() < width ? std::string(width - s.size(), ' ') + s : s;
}

}  // namespace

int ChooseIndex(std::span<const double> scores) {
  if (scores.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no scores to choose from");
  }
  int best = 0;
  for (size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] >= scores[best] && (best == 0 || scores[i] > scores[best])) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

EvalRecord EvaluateTree(const CaptionTree& tree, const ImageRef& image,
                        const Scorer& scorer) {
  if (tree.levels.empty()) {
    throw Error(ErrorCode::kEmptyTree, "tree " + tree.caption_id);
  }
  EvalRecord record;
  record.caption_id = tree.caption_id;
  record.image_id = image.id;
  record.tree = tree;
  const Embedding image_embedding = scorer.EmbedImage(image);
  for (const TreeLevel& level : tree.levels) {
    std::vector<std::string> texts{level.positive};
    for (const Negative& negative : level.negatives) {
      texts.push_back(negative.text);
    }
    LevelOutcome outcome;
    for (const Embedding& text : scorer.EmbedTexts(texts)) {
      outcome.scores.push_back(Cosine(image_embedding, text));
    }
    outcome.chosen = ChooseIndex(outcome.scores);
    if (outcome.chosen != 0 && !record.failed_level) {
      record.failed_level = level.level_index;
      const Negative& winner = level.negatives[outcome.chosen - 1];
      record.failed_pos = level.tokens.at(winner.replaced_index).tag;
    }
    record.levels.push_back(std::move(outcome));
  }
  return record;
}

const Negative* FailedNegative(const EvalRecord& record) {
  if (!record.failed_level) return nullptr;
  const int l = *record.failed_level;
  const int chosen = record.levels.at(l).chosen;
  if (chosen < 1) return nullptr;
  return &record.tree.levels.at(l).negatives.at(chosen - 1);
}

int EvaluatedLevelCount(const EvalRecord& record) {
  return record.failed_level ? *record.failed_level + 1
                             : static_cast<int>(record.levels.size());
}

std::map<PosTag, int> PosFailureCounts(std::span<const EvalRecord> records) {
  std::map<PosTag, int> counts;
  for (PosTag tag : kAllPosTags) {
    if (IsReplaceable(tag)) counts[tag] = 0;
  }
  for (const EvalRecord& record : records) {
    if (record.failed_level && record.failed_pos) ++counts[*record.failed_pos];
  }
  return counts;
}

std::vector<BiasRow> WordPairFailRates(
    std::span<const EvalRecord> records,
    std::span<const std::pair<std::string, std::string>> pairs) {
  std::vector<BiasRow> rows;
  for (const auto& [positive, negative] : pairs) {
    BiasRow row{positive, negative, 0, 0, std::nullopt};
    for (const EvalRecord& record : records) {
      const int evaluated = EvaluatedLevelCount(record);
      for (int l = 0; l < evaluated; ++l) {
        const TreeLevel& level = record.tree.levels.at(l);
        for (size_t n = 0; n < level.negatives.size(); ++n) {
          const Negative& neg = level.negatives[n];
          if (neg.replaced_word != positive || neg.replacement != negative) {
            continue;
          }
          ++row.trials;
          if (record.levels.at(l).chosen == static_cast<int>(n) + 1) {
            ++row.failures;
          }
        }
      }
    }
    if (row.trials > 0) {
      row.fail_rate = static_cast<double>(row.failures) / row.trials;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string_view CandidateKindName(CandidateKind kind) {
  switch (kind) {
    case CandidateKind::kPositive: return "positive";
    case CandidateKind::kNegative: return "negative";
    case CandidateKind::kPositiveSynonym: return "positive_synonym";
    case CandidateKind::kPositiveCoHyponym: return "positive_co_hyponym";
    case CandidateKind::kNegativeSynonym: return "negative_synonym";
    case CandidateKind::kNegativeCoHyponym: return "negative_co_hyponym";
  }
  return "positive";
}

Expansion ExpandFailureNode(const EvalRecord& record, const ImageRef& image,
                            const WordNetStore& store, const Scorer& scorer,
                            size_t k, uint64_t seed, const LossConfig& config) {
  const Negative* winner = FailedNegative(record);
  if (winner == nullptr) {
    throw Error(ErrorCode::kNoFailure,
                "record " + record.caption_id + " has no failed level");
  }
  const TreeLevel& level = record.tree.levels.at(*record.failed_level);
  const int index = winner->replaced_index;
  const PosTag tag = level.tokens.at(index).tag;

  std::vector<ExpansionCandidate> candidates{
      {level.positive, winner->replaced_word, CandidateKind::kPositive, 0.0},
      {winner->text, winner->replacement, CandidateKind::kNegative, 0.0},
  };
  std::set<std::string> used{winner->replaced_word, winner->replacement};
  AddWordCandidates(candidates, used, level, index, winner->replaced_word, tag,
                    store, k, seed, CandidateKind::kPositiveSynonym,
                    CandidateKind::kPositiveCoHyponym);
  AddWordCandidates(candidates, used, level, index, winner->replacement, tag,
                    store, k, seed, CandidateKind::kNegativeSynonym,
                    CandidateKind::kNegativeCoHyponym);

  std::vector<std::string> texts;
  for (const auto& c : candidates) texts.push_back(c.text);
  const Embedding embedded = scorer.EmbedImage(image);
  std::vector<double> logits;
  for (const Embedding& text : scorer.EmbedTexts(texts)) {
    logits.push_back(config.temperature * Cosine(embedded, text));
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& z : logits) {
    z = std::exp(z - peak);
    total += z;
  }
  for (size_t i = 0; i < candidates.size(); ++i) {
    candidates[i].probability = logits[i] / total;
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const ExpansionCandidate& a, const ExpansionCandidate& b) {
                     return a.probability > b.probability;
                   });
  return {record.caption_id, *record.failed_level, std::move(candidates)};
}

std::string PosFailureJson(const std::map<PosTag, int>& counts) {
  nlohmann::ordered_json doc;
  doc["schema"] = kPosFailureSchema;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  int total = 0;
  for (const auto& [tag, count] : counts) {
    rows.push_back({{"pos", PosTagName(tag)}, {"failures", count}});
    total += count;
  }
  doc["rows"] = std::move(rows);
  doc["total"] = total;
  return doc.dump(2) + "\n";
}

std::string PosFailureTable(const std::map<PosTag, int>& counts) {
  std::string out = PadRight("POS", 8) + PadLeft("failures", 10) + "\n";
  for (const auto& [tag, count] : counts) {
    out += PadRight(std::string(PosTagName(tag)), 8) +
           PadLeft(std::to_string(count), 10) + "\n";
  }
  return out;
}

std::string BiasJson(std::span<const BiasRow> rows) {
  nlohmann::ordered_json doc;
  doc["schema"] = kBiasSchema;
  nlohmann::ordered_json items = nlohmann::ordered_json::array();
  for (const BiasRow& row : rows) {
    nlohmann::ordered_json item;
    item["positive_word"] = row.positive_word;
    item["negative_word"] = row.negative_word;
    item["trials"] = row.trials;
    item["failures"] = row.failures;
    item["fail_rate"] = row.fail_rate ? nlohmann::ordered_json(*row.fail_rate)
                                      : nlohmann::ordered_json(nullptr);
    items.push_back(std::move(item));
  }
  doc["rows"] = std::move(items);
  return doc.dump(2) + "\n";
}

std::string BiasTable(std::span<const BiasRow> rows) {
  size_t pos_width = std::string("positive").size();
  size_t neg_width = std::string("negative").size();
  for (const BiasRow& row : rows) {
    pos_width = std::max(pos_width, row.positive_word.size());
    neg_width = std::max(neg_width, row.negative_word.size());
  }
  std::string out = PadRight("positive", pos_width + 2) +
                    PadRight("negative", neg_width + 2) + PadLeft("trials", 8) +
                    PadLeft("failures", 10) + PadLeft("fail rate", 11) + "\n";
  for (const BiasRow& row : rows) {
    out += PadRight(row.positive_word, pos_width + 2) +
           PadRight(row.negative_word, neg_width + 2) +
           PadLeft(std::to_string(row.trials), 8) +
           PadLeft(std::to_string(row.failures), 10) +
           PadLeft(row.fail_rate ? Percent(*row.fail_rate) : "-", 11) + "\n";
  }
  return out;
}

std::string ExpansionJson(const Expansion& expansion) {
  nlohmann::ordered_json doc;
  doc["schema"] = kExpansionSchema;
  doc["caption_id"] = expansion.caption_id;
  doc["level"] = expansion.level_index;
  nlohmann::ordered_json items = nlohmann::ordered_json::array();
  for (const ExpansionCandidate& c : expansion.candidates) {
    items.push_back({{"text", c.text},
                     {"word", c.word},
                     {"kind", CandidateKindName(c.kind)},
                     {"probability", c.probability}});
  }
  doc["candidates"] = std::move(items);
  return doc.dump();
}

}  // namespace captree
