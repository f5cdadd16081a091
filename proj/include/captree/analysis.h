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


#ifndef CAPTREE_ANALYSIS_H_
#define CAPTREE_ANALYSIS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "captree/caption_tree.h"
#include "captree/loss.h"
#include "captree/scorer.h"
#include "captree/wordnet.h"

namespace captree {

struct LevelOutcome {
  // Index into [positive, negatives...] that scored highest.
  int chosen = 0;
  // Cosine scores in the same order.
  std::vector<double> scores;

  friend bool operator==(const LevelOutcome&, const LevelOutcome&) = default;
};

struct EvalRecord {
  std::string caption_id;
  std::string image_id;
  CaptionTree tree;
  std::vector<LevelOutcome> levels;
  // First level whose choice is not the positive caption.
  std::optional<int> failed_level;
  // Tag of the caption word the winning negative replaced.
  std::optional<PosTag> failed_pos;

  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

// The positive wins only with a strictly higher score; otherwise the first
// negative holding the maximum is chosen.
int ChooseIndex(std::span<const double> scores);

// Scores every level of `tree` against `image` and locates the first failure.
EvalRecord EvaluateTree(const CaptionTree& tree, const ImageRef& image,
                        const Scorer& scorer);

// The winning negative of the failed level, if any.
const Negative* FailedNegative(const EvalRecord& record);

// Levels actually evaluated: everything up to and including the failure.
int EvaluatedLevelCount(const EvalRecord& record);

// Failed levels keyed by the replaced word's tag. The four replaceable tags
// are always present.
std::map<PosTag, int> PosFailureCounts(std::span<const EvalRecord> records);

struct BiasRow {
  std::string positive_word;
  std::string negative_word;
  int trials = 0;
  int failures = 0;
  // Absent when there were no trials.
  std::optional<double> fail_rate;
};

// For each (positive, negative) word pair: trials counts evaluated levels
// holding a negative that makes exactly that substitution; failures counts
// those where that negative won.
std::vector<BiasRow> WordPairFailRates(
    std::span<const EvalRecord> records,
    std::span<const std::pair<std::string, std::string>> pairs);

enum class CandidateKind {
  kPositive,
  kNegative,
  kPositiveSynonym,
  kPositiveCoHyponym,
  kNegativeSynonym,
  kNegativeCoHyponym,
};

std::string_view CandidateKindName(CandidateKind kind);

struct ExpansionCandidate {
  std::string text;
  std::string word;
  CandidateKind kind = CandidateKind::kPositive;
  double probability = 0.0;
};

struct Expansion {
  std::string caption_id;
  int level_index = 0;
  // Sorted by descending probability; ties keep generation order.
  std::vector<ExpansionCandidate> candidates;
};

// Re-scores the failed level with up to k synonyms-then-co-hyponyms of the
// positive word and of the winning negative word substituted in, and turns
// the scores into a softmax distribution. Throws kNoFailure.
Expansion ExpandFailureNode(const EvalRecord& record, const ImageRef& image,
                            const WordNetStore& store, const Scorer& scorer,
                            size_t k, uint64_t seed,
                            const LossConfig& config = {});

// Report documents. Schema names are versioned.
inline constexpr std::string_view kPosFailureSchema = "captree.pos_failures/v1";
inline constexpr std::string_view kBiasSchema = "captree.word_pair_bias/v1";
inline constexpr std::string_view kExpansionSchema = "captree.expansion/v1";

std::string PosFailureJson(const std::map<PosTag, int>& counts);
std::string PosFailureTable(const std::map<PosTag, int>& counts);
std::string BiasJson(std::span<const BiasRow> rows);
std::string BiasTable(std::span<const BiasRow> rows);
std::string ExpansionJson(const Expansion& expansion);

}  // namespace captree

#endif  // CAPTREE_ANALYSIS_H_
