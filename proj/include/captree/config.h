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


#ifndef CAPTREE_CONFIG_H_
#define CAPTREE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "captree/caption_tree.h"
#include "captree/interpret.h"
#include "captree/loss.h"
#include "captree/negatives.h"

namespace captree {

// Every knob of a run. The JSON config file is one object whose keys are the
// kebab-case names below; unknown keys are rejected.
struct RunConfig {
  TreeStructure structure = TreeStructure::kIncremental;       // structure
  StrategyKind negatives = StrategyKind::kWordNetLlmPrompt;    // negatives
  std::string connector{kDefaultConnector};                    // connector
  TreeConstraints constraints;  // max-depth, max-negatives, shuffle-negatives
  LossConfig loss;                                             // alpha, temperature
  RemovalStrategy removal = RemovalStrategy::kAnchor;          // removal
  std::vector<double> fractions = DefaultFractions();          // fractions
  uint64_t seed = 0;                                           // seed
  // "toy" or the adapter's base URL.
  std::string scorer = "toy";                                  // scorer
  // WordNet database directory; empty falls back to CAPTREE_WORDNET_DIR.
  std::string wordnet;                                         // wordnet
  // "none", a stub fixture path, or the adapter's base URL.
  std::string oracle = "none";                                 // oracle
  // Lexicon file; empty uses the built-in one.
  std::string lexicon;                                         // lexicon
  int workers = 1;                                             // workers
  // Synonyms/co-hyponyms per word when expanding failures.
  int expand_k = 3;                                            // expand-k
  // Cases whose relevancy maps the perturb command exports.
  int heatmaps = 2;                                            // heatmaps

  static std::vector<double> DefaultFractions();

  // Throws kInvalidArgument or kInvalidConstraint.
  void Validate() const;

  // WordNet directory after the environment fallback; empty when neither is
  // set.
  std::string ResolvedWordNetDir() const;
};

inline constexpr std::string_view kWordNetEnvVar = "CAPTREE_WORDNET_DIR";

// Overlays the keys present in a JSON config document. Throws kParse for
// malformed JSON, unknown keys and values of the wrong type.
void ApplyConfigJson(RunConfig& config, std::string_view text);

void ApplyConfigFile(RunConfig& config, const std::filesystem::path& path);

// "0,0.25,0.5" -> {0, 0.25, 0.5}. Throws kParse.
std::vector<double> ParseFractionList(std::string_view text);

// True for http:// and https:// URLs.
bool IsUrl(std::string_view value);

}  // namespace captree

#endif  // CAPTREE_CONFIG_H_
