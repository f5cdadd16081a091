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


#ifndef CAPTREE_COMMANDS_H_
#define CAPTREE_COMMANDS_H_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "captree/caption.h"
#include "captree/config.h"
#include "captree/error.h"
#include "captree/oracle.h"
#include "captree/scorer.h"
#include "captree/wordnet.h"

namespace captree {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitUnavailable = 3;

int ExitCodeFor(ErrorCode code);

Tagger MakeTagger(const RunConfig& config);
// Throws kInvalidArgument when no WordNet directory is configured.
WordNetStore LoadWordNet(const RunConfig& config);
// Null for "none".
std::unique_ptr<WordOracle> MakeOracle(const RunConfig& config);
std::unique_ptr<Scorer> MakeScorer(const RunConfig& config);

// JSONL of {"caption_id", "image"}; image paths are relative to the
// manifest. A ".json" image is loaded as a toy grid, anything else is passed
// to the remote scorer by absolute path.
std::map<std::string, ImageRef> ReadImageManifest(
    const std::filesystem::path& path);

// build-tree: captions file -> trees JSONL.
void RunBuildTree(const RunConfig& config,
                  const std::filesystem::path& captions,
                  const std::filesystem::path& out);

// eval: trees JSONL + images -> <out>/eval.jsonl and <out>/summary.json.
void RunEval(const RunConfig& config, const std::filesystem::path& trees,
             const std::filesystem::path& images,
             const std::filesystem::path& out_dir);

// perturb: every (level positive, negative) pair of every tree against its
// image -> <out>/curve.csv and <out>/heatmaps/.
void RunPerturb(const RunConfig& config, const std::filesystem::path& trees,
                const std::filesystem::path& images,
                const std::filesystem::path& out_dir);

// analyze: eval JSONL + pairs file -> pos_failures.{json,txt},
// bias.{json,txt} and expansions.jsonl under <out>. Expansion re-scores
// failed levels against the images in `images`.
void RunAnalyze(const RunConfig& config, const std::filesystem::path& eval,
                const std::filesystem::path& pairs,
                const std::filesystem::path& images,
                const std::filesystem::path& out_dir);

inline constexpr std::string_view kEvalSummarySchema = "captree.eval_summary/v1";

}  // namespace captree

#endif  // CAPTREE_COMMANDS_H_
