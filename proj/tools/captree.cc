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


// captree: caption-tree augmentation, evaluation and analysis.
//
//   captree build-tree --captions captions.txt --out trees.jsonl --wordnet DIR
//   captree eval       --trees trees.jsonl --images images.jsonl --out DIR
//   captree perturb    --trees trees.jsonl --images images.jsonl --out DIR
//   captree analyze    --eval eval.jsonl [--pairs pairs.tsv] --images images.jsonl --out DIR
//
// Run options may also come from --config FILE; flags win over the file.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "captree/commands.h"
#include "captree/config.h"
#include "captree/error.h"

namespace {

using captree::Error;
using captree::ErrorCode;
using captree::RunConfig;

struct Flags {
  std::string config;
  std::string structure;
  std::string negatives;
  std::string connector;
  int max_depth = 0;
  int max_negatives = 0;
  bool shuffle_negatives = false;
  double alpha = 0.0;
  double temperature = 0.0;
  std::string removal;
  std::string fractions;
  uint64_t seed = 0;
  std::string scorer;
  std::string wordnet;
  std::string oracle;
  std::string lexicon;
  int workers = 0;
  int expand_k = 0;
  int heatmaps = 0;
};

struct Options {
  CLI::Option* structure;
  CLI::Option* negatives;
  CLI::Option* connector;
  CLI::Option* max_depth;
  CLI::Option* max_negatives;
  CLI::Option* shuffle_negatives;
  CLI::Option* alpha;
  CLI::Option* temperature;
  CLI::Option* removal;
  CLI::Option* fractions;
  CLI::Option* seed;
  CLI::Option* scorer;
  CLI::Option* wordnet;
  CLI::Option* oracle;
  CLI::Option* lexicon;
  CLI::Option* workers;
  CLI::Option* expand_k;
  CLI::Option* heatmaps;
};

Options AddRunFlags(CLI::App& app, Flags& f) {
  Options o;
  app.add_option("--config", f.config, "JSON run config")->check(CLI::ExistingFile);
  o.structure = app.add_option("--structure", f.structure, "basic | incremental");
  o.negatives = app.add_option("--negatives", f.negatives, "wn | wn+llm | wn+llm+mask");
  o.connector = app.add_option("--connector", f.connector, "word joining noun phrases");
  o.max_depth = app.add_option("--max-depth", f.max_depth, "keep the deepest k levels");
  o.max_negatives = app.add_option("--max-negatives", f.max_negatives,
                                   "negatives kept per tree");
  o.shuffle_negatives = app.add_flag("--shuffle-negatives", f.shuffle_negatives,
                                     "sample kept negatives with the seed");
  o.alpha = app.add_option("--alpha", f.alpha, "tree-loss weight");
  o.temperature = app.add_option("--temperature", f.temperature, "logit multiplier");
  o.removal = app.add_option("--removal", f.removal, "per-text | anchor | dire");
  o.fractions = app.add_option("--fractions", f.fractions,
                               "comma-separated removal fractions");
  o.seed = app.add_option("--seed", f.seed, "run seed");
  o.scorer = app.add_option("--scorer", f.scorer, "toy | adapter URL");
  o.wordnet = app.add_option("--wordnet", f.wordnet, "WordNet database directory");
  o.oracle = app.add_option("--oracle", f.oracle, "none | stub JSON | adapter URL");
  o.lexicon = app.add_option("--lexicon", f.lexicon, "word<TAB>TAG lexicon");
  o.workers = app.add_option("--workers", f.workers, "worker threads");
  o.expand_k = app.add_option("--expand-k", f.expand_k,
                              "expansion candidates per word");
  o.heatmaps = app.add_option("--heatmaps", f.heatmaps, "cases to export maps for");
  return o;
}

[[noreturn]] void Usage(const std::string& message) {
  throw Error(ErrorCode::kInvalidArgument, message);
}

RunConfig ResolveConfig(const Flags& f, const Options& o) {
  RunConfig config;
  if (!f.config.empty()) {
    try {
      captree::ApplyConfigFile(config, f.config);
    } catch (const Error& e) {
      Usage(e.message());
    }
  }
  if (o.structure->count()) {
    const auto v = captree::ParseTreeStructure(f.structure);
    if (!v) Usage("--structure must be basic or incremental");
    config.structure = *v;
  }
  if (o.negatives->count()) {
    const auto v = captree::ParseStrategyKind(f.negatives);
    if (!v) Usage("--negatives must be wn, wn+llm or wn+llm+mask");
    config.negatives = *v;
  }
  if (o.connector->count()) config.connector = f.connector;
  if (o.max_depth->count()) config.constraints.max_depth = f.max_depth;
  if (o.max_negatives->count()) config.constraints.max_negatives = f.max_negatives;
  if (o.shuffle_negatives->count()) {
    config.constraints.shuffle_negatives = f.shuffle_negatives;
  }
  if (o.alpha->count()) config.loss.alpha = f.alpha;
  if (o.temperature->count()) config.loss.temperature = f.temperature;
  if (o.removal->count()) {
    const auto v = captree::ParseRemovalStrategy(f.removal);
    if (!v) Usage("--removal must be per-text, anchor or dire");
    config.removal = *v;
  }
  if (o.fractions->count()) {
    try {
      config.fractions = captree::ParseFractionList(f.fractions);
    } catch (const Error& e) {
      Usage(e.message());
    }
  }
  if (o.seed->count()) config.seed = f.seed;
  if (o.scorer->count()) config.scorer = f.scorer;
  if (o.wordnet->count()) config.wordnet = f.wordnet;
  if (o.oracle->count()) config.oracle = f.oracle;
  if (o.lexicon->count()) config.lexicon = f.lexicon;
  if (o.workers->count()) config.workers = f.workers;
  if (o.expand_k->count()) config.expand_k = f.expand_k;
  if (o.heatmaps->count()) config.heatmaps = f.heatmaps;
  config.Validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Caption-tree augmentation and interpretability toolkit"};
  app.require_subcommand(1);
  Flags flags;
  const Options options = AddRunFlags(app, flags);

  std::string captions, out, trees, images, eval, pairs;
  CLI::App* build = app.add_subcommand("build-tree", "captions -> trees JSONL");
  build->add_option("--captions", captions, "caption file")->required();
  build->add_option("--out", out, "trees JSONL to write")->required();
  build->fallthrough();

  CLI::App* evaluate = app.add_subcommand("eval", "score trees against images");
  evaluate->add_option("--trees", trees, "trees JSONL")->required();
  evaluate->add_option("--images", images, "image manifest JSONL")->required();
  evaluate->add_option("--out", out, "output directory")->required();
  evaluate->fallthrough();

  CLI::App* perturb = app.add_subcommand("perturb", "token-removal curve");
  perturb->add_option("--trees", trees, "trees JSONL")->required();
  perturb->add_option("--images", images, "image manifest JSONL")->required();
  perturb->add_option("--out", out, "output directory")->required();
  perturb->fallthrough();

  CLI::App* analyze = app.add_subcommand("analyze", "failure reports");
  analyze->add_option("--eval", eval, "eval JSONL")->required();
  analyze->add_option("--pairs", pairs, "positive<TAB>negative word pairs");
  analyze->add_option("--images", images, "image manifest JSONL")->required();
  analyze->add_option("--out", out, "output directory")->required();
  analyze->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? captree::kExitOk : captree::kExitUsage;
  }

  try {
    const RunConfig config = ResolveConfig(flags, options);
    if (build->parsed()) {
      captree::RunBuildTree(config, captions, out);
    } else if (evaluate->parsed()) {
      captree::RunEval(config, trees, images, out);
    } else if (perturb->parsed()) {
      captree::RunPerturb(config, trees, images, out);
    } else {
      captree::RunAnalyze(config, eval, pairs, images, out);
    }
  } catch (const Error& e) {
    std::cerr << "captree: " << e.what() << "\n";
    return captree::ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "captree: " << e.what() << "\n";
    return captree::kExitInput;
  }
  return captree::kExitOk;
}
