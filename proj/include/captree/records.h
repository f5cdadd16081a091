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


#ifndef CAPTREE_RECORDS_H_
#define CAPTREE_RECORDS_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "captree/analysis.h"
#include "captree/caption.h"
#include "captree/caption_tree.h"

namespace captree {

// One tree as a single JSON line:
//   {"caption_id", "caption", "structure", "connector",
//    "levels": [{"positive", "origins": [caption index | -1, ...],
//                "negatives": [{"text", "replaced_index", "replaced_word",
//                               "replacement", "source"}]}]}
// `origins` runs parallel to the words of `positive`; -1 marks a connector.
std::string TreeToJsonLine(const CaptionTree& tree);

// Inverse of TreeToJsonLine. The caption is re-parsed with `tagger`, which
// must match the one the tree was built with. Throws kMalformedRecord.
CaptionTree TreeFromJsonLine(std::string_view line, const Tagger& tagger);

// {"caption_id", "image_id", "failed_level", "failed_pos",
//  "levels": [{"chosen", "scores"}], "tree": {...}}
std::string EvalRecordToJsonLine(const EvalRecord& record);
EvalRecord EvalRecordFromJsonLine(std::string_view line, const Tagger& tagger);

// Reads a JSONL file; blank lines are skipped. Errors carry the line number.
std::vector<CaptionTree> ReadTrees(const std::filesystem::path& path,
                                   const Tagger& tagger);
std::vector<EvalRecord> ReadEvalRecords(const std::filesystem::path& path,
                                        const Tagger& tagger);

struct CaptionLine {
  std::string id;
  std::string caption;
};

// One caption per line, optionally "id<TAB>caption". Lines without an id
// are numbered from 1 by line. Blank lines are skipped.
std::vector<CaptionLine> ParseCaptionFile(std::string_view text);

// "positive<TAB>negative" (or space separated) per line; '#' starts a
// comment.
std::vector<std::pair<std::string, std::string>> ParsePairsFile(
    std::string_view text);

}  // namespace captree

#endif  // CAPTREE_RECORDS_H_
