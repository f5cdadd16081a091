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


#include "captree/records.h"

#include <algorithm>
#include <set>

#include "captree/error.h"
#include "captree/util.h"
#include "json.hpp"

namespace captree {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void Malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedRecord, what);
}

const json& Field(const json& object, const char* key) {
  auto it = object.find(key);
  if (it == object.end()) Malformed(std::string("missing field \"") + key + "\"");
  return *it;
}

std::string StringField(const json& object, const char* key) {
  const json& value = Field(object, key);
  if (!value.is_string()) Malformed(std::string("\"") + key + "\" is not a string");
  return value.get<std::string>();
}

int IntField(const json& object, const char* key) {
  const json& value = Field(object, key);
  if (!value.is_number_integer()) {
    Malformed(std::string("\"") + key + "\" is not an integer");
  }
  return value.get<int>();
}

const json& ArrayField(const json& object, const char* key) {
  const json& value = Field(object, key);
  if (!value.is_array()) Malformed(std::string("\"") + key + "\" is not an array");
  return value;
}

void RequireKeys(const json& object, std::initializer_list<const char*> keys,
                 const char* what) {
  if (!object.is_object()) Malformed(std::string(what) + " is not an object");
  for (const auto& [key, value] : object.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) Malformed(std::string("unknown field \"") + key + "\" in " + what);
  }
}

json ParseLine(std::string_view line) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    Malformed(e.what());
  }
}

ordered_json TreeToJson(const CaptionTree& tree) {
  ordered_json doc;
  doc["caption_id"] = tree.caption_id;
  doc["caption"] = tree.source.raw;
  doc["structure"] = TreeStructureName(tree.structure);
  doc["connector"] = tree.connector;
  ordered_json levels = ordered_json::array();
  for (const TreeLevel& level : tree.levels) {
    ordered_json item;
    item["positive"] = level.positive;
    ordered_json origins = ordered_json::array();
    for (const LevelToken& token : level.tokens) {
      origins.push_back(token.origin ? *token.origin : -1);
    }
    item["origins"] = std::move(origins);
    ordered_json negatives = ordered_json::array();
    for (const Negative& n : level.negatives) {
      ordered_json neg;
      neg["text"] = n.text;
      neg["replaced_index"] = n.replaced_index;
      neg["replaced_word"] = n.replaced_word;
      neg["replacement"] = n.replacement;
      neg["source"] = NegativeSourceName(n.source);
      negatives.push_back(std::move(neg));
    }
    item["negatives"] = std::move(negatives);
    levels.push_back(std::move(item));
  }
  doc["levels"] = std::move(levels);
  return doc;
}

Negative NegativeFromJson(const json& doc, const TreeLevel& level) {
  RequireKeys(doc,
              {"text", "replaced_index", "replaced_word", "replacement",
               "source"},
              "negative");
  Negative n;
  n.text = StringField(doc, "text");
  n.replaced_index = IntField(doc, "replaced_index");
  n.replaced_word = StringField(doc, "replaced_word");
  n.replacement = StringField(doc, "replacement");
  const auto source = ParseNegativeSource(StringField(doc, "source"));
  if (!source) Malformed("unknown negative source");
  n.source = *source;
  if (n.replaced_index < 0 ||
      n.replaced_index >= static_cast<int>(level.tokens.size())) {
    Malformed("replaced_index " + std::to_string(n.replaced_index) +
              " outside \"" + level.positive + "\"");
  }
  if (level.tokens[n.replaced_index].text != n.replaced_word) {
    Malformed("replaced_word \"" + n.replaced_word + "\" is not at index " +
              std::to_string(n.replaced_index) + " of \"" + level.positive +
              "\"");
  }
  if (RenderReplacement(level, n.replaced_index, n.replacement) != n.text) {
    Malformed("negative \"" + n.text + "\" is not a one-word edit of \"" +
              level.positive + "\"");
  }
  return n;
}

CaptionTree TreeFromJson(const json& doc, const Tagger& tagger) {
  RequireKeys(doc,
              {"caption_id", "caption", "structure", "connector", "levels"},
              "tree");
  CaptionTree tree;
  tree.caption_id = StringField(doc, "caption_id");
  const auto structure = ParseTreeStructure(StringField(doc, "structure"));
  if (!structure) Malformed("unknown tree structure");
  tree.structure = *structure;
  tree.connector = StringField(doc, "connector");
  try {
    tree.source = ParseCaption(StringField(doc, "caption"), tagger);
  } catch (const Error& e) {
    Malformed("caption does not parse: " + e.message());
  }
  const ParsedCaption& source = tree.source;

  std::set<int> seen;
  for (const json& item : ArrayField(doc, "levels")) {
    RequireKeys(item, {"positive", "origins", "negatives"}, "level");
    TreeLevel level;
    level.level_index = static_cast<int>(tree.levels.size());
    level.positive = StringField(item, "positive");
    const std::vector<std::string> words = SplitWhitespace(level.positive);
    const json& origins = ArrayField(item, "origins");
    if (words.empty() || origins.size() != words.size()) {
      Malformed("level \"" + level.positive + "\" has " +
                std::to_string(origins.size()) + " origins for " +
                std::to_string(words.size()) + " words");
    }
    for (size_t i = 0; i < words.size(); ++i) {
      if (!origins[i].is_number_integer()) Malformed("origin is not an integer");
      const int origin = origins[i].get<int>();
      LevelToken token{words[i], PosTag::kConj, std::nullopt};
      if (origin >= 0) {
        if (origin >= static_cast<int>(source.tokens.size()) ||
            source.tokens[origin].text != words[i]) {
          Malformed("origin " + std::to_string(origin) + " does not match \"" +
                    words[i] + "\"");
        }
        token.tag = source.tags[origin];
        token.origin = origin;
      } else if (origin != -1 || words[i] != tree.connector) {
        Malformed("\"" + words[i] + "\" is neither a caption word nor the connector");
      }
      level.tokens.push_back(std::move(token));
    }
    for (const LevelToken& token : level.tokens) {
      if (token.origin && seen.insert(*token.origin).second) {
        level.introduced.push_back(*token.origin);
      }
    }
    std::sort(level.introduced.begin(), level.introduced.end());
    for (const json& neg : ArrayField(item, "negatives")) {
      level.negatives.push_back(NegativeFromJson(neg, level));
    }
    tree.levels.push_back(std::move(level));
  }
  if (tree.levels.empty()) Malformed("tree without levels");
  return tree;
}

template <typename T, typename Fn>
std::vector<T> ReadJsonl(const std::filesystem::path& path, Fn&& parse) {
  const std::string text = ReadFile(path);
  std::vector<T> out;
  size_t line_no = 0;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    const std::string_view line(text.data() + start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(parse(line));
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(line_no) +
                                ": " + e.message());
    }
  }
  return out;
}

}  // namespace

std::string TreeToJsonLine(const CaptionTree& tree) {
  return TreeToJson(tree).dump();
}

CaptionTree TreeFromJsonLine(std::string_view line, const Tagger& tagger) {
  return TreeFromJson(ParseLine(line), tagger);
}

std::string EvalRecordToJsonLine(const EvalRecord& record) {
  ordered_json doc;
  doc["caption_id"] = record.caption_id;
  doc["image_id"] = record.image_id;
  doc["failed_level"] = record.failed_level ? ordered_json(*record.failed_level)
                                            : ordered_json(nullptr);
  doc["failed_pos"] = record.failed_pos
                          ? ordered_json(PosTagName(*record.failed_pos))
                          : ordered_json(nullptr);
  ordered_json levels = ordered_json::array();
  for (const LevelOutcome& outcome : record.levels) {
    levels.push_back({{"chosen", outcome.chosen}, {"scores", outcome.scores}});
  }
  doc["levels"] = std::move(levels);
  doc["tree"] = TreeToJson(record.tree);
  return doc.dump();
}

EvalRecord EvalRecordFromJsonLine(std::string_view line, const Tagger& tagger) {
  const json doc = ParseLine(line);
  RequireKeys(doc,
              {"caption_id", "image_id", "failed_level", "failed_pos",
               "levels", "tree"},
              "eval record");
  EvalRecord record;
  record.caption_id = StringField(doc, "caption_id");
  record.image_id = StringField(doc, "image_id");
  record.tree = TreeFromJson(Field(doc, "tree"), tagger);
  for (const json& item : ArrayField(doc, "levels")) {
    RequireKeys(item, {"chosen", "scores"}, "level outcome");
    LevelOutcome outcome;
    outcome.chosen = IntField(item, "chosen");
    for (const json& score : ArrayField(item, "scores")) {
      if (!score.is_number()) Malformed("score is not a number");
      outcome.scores.push_back(score.get<double>());
    }
    record.levels.push_back(std::move(outcome));
  }
  if (record.levels.size() != record.tree.levels.size()) {
    Malformed("outcome count does not match tree depth");
  }
  for (size_t l = 0; l < record.levels.size(); ++l) {
    const LevelOutcome& outcome = record.levels[l];
    if (outcome.scores.size() != record.tree.levels[l].negatives.size() + 1 ||
        outcome.chosen < 0 ||
        outcome.chosen >= static_cast<int>(outcome.scores.size())) {
      Malformed("level " + std::to_string(l) + " outcome does not fit its captions");
    }
  }
  if (!Field(doc, "failed_level").is_null()) {
    record.failed_level = IntField(doc, "failed_level");
    if (*record.failed_level < 0 ||
        *record.failed_level >= static_cast<int>(record.levels.size()) ||
        record.levels[*record.failed_level].chosen == 0) {
      Malformed("failed_level does not point at a failed level");
    }
  }
  if (!Field(doc, "failed_pos").is_null()) {
    const auto tag = ParsePosTag(StringField(doc, "failed_pos"));
    if (!tag) Malformed("unknown failed_pos");
    record.failed_pos = *tag;
  }
  if (record.failed_level.has_value() != record.failed_pos.has_value()) {
    Malformed("failed_level and failed_pos must be set together");
  }
  return record;
}

std::vector<CaptionTree> ReadTrees(const std::filesystem::path& path,
                                   const Tagger& tagger) {
  return ReadJsonl<CaptionTree>(path, [&](std::string_view line) {
    return TreeFromJsonLine(line, tagger);
  });
}

std::vector<EvalRecord> ReadEvalRecords(const std::filesystem::path& path,
                                        const Tagger& tagger) {
  return ReadJsonl<EvalRecord>(path, [&](std::string_view line) {
    return EvalRecordFromJsonLine(line, tagger);
  });
}

std::vector<CaptionLine> ParseCaptionFile(std::string_view text) {
  std::vector<CaptionLine> out;
  size_t line_no = 0;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      out.push_back({std::to_string(line_no), std::string(line)});
    } else {
      const std::vector<std::string> id = SplitWhitespace(line.substr(0, tab));
      if (id.size() != 1) {
        throw Error(ErrorCode::kParse,
                    "line " + std::to_string(line_no) + ": bad caption id");
      }
      out.push_back({id[0], std::string(line.substr(tab + 1))});
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> ParsePairsFile(
    std::string_view text) {
  std::vector<std::pair<std::string, std::string>> pairs;
  size_t line_no = 0;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const std::vector<std::string> words = SplitWhitespace(line);
    if (words.empty()) continue;
    if (words.size() != 2) {
      throw Error(ErrorCode::kParse, "pairs line " + std::to_string(line_no) +
                                         ": expected two words");
    }
    pairs.emplace_back(ToLowerAscii(words[0]), ToLowerAscii(words[1]));
  }
  return pairs;
}

}  // namespace captree
