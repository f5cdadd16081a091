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


#include "captree/oracle.h"

#include "captree/caption.h"
#include "captree/error.h"
#include "captree/util.h"
#include "http_client.h"

namespace captree {

std::string SanitizeWord(std::string_view text) {
  const std::vector<std::string> words = SplitWhitespace(NormalizeText(text));
  return words.empty() ? std::string() : words.front();
}

StubOracle::StubOracle(std::map<std::string, std::string> opposites,
                       std::map<std::string, std::string> masks)
    : opposites_(std::move(opposites)), masks_(std::move(masks)) {}

StubOracle StubOracle::FromJson(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("oracle fixture: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kParse, "oracle fixture must be a JSON object");
  }
  auto read_map = [&](const char* key) {
    std::map<std::string, std::string> out;
    if (!doc.contains(key)) return out;
    const auto& section = doc.at(key);
    if (!section.is_object()) {
      throw Error(ErrorCode::kParse,
                  std::string("oracle fixture: '") + key + "' is not a map");
    }
    for (const auto& [k, v] : section.items()) {
      if (!v.is_string()) {
        throw Error(ErrorCode::kParse,
                    std::string("oracle fixture: value for '") + k +
                        "' is not a string");
      }
      out.emplace(k, v.get<std::string>());
    }
    return out;
  };
  for (const auto& [key, value] : doc.items()) {
    if (key != "opposite" && key != "mask") {
      throw Error(ErrorCode::kParse, "oracle fixture: unknown key '" + key + "'");
    }
  }
  return StubOracle(read_map("opposite"), read_map("mask"));
}

StubOracle StubOracle::Load(const std::filesystem::path& path) {
  return FromJson(ReadFile(path));
}

std::optional<std::string> StubOracle::Opposite(std::string_view word) const {
  auto it = opposites_.find(std::string(word));
  if (it == opposites_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> StubOracle::FillMask(std::string_view prompt) const {
  auto it = masks_.find(std::string(prompt));
  if (it == masks_.end()) return std::nullopt;
  return it->second;
}

RemoteOracle::RemoteOracle(std::string base_url, RetryPolicy retry)
    : base_url_(std::move(base_url)), retry_(retry) {}

std::optional<std::string> RemoteOracle::Call(const std::string& path,
                                              std::string_view key,
                                              std::string_view value) const {
  nlohmann::json body;
  body[std::string(key)] = value;
  const nlohmann::json reply = internal::PostJson(
      base_url_, path, body, retry_, ErrorCode::kOracleUnavailable);
  if (!reply.is_object() || !reply.contains("word")) {
    throw Error(ErrorCode::kParse, base_url_ + path + ": reply lacks 'word'");
  }
  const auto& word = reply.at("word");
  if (word.is_null()) return std::nullopt;
  if (!word.is_string()) {
    throw Error(ErrorCode::kParse, base_url_ + path + ": 'word' not a string");
  }
  return word.get<std::string>();
}

std::optional<std::string> RemoteOracle::Opposite(std::string_view word) const {
  return Call("/opposite", "word", word);
}

std::optional<std::string> RemoteOracle::FillMask(
    std::string_view prompt) const {
  return Call("/fill_mask", "prompt", prompt);
}

}  // namespace captree
