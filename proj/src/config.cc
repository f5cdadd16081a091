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


#include "captree/config.h"

#include <charconv>
#include <cstdlib>

#include "captree/error.h"
#include "captree/util.h"
#include "json.hpp"

namespace captree {
namespace {

using nlohmann::json;

[[noreturn]] void Bad(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::kParse, "config key \"" + key + "\": " + what);
}

std::string GetString(const json& value, const std::string& key) {
  if (!value.is_string()) Bad(key, "expected a string");
  return value.get<std::string>();
}

double GetNumber(const json& value, const std::string& key) {
  if (!value.is_number()) Bad(key, "expected a number");
  return value.get<double>();
}

int GetInt(const json& value, const std::string& key) {
  if (!value.is_number_integer()) Bad(key, "expected an integer");
  return value.get<int>();
}

std::optional<int> GetOptionalInt(const json& value, const std::string& key) {
  if (value.is_null()) return std::nullopt;
  return GetInt(value, key);
}

}  // namespace

std::vector<double> RunConfig::DefaultFractions() {
  std::vector<double> out;
  for (int i = 0; i <= 10; ++i) out.push_back(i / 10.0);
  return out;
}

void RunConfig::Validate() const {
  constraints.Validate();
  loss.Validate();
  if (fractions.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no removal fractions");
  }
  for (size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] >= 0.0 && fractions[i] <= 1.0) ||
        (i > 0 && !(fractions[i] > fractions[i - 1]))) {
      throw Error(ErrorCode::kInvalidArgument,
                  "fractions must be strictly increasing within [0, 1]");
    }
  }
  if (workers < 1) {
    throw Error(ErrorCode::kInvalidArgument, "workers must be at least 1");
  }
  if (expand_k < 0 || heatmaps < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "expand-k and heatmaps must not be negative");
  }
  if (connector.empty() || SplitWhitespace(connector).size() != 1 ||
      NormalizeText(connector) != connector) {
    throw Error(ErrorCode::kInvalidArgument,
                "connector must be one lowercase word");
  }
  if (scorer != "toy" && !IsUrl(scorer)) {
    throw Error(ErrorCode::kInvalidArgument,
                "scorer must be \"toy\" or an http URL");
  }
}

std::string RunConfig::ResolvedWordNetDir() const {
  if (!wordnet.empty()) return wordnet;
  const char* env = std::getenv(std::string(kWordNetEnvVar).c_str());
  return env == nullptr ? std::string() : std::string(env);
}

void ApplyConfigJson(RunConfig& config, std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::kParse, "config must be a JSON object");
  }
  for (const auto& [key, value] : doc.items()) {
    if (key == "structure") {
      const auto parsed = ParseTreeStructure(GetString(value, key));
      if (!parsed) Bad(key, "expected basic or incremental");
      config.structure = *parsed;
    } else if (key == "negatives") {
      const auto parsed = ParseStrategyKind(GetString(value, key));
      if (!parsed) Bad(key, "expected wn, wn+llm or wn+llm+mask");
      config.negatives = *parsed;
    } else if (key == "connector") {
      config.connector = GetString(value, key);
    } else if (key == "max-depth") {
      config.constraints.max_depth = GetOptionalInt(value, key);
    } else if (key == "max-negatives") {
      config.constraints.max_negatives = GetOptionalInt(value, key);
    } else if (key == "shuffle-negatives") {
      if (!value.is_boolean()) Bad(key, "expected true or false");
      config.constraints.shuffle_negatives = value.get<bool>();
    } else if (key == "alpha") {
      config.loss.alpha = GetNumber(value, key);
    } else if (key == "temperature") {
      config.loss.temperature = GetNumber(value, key);
    } else if (key == "removal") {
      const auto parsed = ParseRemovalStrategy(GetString(value, key));
      if (!parsed) Bad(key, "expected per-text, anchor or dire");
      config.removal = *parsed;
    } else if (key == "fractions") {
      if (!value.is_array()) Bad(key, "expected an array of numbers");
      config.fractions.clear();
      for (const json& f : value) config.fractions.push_back(GetNumber(f, key));
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) Bad(key, "expected a non-negative integer");
      config.seed = value.get<uint64_t>();
    } else if (key == "scorer") {
      config.scorer = GetString(value, key);
    } else if (key == "wordnet") {
      config.wordnet = GetString(value, key);
    } else if (key == "oracle") {
      config.oracle = GetString(value, key);
    } else if (key == "lexicon") {
      config.lexicon = GetString(value, key);
    } else if (key == "workers") {
      config.workers = GetInt(value, key);
    } else if (key == "expand-k") {
      config.expand_k = GetInt(value, key);
    } else if (key == "heatmaps") {
      config.heatmaps = GetInt(value, key);
    } else {
      throw Error(ErrorCode::kParse, "unknown config key \"" + key + "\"");
    }
  }
}

void ApplyConfigFile(RunConfig& config, const std::filesystem::path& path) {
  try {
    ApplyConfigJson(config, ReadFile(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kMissingFile) throw;
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

std::vector<double> ParseFractionList(std::string_view text) {
  std::vector<double> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error(ErrorCode::kParse,
                  "bad fraction \"" + std::string(item) + "\"");
    }
    out.push_back(value);
    start = end + 1;
  }
  return out;
}

bool IsUrl(std::string_view value) {
  return value.starts_with("http://") || value.starts_with("https://");
}

}  // namespace captree
