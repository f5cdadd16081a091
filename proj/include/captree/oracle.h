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


#ifndef CAPTREE_ORACLE_H_
#define CAPTREE_ORACLE_H_

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace captree {

// Sentinel the mask-fill oracle completes.
inline constexpr std::string_view kMaskToken = "<extra_id_0>";

// Prompt sent to a generative model for opposites; "<>" is replaced by the
// word.
inline constexpr std::string_view kOppositePrompt =
    "find an opposite for the word: <>";

// Source of replacement words backed by a language model (or a fixture).
// Implementations return single lowercase tokens or nothing, and must be
// safe to call from several threads.
class WordOracle {
 public:
  virtual ~WordOracle() = default;

  virtual std::optional<std::string> Opposite(std::string_view word) const = 0;

  // `prompt` contains kMaskToken where the replaced word was.
  virtual std::optional<std::string> FillMask(
      std::string_view prompt) const = 0;
};

// First whitespace-separated token, lowercased, ASCII punctuation removed.
// Empty when nothing usable remains.
std::string SanitizeWord(std::string_view text);

// Fixture-backed oracle. The JSON form is
//   {"opposite": {word: word, ...}, "mask": {prompt: word, ...}}
// and both maps are optional.
class StubOracle : public WordOracle {
 public:
  StubOracle() = default;
  StubOracle(std::map<std::string, std::string> opposites,
             std::map<std::string, std::string> masks);

  static StubOracle FromJson(std::string_view text);
  static StubOracle Load(const std::filesystem::path& path);

  std::optional<std::string> Opposite(std::string_view word) const override;
  std::optional<std::string> FillMask(std::string_view prompt) const override;

 private:
  std::map<std::string, std::string> opposites_;
  std::map<std::string, std::string> masks_;
};

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{50};
  std::chrono::milliseconds timeout{10000};
};

// Client for the adapter's text-generation endpoints:
//   POST /opposite  {"word": w}        -> {"word": w' | null}
//   POST /fill_mask {"prompt": p}      -> {"word": w' | null}
// Transport failures and 5xx responses are retried with doubling backoff;
// once attempts run out the call throws kOracleUnavailable.
class RemoteOracle : public WordOracle {
 public:
  explicit RemoteOracle(std::string base_url, RetryPolicy retry = {});

  std::optional<std::string> Opposite(std::string_view word) const override;
  std::optional<std::string> FillMask(std::string_view prompt) const override;

 private:
  // POSTs {key: value} to `path` and reads the "word" field of the reply.
  std::optional<std::string> Call(const std::string& path,
                                  std::string_view key,
                                  std::string_view value) const;

  std::string base_url_;
  RetryPolicy retry_;
};

}  // namespace captree

#endif  // CAPTREE_ORACLE_H_
