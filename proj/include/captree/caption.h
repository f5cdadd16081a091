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


#ifndef CAPTREE_CAPTION_H_
#define CAPTREE_CAPTION_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace captree {

// Coarse universal part-of-speech tag set.
enum class PosTag {
  kNoun,
  kVerb,
  kAdj,
  kAdp,
  kDet,
  kNum,
  kPron,
  kAdv,
  kConj,
  kPart,
  kOther,
};

inline constexpr PosTag kAllPosTags[] = {
    PosTag::kNoun, PosTag::kVerb, PosTag::kAdj,  PosTag::kAdp,
    PosTag::kDet,  PosTag::kNum,  PosTag::kPron, PosTag::kAdv,
    PosTag::kConj, PosTag::kPart, PosTag::kOther,
};

std::string_view PosTagName(PosTag tag);
std::optional<PosTag> ParsePosTag(std::string_view name);

// Tags whose words get one-word-replacement negatives.
inline bool IsReplaceable(PosTag tag) {
  return tag == PosTag::kNoun || tag == PosTag::kAdj || tag == PosTag::kAdp ||
         tag == PosTag::kVerb;
}

struct Token {
  std::string text;
  int index = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

// Half-open token span [start, end).
struct NounPhrase {
  int start = 0;
  int end = 0;
  std::string text;

  friend bool operator==(const NounPhrase&, const NounPhrase&) = default;
};

struct ParsedCaption {
  std::string raw;
  std::vector<Token> tokens;
  std::vector<PosTag> tags;
  std::vector<NounPhrase> noun_phrases;

  // Tokens joined by single spaces.
  std::string normalized() const;

  friend bool operator==(const ParsedCaption&, const ParsedCaption&) = default;
};

// Lowercases, strips ASCII punctuation and collapses whitespace.
std::string NormalizeText(std::string_view text);

// Throws kEmptyCaption when nothing survives normalization.
std::vector<Token> Tokenize(std::string_view caption);

std::string JoinTokens(std::span<const Token> tokens);

// word -> tag table. The text form is one `word<TAB>TAG` entry per line;
// blank lines and lines starting with '#' are ignored.
class Lexicon {
 public:
  static Lexicon Builtin();
  static Lexicon Load(const std::filesystem::path& path);
  static Lexicon Parse(std::string_view text, std::string_view source_name);

  std::optional<PosTag> Lookup(std::string_view word) const;
  void Add(std::string word, PosTag tag);
  size_t size() const { return entries_.size(); }

  // Sorted words carrying `tag`.
  std::vector<std::string> WordsWithTag(PosTag tag) const;

 private:
  std::unordered_map<std::string, PosTag> entries_;
};

// Lexicon lookup first, then suffix rules, then NOUN.
class Tagger {
 public:
  explicit Tagger(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}

  PosTag Tag(std::string_view word) const;
  std::vector<PosTag> Tag(std::span<const Token> tokens) const;

  const Lexicon& lexicon() const { return lexicon_; }

 private:
  Lexicon lexicon_;
};

// Maximal left-to-right spans matching (DET|NUM|ADJ)* NOUN+.
// Throws kNoNounPhrase when no token is tagged NOUN.
std::vector<NounPhrase> ChunkNounPhrases(std::span<const Token> tokens,
                                         std::span<const PosTag> tags);

ParsedCaption ParseCaption(std::string_view raw, const Tagger& tagger);

}  // namespace captree

#endif  // CAPTREE_CAPTION_H_
