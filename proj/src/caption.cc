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


#include "captree/caption.h"

#include <algorithm>
#include <cctype>

#include "captree/error.h"
#include "captree/util.h"

namespace captree {

extern const char kBuiltinLexicon[];

namespace {

bool EndsWith(std::string_view word, std::string_view suffix) {
  return word.size() >= suffix.size() &&
         word.substr(word.size() - suffix.size()) == suffix;
}

bool AllDigits(std::string_view word) {
  return !word.empty() && std::all_of(word.begin(), word.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c));
  });
}

}  // namespace

std::string_view PosTagName(PosTag tag) {
  switch (tag) {
    case PosTag::kNoun: return "NOUN";
    case PosTag::kVerb: return "VERB";
    case PosTag::kAdj: return "ADJ";
    case PosTag::kAdp: return "ADP";
    case PosTag::kDet: return "DET";
    case PosTag::kNum: return "NUM";
    case PosTag::kPron: return "PRON";
    case PosTag::kAdv: return "ADV";
    case PosTag::kConj: return "CONJ";
    case PosTag::kPart: return "PART";
    case PosTag::kOther: return "OTHER";
  }
  return "OTHER";
}

std::optional<PosTag> ParsePosTag(std::string_view name) {
  for (PosTag tag : kAllPosTags) {
    if (PosTagName(tag) == name) return tag;
  }
  return std::nullopt;
}

std::string ParsedCaption::normalized() const { return JoinTokens(tokens); }

std::string NormalizeText(std::string_view text) {
  std::string stripped;
  stripped.reserve(text.size());
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::ispunct(u)) continue;
    stripped.push_back(static_cast<char>(u < 0x80 ? std::tolower(u) : u));
  }
  return Join(SplitWhitespace(stripped), " ");
}

std::vector<Token> Tokenize(std::string_view caption) {
  std::vector<std::string> words = SplitWhitespace(NormalizeText(caption));
  if (words.empty()) {
    throw Error(ErrorCode::kEmptyCaption,
                "no tokens in caption \"" + std::string(caption) + "\"");
  }
  std::vector<Token> tokens;
  tokens.reserve(words.size());
  for (size_t i = 0; i < words.size(); ++i) {
    tokens.push_back({std::move(words[i]), static_cast<int>(i)});
  }
  return tokens;
}

std::string JoinTokens(std::span<const Token> tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i].text;
  }
  return out;
}

Lexicon Lexicon::Builtin() { return Parse(kBuiltinLexicon, "<builtin>"); }

Lexicon Lexicon::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path), path.string());
}

Lexicon Lexicon::Parse(std::string_view text, std::string_view source_name) {
  Lexicon lexicon;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw Error(ErrorCode::kParse, std::string(source_name) + ":" +
                                         std::to_string(line_no) +
                                         ": expected word<TAB>TAG");
    }
    const auto tag = ParsePosTag(line.substr(tab + 1));
    if (!tag) {
      throw Error(ErrorCode::kParse,
                  std::string(source_name) + ":" + std::to_string(line_no) +
                      ": unknown tag '" + std::string(line.substr(tab + 1)) +
                      "'");
    }
    lexicon.Add(ToLowerAscii(line.substr(0, tab)), *tag);
  }
  return lexicon;
}

std::optional<PosTag> Lexicon::Lookup(std::string_view word) const {
  auto it = entries_.find(std::string(word));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void Lexicon::Add(std::string word, PosTag tag) {
  entries_[std::move(word)] = tag;
}

std::vector<std::string> Lexicon::WordsWithTag(PosTag tag) const {
  std::vector<std::string> words;
  for (const auto& [word, t] : entries_) {
    if (t == tag) words.push_back(word);
  }
  std::sort(words.begin(), words.end());
  return words;
}

PosTag Tagger::Tag(std::string_view word) const {
  if (auto tag = lexicon_.Lookup(word)) return *tag;
  if (AllDigits(word)) return PosTag::kNum;
  if (word.size() > 4 && EndsWith(word, "ing")) return PosTag::kVerb;
  if (word.size() > 3 && EndsWith(word, "ed")) return PosTag::kVerb;
  if (word.size() > 3 && EndsWith(word, "ly")) return PosTag::kAdv;
  for (std::string_view suffix :
       {"ous", "ful", "less", "able", "ible", "ive", "ish"}) {
    if (word.size() > suffix.size() + 2 && EndsWith(word, suffix)) {
      return PosTag::kAdj;
    }
  }
  return PosTag::kNoun;
}

std::vector<PosTag> Tagger::Tag(std::span<const Token> tokens) const {
  std::vector<PosTag> tags;
  tags.reserve(tokens.size());
  for (const Token& token : tokens) tags.push_back(Tag(token.text));
  return tags;
}

std::vector<NounPhrase> ChunkNounPhrases(std::span<const Token> tokens,
                                         std::span<const PosTag> tags) {
  if (tokens.size() != tags.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "tag sequence is not parallel to tokens");
  }
  const int n = static_cast<int>(tokens.size());
  auto is_modifier = [&](int i) {
    return tags[i] == PosTag::kDet || tags[i] == PosTag::kNum ||
           tags[i] == PosTag::kAdj;
  };
  std::vector<NounPhrase> phrases;
  int i = 0;
  while (i < n) {
    int j = i;
    while (j < n && is_modifier(j)) ++j;
    int k = j;
    while (k < n && tags[k] == PosTag::kNoun) ++k;
    if (k == j) {
      // No noun after this modifier run; retry from the next token.
      i = std::max(i + 1, j);
      continue;
    }
    NounPhrase phrase{i, k, JoinTokens(tokens.subspan(i, k - i))};
    phrases.push_back(std::move(phrase));
    i = k;
  }
  if (phrases.empty()) {
    throw Error(ErrorCode::kNoNounPhrase,
                "no noun in \"" + JoinTokens(tokens) + "\"");
  }
  return phrases;
}

ParsedCaption ParseCaption(std::string_view raw, const Tagger& tagger) {
  ParsedCaption parsed;
  parsed.raw = std::string(raw);
  parsed.tokens = Tokenize(raw);
  parsed.tags = tagger.Tag(parsed.tokens);
  parsed.noun_phrases = ChunkNounPhrases(parsed.tokens, parsed.tags);
  return parsed;
}

}  // namespace captree
