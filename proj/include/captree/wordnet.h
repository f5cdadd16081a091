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


#ifndef CAPTREE_WORDNET_H_
#define CAPTREE_WORDNET_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "captree/caption.h"

namespace captree {

// Syntactic category of a WordNet database file. Adjective satellites live
// in the adjective files and share kAdj.
enum class WordNetPos : char {
  kNoun = 'n',
  kVerb = 'v',
  kAdj = 'a',
  kAdv = 'r',
};

struct SynsetId {
  uint32_t offset = 0;
  WordNetPos pos = WordNetPos::kNoun;

  friend auto operator<=>(const SynsetId&, const SynsetId&) = default;
};

std::string SynsetIdString(const SynsetId& id);

struct Synset {
  SynsetId id;
  bool satellite = false;
  // Lowercased, adjective position markers removed; collocations keep '_'.
  std::vector<std::string> lemmas;
  // '@' and '@i' links.
  std::vector<SynsetId> hypernyms;
  // Adjective cluster links ('&').
  std::vector<SynsetId> similar;
  // lemma -> lemmas reached over lexical '!' pointers.
  std::map<std::string, std::vector<std::string>> antonyms;
};

// Read-only view over the standard WordNet plain-text database
// (index.{noun,verb,adj,adv} + data.{noun,verb,adj,adv}).
//
// Records are framed strictly: every data line's offset field must equal its
// byte position in the file and every index entry must resolve to a synset.
// Fields the store does not use (glosses, verb frames, lexicographer ids)
// are skipped without validation.
class WordNetStore {
 public:
  // Throws kMissingFile or kMalformedRecord.
  static WordNetStore Load(const std::filesystem::path& data_dir);

  size_t synset_count() const { return synsets_.size(); }
  const Synset* Find(const SynsetId& id) const;

  // Synsets of `word` for every WordNet category `tag` maps onto. ADP maps
  // onto adjectives and adverbs ("up", "in", "out" live there).
  std::vector<const Synset*> SynsetsFor(std::string_view word,
                                        PosTag tag) const;
  bool Contains(std::string_view word, PosTag tag) const;

  // Up to k single-word lemmas sharing a parent with some sense of `word`,
  // excluding the word and its synonyms. The candidate list is sorted,
  // shuffled with a generator seeded from (seed, word) and truncated.
  // Nouns and verbs use hypernym links; adjective satellites use their
  // cluster head. Throws kUnknownWord.
  std::vector<std::string> CoHyponyms(std::string_view word, PosTag tag,
                                      size_t k, uint64_t seed) const;

  // Direct antonym links, deduplicated in first-seen order.
  // Throws kUnknownWord.
  std::vector<std::string> Antonyms(std::string_view word, PosTag tag) const;

  // True iff both words are lemmas of one synset of the category. Unknown
  // words yield false.
  bool IsSynonym(std::string_view a, std::string_view b, PosTag tag) const;

  // Single-word lemmas sharing a synset with `word`, sorted.
  std::vector<std::string> Synonyms(std::string_view word, PosTag tag) const;

  // Sorted single-word adjective lemmas.
  const std::vector<std::string>& adjective_lemmas() const {
    return adjective_lemmas_;
  }

 private:
  struct IndexKey {
    std::string lemma;
    WordNetPos pos;
    friend auto operator<=>(const IndexKey&, const IndexKey&) = default;
  };

  // Lexical '!' pointer; resolved once every data file is read.
  struct AntonymLink {
    SynsetId source;
    uint32_t source_word;
    SynsetId target;
    uint32_t target_word;
  };

  void LoadData(const std::filesystem::path& path, WordNetPos pos,
                std::vector<AntonymLink>& antonyms);
  void LoadIndex(const std::filesystem::path& path, WordNetPos pos);
  void Finalize();

  std::map<IndexKey, std::vector<SynsetId>> index_;
  std::map<SynsetId, Synset> synsets_;
  // Reverse parent links: hypernym -> hyponyms, head -> satellites.
  std::map<SynsetId, std::vector<SynsetId>> children_;
  std::vector<std::string> adjective_lemmas_;
};

// True when a lemma can stand in as a single caption token.
bool IsSingleWordLemma(std::string_view lemma);

}  // namespace captree

#endif  // CAPTREE_WORDNET_H_
