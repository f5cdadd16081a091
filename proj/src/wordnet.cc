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


#include "captree/wordnet.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <functional>
#include <set>

#include "captree/error.h"
#include "captree/util.h"

namespace captree {
namespace {

namespace fs = std::filesystem;

struct FileSpec {
  const char* suffix;
  WordNetPos pos;
};

constexpr FileSpec kFiles[] = {
    {"noun", WordNetPos::kNoun},
    {"verb", WordNetPos::kVerb},
    {"adj", WordNetPos::kAdj},
    {"adv", WordNetPos::kAdv},
};

std::vector<WordNetPos> CategoriesFor(PosTag tag) {
  switch (tag) {
    case PosTag::kNoun: return {WordNetPos::kNoun};
    case PosTag::kVerb: return {WordNetPos::kVerb};
    case PosTag::kAdj: return {WordNetPos::kAdj};
    case PosTag::kAdv: return {WordNetPos::kAdv};
    case PosTag::kAdp: return {WordNetPos::kAdj, WordNetPos::kAdv};
    default: return {};
  }
}

// Record parser over the whitespace-separated fields of one line.
class FieldCursor {
 public:
  FieldCursor(std::string_view line, std::string file, size_t offset)
      : fields_(SplitWhitespace(line)), file_(std::move(file)),
        offset_(offset) {}

  bool done() const { return next_ >= fields_.size(); }

  std::string_view Next(const char* what) {
    if (done()) Fail(std::string("missing ") + what);
    return fields_[next_++];
  }

  uint32_t Number(const char* what, int base) {
    std::string_view field = Next(what);
    uint32_t value = 0;
    auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value, base);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      Fail(std::string("bad ") + what + " '" + std::string(field) + "'");
    }
    return value;
  }

  [[noreturn]] void Fail(const std::string& message) const {
    throw Error(ErrorCode::kMalformedRecord,
                file_ + " at offset " + std::to_string(offset_) + ": " +
                    message);
  }

 private:
  std::vector<std::string> fields_;
  size_t next_ = 0;
  std::string file_;
  size_t offset_;
};

WordNetPos PosFromChar(char c, const FieldCursor& cursor) {
  switch (c) {
    case 'n': return WordNetPos::kNoun;
    case 'v': return WordNetPos::kVerb;
    case 'a':
    case 's': return WordNetPos::kAdj;
    case 'r': return WordNetPos::kAdv;
    default: cursor.Fail(std::string("bad part of speech '") + c + "'");
  }
}

// Strips "(a)", "(p)", "(ip)" adjective markers and lowercases.
std::string CleanLemma(std::string_view raw) {
  if (const size_t paren = raw.find('('); paren != std::string_view::npos) {
    raw = raw.substr(0, paren);
  }
  return ToLowerAscii(raw);
}

void ForEachRecordLine(
    const std::string& text, const std::string& file,
    const std::function<void(std::string_view, size_t)>& fn) {
  size_t pos = 0;
  while (pos < text.size()) {
    const size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) {
      throw Error(ErrorCode::kMalformedRecord,
                  file + " at offset " + std::to_string(pos) +
                      ": unterminated record (truncated file?)");
    }
    std::string_view line(text.data() + pos, eol - pos);
    // License banner lines start with two spaces.
    if (!line.empty() && !line.starts_with("  ")) fn(line, pos);
    pos = eol + 1;
  }
}

}  // namespace

std::string SynsetIdString(const SynsetId& id) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08u-%c", id.offset,
                static_cast<char>(id.pos));
  return buf;
}

bool IsSingleWordLemma(std::string_view lemma) {
  return !lemma.empty() && std::all_of(lemma.begin(), lemma.end(), [](char c) {
    return c >= 'a' && c <= 'z';
  });
}

WordNetStore WordNetStore::Load(const fs::path& data_dir) {
  for (const FileSpec& entry : kFiles) {
    for (const char* prefix : {"index.", "data."}) {
      const fs::path path = data_dir / (std::string(prefix) + entry.suffix);
      if (!fs::is_regular_file(path)) {
        throw Error(ErrorCode::kMissingFile, path.string());
      }
    }
  }
  WordNetStore store;
  std::vector<AntonymLink> antonyms;
  for (const FileSpec& entry : kFiles) {
    store.LoadData(data_dir / (std::string("data.") + entry.suffix), entry.pos,
                   antonyms);
  }
  for (const FileSpec& entry : kFiles) {
    store.LoadIndex(data_dir / (std::string("index.") + entry.suffix),
                    entry.pos);
  }
  for (const AntonymLink& link : antonyms) {
    auto source = store.synsets_.find(link.source);
    auto target = store.synsets_.find(link.target);
    if (target == store.synsets_.end()) {
      throw Error(ErrorCode::kMalformedRecord,
                  "antonym of " + SynsetIdString(link.source) +
                      " points at missing synset " +
                      SynsetIdString(link.target));
    }
    const auto& src_lemmas = source->second.lemmas;
    const auto& dst_lemmas = target->second.lemmas;
    if (link.source_word == 0 || link.source_word > src_lemmas.size() ||
        link.target_word == 0 || link.target_word > dst_lemmas.size()) {
      throw Error(ErrorCode::kMalformedRecord,
                  "antonym word number out of range in " +
                      SynsetIdString(link.source));
    }
    source->second.antonyms[src_lemmas[link.source_word - 1]].push_back(
        dst_lemmas[link.target_word - 1]);
  }
  store.Finalize();
  return store;
}

void WordNetStore::LoadData(const fs::path& path, WordNetPos pos,
                            std::vector<AntonymLink>& antonyms) {
  const std::string text = ReadFile(path);
  const std::string file = path.filename().string();
  ForEachRecordLine(text, file, [&](std::string_view line, size_t byte_pos) {
    const size_t bar = line.find('|');
    FieldCursor cursor(line.substr(0, bar), file, byte_pos);
    if (bar == std::string_view::npos) cursor.Fail("missing gloss separator");

    Synset synset;
    synset.id = {cursor.Number("synset offset", 10), pos};
    if (synset.id.offset != byte_pos) {
      cursor.Fail("offset field " + std::to_string(synset.id.offset) +
                  " does not match byte position");
    }
    cursor.Number("lexicographer file number", 10);
    std::string_view ss_type = cursor.Next("synset type");
    if (ss_type.size() != 1 || PosFromChar(ss_type[0], cursor) != pos) {
      cursor.Fail("synset type '" + std::string(ss_type) +
                  "' does not match file");
    }
    synset.satellite = ss_type[0] == 's';

    const uint32_t word_count = cursor.Number("word count", 16);
    if (word_count == 0) cursor.Fail("synset without lemmas");
    for (uint32_t i = 0; i < word_count; ++i) {
      synset.lemmas.push_back(CleanLemma(cursor.Next("lemma")));
      cursor.Next("lex id");
    }

    const uint32_t pointer_count = cursor.Number("pointer count", 10);
    for (uint32_t i = 0; i < pointer_count; ++i) {
      std::string_view symbol = cursor.Next("pointer symbol");
      SynsetId target;
      target.offset = cursor.Number("pointer offset", 10);
      std::string_view target_pos = cursor.Next("pointer pos");
      if (target_pos.size() != 1) cursor.Fail("bad pointer pos");
      target.pos = PosFromChar(target_pos[0], cursor);
      const uint32_t source_target = cursor.Number("source/target", 16);
      if (symbol == "@" || symbol == "@i") {
        if (target.pos != pos) cursor.Fail("hypernym crosses part of speech");
        synset.hypernyms.push_back(target);
      } else if (symbol == "&") {
        synset.similar.push_back(target);
      } else if (symbol == "!") {
        antonyms.push_back({synset.id, source_target >> 8, target,
                                     source_target & 0xff});
      }
    }
    // Verb frames and anything else before the gloss are not used.
    synsets_.emplace(synset.id, std::move(synset));
  });
}

void WordNetStore::LoadIndex(const fs::path& path, WordNetPos pos) {
  const std::string text = ReadFile(path);
  const std::string file = path.filename().string();
  ForEachRecordLine(text, file, [&](std::string_view line, size_t byte_pos) {
    FieldCursor cursor(line, file, byte_pos);
    std::string lemma = CleanLemma(cursor.Next("lemma"));
    std::string_view pos_field = cursor.Next("pos");
    if (pos_field.size() != 1 || PosFromChar(pos_field[0], cursor) != pos) {
      cursor.Fail("index pos does not match file");
    }
    const uint32_t synset_count = cursor.Number("synset count", 10);
    const uint32_t pointer_count = cursor.Number("pointer count", 10);
    for (uint32_t i = 0; i < pointer_count; ++i) cursor.Next("pointer symbol");
    cursor.Number("sense count", 10);
    cursor.Number("tagged sense count", 10);
    std::vector<SynsetId>& ids = index_[{std::move(lemma), pos}];
    for (uint32_t i = 0; i < synset_count; ++i) {
      SynsetId id{cursor.Number("synset offset", 10), pos};
      if (!synsets_.contains(id)) {
        cursor.Fail("index refers to missing synset " + SynsetIdString(id));
      }
      ids.push_back(id);
    }
    if (!cursor.done()) cursor.Fail("trailing fields in index entry");
  });
}

void WordNetStore::Finalize() {
  std::set<std::string> adjectives;
  for (const auto& [id, synset] : synsets_) {
    for (const SynsetId& parent : synset.hypernyms) {
      children_[parent].push_back(id);
    }
    if (synset.satellite) {
      for (const SynsetId& head : synset.similar) {
        children_[head].push_back(id);
      }
    }
    if (id.pos == WordNetPos::kAdj) {
      for (const std::string& lemma : synset.lemmas) {
        if (IsSingleWordLemma(lemma)) adjectives.insert(lemma);
      }
    }
  }
  adjective_lemmas_.assign(adjectives.begin(), adjectives.end());
}

const Synset* WordNetStore::Find(const SynsetId& id) const {
  auto it = synsets_.find(id);
  return it == synsets_.end() ? nullptr : &it->second;
}

std::vector<const Synset*> WordNetStore::SynsetsFor(std::string_view word,
                                                    PosTag tag) const {
  std::vector<const Synset*> out;
  const std::string lemma = ToLowerAscii(word);
  for (WordNetPos pos : CategoriesFor(tag)) {
    auto it = index_.find({lemma, pos});
    if (it == index_.end()) continue;
    for (const SynsetId& id : it->second) out.push_back(Find(id));
  }
  return out;
}

bool WordNetStore::Contains(std::string_view word, PosTag tag) const {
  return !SynsetsFor(word, tag).empty();
}

std::vector<std::string> WordNetStore::CoHyponyms(std::string_view word,
                                                  PosTag tag, size_t k,
                                                  uint64_t seed) const {
  const auto senses = SynsetsFor(word, tag);
  if (senses.empty()) {
    throw Error(ErrorCode::kUnknownWord,
                std::string(word) + "/" + std::string(PosTagName(tag)));
  }
  const std::string query = ToLowerAscii(word);
  std::set<std::string> candidates;
  for (const Synset* sense : senses) {
    const std::vector<SynsetId>& parents =
        sense->satellite ? sense->similar : sense->hypernyms;
    for (const SynsetId& parent : parents) {
      auto kids = children_.find(parent);
      if (kids == children_.end()) continue;
      for (const SynsetId& sibling : kids->second) {
        for (const std::string& lemma : Find(sibling)->lemmas) {
          if (IsSingleWordLemma(lemma) && lemma != query) {
            candidates.insert(lemma);
          }
        }
      }
    }
  }
  std::vector<std::string> out;
  for (const std::string& lemma : candidates) {
    if (!IsSynonym(query, lemma, tag)) out.push_back(lemma);
  }
  SeededRng rng(MixSeed(seed, query));
  rng.shuffle(out);
  if (out.size() > k) out.resize(k);
  return out;
}

std::vector<std::string> WordNetStore::Antonyms(std::string_view word,
                                                PosTag tag) const {
  const auto senses = SynsetsFor(word, tag);
  if (senses.empty()) {
    throw Error(ErrorCode::kUnknownWord,
                std::string(word) + "/" + std::string(PosTagName(tag)));
  }
  const std::string query = ToLowerAscii(word);
  std::vector<std::string> out;
  for (const Synset* sense : senses) {
    auto it = sense->antonyms.find(query);
    if (it == sense->antonyms.end()) continue;
    for (const std::string& antonym : it->second) {
      if (std::find(out.begin(), out.end(), antonym) == out.end()) {
        out.push_back(antonym);
      }
    }
  }
  return out;
}

bool WordNetStore::IsSynonym(std::string_view a, std::string_view b,
                             PosTag tag) const {
  const std::string lb = ToLowerAscii(b);
  for (const Synset* sense : SynsetsFor(a, tag)) {
    if (std::find(sense->lemmas.begin(), sense->lemmas.end(), lb) !=
        sense->lemmas.end()) {
      return true;
    }
  }
  return false;
}

std::vector<std::string> WordNetStore::Synonyms(std::string_view word,
                                                PosTag tag) const {
  const std::string query = ToLowerAscii(word);
  std::set<std::string> out;
  for (const Synset* sense : SynsetsFor(word, tag)) {
    for (const std::string& lemma : sense->lemmas) {
      if (lemma != query && IsSingleWordLemma(lemma)) out.insert(lemma);
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace captree
