// Copyright 2026 The ovlm Authors
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

#include "ovlm/corpus.hpp"

#include <utility>

#include "ovlm/lexer.hpp"
#include "ovlm/textio.hpp"
#include "ovlm/util.hpp"

namespace ovlm {

Corpus load_split(const Split& split, Language language,
                  const PrepConfig& prep) {
  prep.validate();
  // Flatten so parallel_for can hand out single files.
  std::vector<std::pair<std::size_t, const std::string*>> work;
  Corpus corpus(split.size());
  for (std::size_t p = 0; p < split.size(); ++p) {
    corpus[p].name = split[p].name;
    corpus[p].files.resize(split[p].files.size());
    for (const std::string& f : split[p].files) work.emplace_back(p, &f);
  }
  std::vector<std::size_t> file_index(work.size());
  {
    std::size_t i = 0;
    for (std::size_t p = 0; p < split.size(); ++p)
      for (std::size_t f = 0; f < split[p].files.size(); ++f)
        file_index[i++] = f;
  }
  const LanguageProfile& profile = profile_for(language);
  parallel_for(work.size(), [&](std::size_t i) {
    const auto& [p, path] = work[i];
    CorpusFile out;
    out.path = *path;
    out.tokens = apply_prep_tagged(lex(read_file(*path), profile), prep);
    corpus[p].files[file_index[i]] = std::move(out);
  });
  return corpus;
}

std::vector<std::string> corpus_texts(const Corpus& corpus) {
  std::vector<std::string> texts;
  texts.reserve(corpus_token_count(corpus));
  for (const auto& project : corpus)
    for (const auto& file : project.files)
      for (const auto& tok : file.tokens) texts.push_back(tok.text);
  return texts;
}

std::size_t corpus_token_count(const Corpus& corpus) {
  std::size_t n = 0;
  for (const auto& project : corpus)
    for (const auto& file : project.files) n += file.tokens.size();
  return n;
}

SegmentedFile segment_file(const CorpusFile& file, const BpeModel& bpe,
                           const UnitVocab& vocab, SegmentStats* stats) {
  SegmentedFile out;
  out.tokens = file.tokens;
  out.token_first.reserve(file.tokens.size() + 1);
  for (const auto& tok : file.tokens) {
    out.token_first.push_back(out.units.size());
    for (const std::string& unit : segment(tok.text, bpe, stats))
      out.units.push_back(vocab.id_of(unit));
  }
  out.token_first.push_back(out.units.size());
  return out;
}

std::vector<int> corpus_unit_ids(const Corpus& corpus, const BpeModel& bpe,
                                 const UnitVocab& vocab, SegmentStats* stats) {
  std::vector<int> ids;
  for (const auto& project : corpus) {
    for (const auto& file : project.files) {
      std::vector<std::string> texts;
      texts.reserve(file.tokens.size());
      for (const auto& tok : file.tokens) texts.push_back(tok.text);
      for (const std::string& unit : segment_stream(texts, bpe, stats))
        ids.push_back(vocab.id_of(unit));
    }
  }
  return ids;
}

}  // namespace ovlm
