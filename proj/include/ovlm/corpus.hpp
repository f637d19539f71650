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

#ifndef OVLM_CORPUS_HPP_
#define OVLM_CORPUS_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "ovlm/bpe.hpp"
#include "ovlm/manifest.hpp"
#include "ovlm/vocab.hpp"

namespace ovlm {

// One source file after lexing and preparation.
struct CorpusFile {
  std::string path;
  std::vector<PrepToken> tokens;
};

struct CorpusProject {
  std::string name;
  std::vector<CorpusFile> files;
};
using Corpus = std::vector<CorpusProject>;

// Reads, lexes and prepares every file of a split. Files are processed in
// parallel; output order matches the split exactly.
Corpus load_split(const Split& split, Language language,
                  const PrepConfig& prep);

// Flattened token texts of a corpus, project and file order preserved.
std::vector<std::string> corpus_texts(const Corpus& corpus);

std::size_t corpus_token_count(const Corpus& corpus);

// A file's tokens segmented into model units. token_first[i] is the index
// of token i's first unit; token i spans units [token_first[i],
// token_first[i+1]) with token_first[tokens] == units.size().
struct SegmentedFile {
  std::vector<PrepToken> tokens;
  std::vector<int> units;                 // unit ids, end markers included
  std::vector<std::size_t> token_first;   // size tokens + 1
};

SegmentedFile segment_file(const CorpusFile& file, const BpeModel& bpe,
                           const UnitVocab& vocab,
                           SegmentStats* stats = nullptr);

// Unit-id stream of an entire corpus, files concatenated in order.
std::vector<int> corpus_unit_ids(const Corpus& corpus, const BpeModel& bpe,
                                 const UnitVocab& vocab,
                                 SegmentStats* stats = nullptr);

}  // namespace ovlm

#endif  // OVLM_CORPUS_HPP_
