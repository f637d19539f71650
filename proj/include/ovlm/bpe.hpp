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

#ifndef OVLM_BPE_HPP_
#define OVLM_BPE_HPP_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ovlm {

// End-of-token marker: a first-class symbol, appended to every token before
// merging and kept as the last unit (or unit suffix) of each segmentation.
inline constexpr const char* kEndOfToken = "</t>";
// Reserved unit substituted for characters outside the learned alphabet.
inline constexpr const char* kUnkChar = "<unkchar>";

// Subword merge table. Applying merges in order to a character sequence
// (plus kEndOfToken) reproduces the segmentation the learner saw.
struct BpeModel {
  std::vector<std::pair<std::string, std::string>> merges;
  // Single characters seen during learning, plus kEndOfToken.
  std::unordered_set<std::string> initial_symbols;

  int num_merges() const { return static_cast<int>(merges.size()); }
};

// Symbol order used for tie-breaking: byte-lexicographic, except that the
// end-of-token marker sorts after every real character.
bool bpe_symbol_less(const std::string& a, const std::string& b);
bool bpe_pair_less(const std::pair<std::string, std::string>& a,
                   const std::pair<std::string, std::string>& b);

// Splits text into UTF-8 code points (bytes of invalid sequences would have
// been rejected upstream; here any byte run is kept together per code point).
std::vector<std::string> split_utf8_chars(const std::string& text);

// Learns up to num_merges merges by repeatedly merging the most frequent
// adjacent symbol pair (per occurrence) across the corpus; ties break toward
// the smaller pair under bpe_pair_less. Stops early once the best pair count
// drops below 2. Uses incremental pair-count updates; behavior matches a
// full-recount reference exactly.
BpeModel learn_bpe(const std::vector<std::string>& corpus_tokens,
                   int num_merges);

struct SegmentStats {
  std::uint64_t unknown_chars = 0;
};

// Segments one token: characters plus the end marker, then every merge in
// recorded order, left to right, non-overlapping. Characters outside the
// model's alphabet become kUnkChar (counted in stats when given).
std::vector<std::string> segment(const std::string& token_text,
                                 const BpeModel& model,
                                 SegmentStats* stats = nullptr);

// Concatenated segmentations of a token sequence; memoizes repeated tokens.
std::vector<std::string> segment_stream(const std::vector<std::string>& tokens,
                                        const BpeModel& model,
                                        SegmentStats* stats = nullptr);

// Inverse of segment_stream: joins units between end-of-token markers and
// strips the markers. Throws Error("incomplete-token") when units remain
// after the last marker.
std::vector<std::string> desegment(const std::vector<std::string>& units);

// The model's closed unit vocabulary: kUnkChar, initial symbols (sorted by
// bpe_symbol_less), then merge products in merge order (deduplicated).
struct UnitVocab {
  std::vector<std::string> units;
  std::unordered_map<std::string, int> ids;
  int unk_id = 0;

  int size() const { return static_cast<int>(units.size()); }
  // Id lookup; unknown strings (only possible for hand-built sequences)
  // map to unk_id.
  int id_of(const std::string& unit) const {
    auto it = ids.find(unit);
    return it == ids.end() ? unk_id : it->second;
  }
};

UnitVocab unit_vocab(const BpeModel& model);

// Hash that ties a checkpoint to the vocabulary it was trained over.
std::string vocab_sha256(const UnitVocab& vocab);

// ".bpe" files: "#bpe v1 merges=<n>" header, a "#symbols ..." line carrying
// the initial alphabet, then one "<left> <right>" merge per line in
// application order (fields escaped: \\, \n, \t, \s).
std::string to_bpe_file(const BpeModel& model);
BpeModel from_bpe_file(const std::string& content);
void write_bpe(const std::string& path, const BpeModel& model);
BpeModel read_bpe(const std::string& path);

}  // namespace ovlm

#endif  // OVLM_BPE_HPP_
