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

#ifndef OVLM_VOCAB_HPP_
#define OVLM_VOCAB_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "ovlm/lexer.hpp"

namespace ovlm {

enum class CommentHandling { Keep, Placeholder, Remove };
enum class StringHandling { Keep, Placeholder, KeepTruncated15 };

// Corpus preprocessing switches. Defaults keep everything and split nothing.
struct PrepConfig {
  bool non_english_filter = false;  // token with non-ASCII -> "<non-en>"
  bool keep_whitespace = true;
  CommentHandling comment_handling = CommentHandling::Keep;
  StringHandling string_handling = StringHandling::Keep;
  bool convention_split = false;  // camelCase / snake_case splitting
  bool case_markers = false;      // <Upper>/<UPPER> (requires convention_split)
  bool digit_split = false;       // every digit becomes its own subtoken

  // Throws Error("bad-config") when case_markers is set without
  // convention_split.
  void validate() const;
};

// A prepared token plus the lexical category it came from; categories drive
// the identifier-only metrics downstream.
struct PrepToken {
  std::string text;
  TokenCategory category = TokenCategory::Other;
};

// Applies the preprocessing pipeline to one lexed file: whitespace dropped
// unless kept, comments/strings rewritten per config (kept ones split on
// whitespace; truncated strings kept whole), non-English tokens replaced with
// "<non-en>", convention/digit splitting applied last.
std::vector<PrepToken> apply_prep_tagged(const TokenStream& stream,
                                         const PrepConfig& config);
std::vector<std::string> apply_prep(const TokenStream& stream,
                                    const PrepConfig& config);

// Splits one token on underscores and camelCase boundaries; "HTTPServer"
// becomes ["HTTP", "Server"]. With case_markers each capitalized piece is
// lowercased behind "<Upper>" (initial capital) or "<UPPER>" (all-caps,
// length >= 2); underscores become "<_>". With digit_split every digit is its
// own subtoken. Inverse of desplit.
std::vector<std::string> split_convention(const std::string& token_text,
                                          bool case_markers, bool digit_split);

// Digit-boundary splitting only (no camel/underscore handling, no markers).
std::vector<std::string> split_digits_only(const std::string& token_text);

// Joins subtokens, interpreting markers inversely. Throws
// Error("malformed-split") on dangling or doubled markers.
std::string desplit(const std::vector<std::string>& subtokens);

struct Vocabulary {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t total_tokens = 0;
};

// Counts token frequencies over prepared sequences (one per file).
Vocabulary build_vocabulary(
    const std::vector<std::vector<std::string>>& prepared_corpus);

// Entries sorted by count descending, ties lexicographic ascending.
std::vector<std::pair<std::string, std::uint64_t>> sorted_entries(
    const Vocabulary& vocab);

// ".vocab": "<token>\t<count>" per line in sorted_entries order.
std::string to_vocab_file(const Vocabulary& vocab);
Vocabulary from_vocab_file(const std::string& content);

struct VocabReport {
  std::uint64_t vocab_size = 0;
  std::uint64_t corpus_tokens = 0;
  // OOV percentage over distinct test words, keyed by vocabulary cutoff;
  // key 0 means the full (untruncated) vocabulary.
  std::map<std::uint64_t, double> oov_pct;
  // Percentage of vocabulary entries per frequency bucket:
  // >=1000, 101..999, 11..100, 2..10, exactly 1.
  double pct_ge_1000 = 0;
  double pct_101_999 = 0;
  double pct_11_100 = 0;
  double pct_2_10 = 0;
  double pct_1 = 0;
};

// OOV and frequency-bucket statistics for a train vocabulary against a test
// token sequence. Cutoff c keeps the c most frequent entries (ties: count
// descending, then lexicographic ascending). Throws Error("empty-test") when
// test_tokens is empty.
VocabReport vocab_report(const Vocabulary& train_vocab,
                         const std::vector<std::string>& test_tokens,
                         const std::vector<std::uint64_t>& cutoffs);

// "key=value" lines for the report file.
std::string to_report_file(const VocabReport& report);

}  // namespace ovlm

#endif  // OVLM_VOCAB_HPP_
