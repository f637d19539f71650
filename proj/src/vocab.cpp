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

#include "ovlm/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "ovlm/error.hpp"
#include "ovlm/textio.hpp"
#include "ovlm/util.hpp"

namespace ovlm {

namespace {

constexpr const char* kUnderscoreMark = "<_>";
constexpr const char* kUpperMark = "<Upper>";
constexpr const char* kAllCapsMark = "<UPPER>";

bool ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool ascii_lower(char c) { return c >= 'a' && c <= 'z'; }
bool ascii_digit(char c) { return c >= '0' && c <= '9'; }

bool has_non_ascii(const std::string& text) {
  for (char c : text) {
    if (static_cast<unsigned char>(c) >= 0x80) return true;
  }
  return false;
}

// Underscore, camelCase and optional digit segmentation. Underscores become
// "<_>" marker subtokens; everything else keeps its original case here.
std::vector<std::string> segment_token(const std::string& text,
                                       bool digit_split) {
  std::vector<std::string> pieces;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      pieces.push_back(cur);
      cur.clear();
    }
  };
  for (char c : text) {
    if (c == '_') {
      flush();
      pieces.push_back(kUnderscoreMark);
      continue;
    }
    if (cur.empty()) {
      cur.push_back(c);
      continue;
    }
    char last = cur.back();
    // An uppercase run followed by lowercase splits before its last letter:
    // "HTTPServer" -> "HTTP" + "Server".
    if (ascii_lower(c) && ascii_upper(last) && cur.size() >= 2 &&
        ascii_upper(cur[cur.size() - 2])) {
      pieces.push_back(cur.substr(0, cur.size() - 1));
      cur.erase(0, cur.size() - 1);
      cur.push_back(c);
      continue;
    }
    bool boundary = ascii_upper(c) && (ascii_lower(last) || ascii_digit(last));
    if (digit_split && (ascii_digit(c) || ascii_digit(last))) boundary = true;
    if (boundary) flush();
    cur.push_back(c);
  }
  flush();
  return pieces;
}

std::string lower_all(std::string s) {
  for (char& c : s) {
    if (ascii_upper(c)) c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

}  // namespace

void PrepConfig::validate() const {
  if (case_markers && !convention_split) {
    throw Error("bad-config", "case_markers requires convention_split");
  }
}

std::vector<std::string> split_convention(const std::string& token_text,
                                          bool case_markers,
                                          bool digit_split) {
  std::vector<std::string> pieces = segment_token(token_text, digit_split);
  if (!case_markers) return pieces;

  std::vector<std::string> out;
  out.reserve(pieces.size());
  for (auto& piece : pieces) {
    if (piece == kUnderscoreMark) {
      out.push_back(piece);
      continue;
    }
    int uppers = 0;
    int lowers = 0;
    for (char c : piece) {
      if (ascii_upper(c)) ++uppers;
      if (ascii_lower(c)) ++lowers;
    }
    if (uppers == 0 || !ascii_upper(piece[0])) {
      out.push_back(std::move(piece));
    } else if (uppers == 1) {
      out.push_back(kUpperMark);
      piece[0] = static_cast<char>(piece[0] - 'A' + 'a');
      out.push_back(std::move(piece));
    } else if (lowers == 0) {
      out.push_back(kAllCapsMark);
      out.push_back(lower_all(std::move(piece)));
    } else {
      // Mixed case that segmentation cannot produce; kept verbatim so the
      // desplit roundtrip stays exact.
      out.push_back(std::move(piece));
    }
  }
  return out;
}

std::vector<std::string> split_digits_only(const std::string& token_text) {
  std::vector<std::string> pieces;
  std::string cur;
  for (char c : token_text) {
    if (ascii_digit(c)) {
      if (!cur.empty()) {
        pieces.push_back(cur);
        cur.clear();
      }
      pieces.emplace_back(1, c);
    } else {
      if (!cur.empty() && ascii_digit(cur.back())) {
        pieces.push_back(cur);
        cur.clear();
      }
      cur.push_back(c);
    }
  }
  if (!cur.empty()) pieces.push_back(cur);
  return pieces;
}

std::string desplit(const std::vector<std::string>& subtokens) {
  enum Pending { kNone, kUpper, kAllCaps };
  Pending pending = kNone;
  std::string out;
  for (const auto& st : subtokens) {
    if (st == kUpperMark || st == kAllCapsMark) {
      if (pending != kNone) {
        throw Error("malformed-split", "doubled case marker");
      }
      pending = st == kUpperMark ? kUpper : kAllCaps;
      continue;
    }
    if (st == kUnderscoreMark) {
      if (pending != kNone) {
        throw Error("malformed-split", "case marker before underscore");
      }
      out.push_back('_');
      continue;
    }
    std::string piece = st;
    if (pending == kUpper && !piece.empty() && ascii_lower(piece[0])) {
      piece[0] = static_cast<char>(piece[0] - 'a' + 'A');
    } else if (pending == kAllCaps) {
      for (char& c : piece) {
        if (ascii_lower(c)) c = static_cast<char>(c - 'a' + 'A');
      }
    }
    pending = kNone;
    out += piece;
  }
  if (pending != kNone) {
    throw Error("malformed-split", "dangling case marker");
  }
  return out;
}

std::vector<PrepToken> apply_prep_tagged(const TokenStream& stream,
                                         const PrepConfig& config) {
  config.validate();
  std::vector<PrepToken> out;
  out.reserve(stream.tokens.size());

  // (text, placeholder) pieces produced by the structural stage for one token.
  std::vector<std::pair<std::string, bool>> pieces;
  for (const auto& token : stream.tokens) {
    pieces.clear();
    switch (token.category) {
      case TokenCategory::Whitespace:
        if (config.keep_whitespace) pieces.emplace_back(token.text, false);
        break;
      case TokenCategory::Comment:
        switch (config.comment_handling) {
          case CommentHandling::Keep:
            for (auto& w : split_whitespace(token.text)) {
              pieces.emplace_back(std::move(w), false);
            }
            break;
          case CommentHandling::Placeholder:
            pieces.emplace_back("<comment>", true);
            break;
          case CommentHandling::Remove:
            break;
        }
        break;
      case TokenCategory::StringLiteral:
        switch (config.string_handling) {
          case StringHandling::Keep:
            for (auto& w : split_whitespace(token.text)) {
              pieces.emplace_back(std::move(w), false);
            }
            break;
          case StringHandling::Placeholder:
            pieces.emplace_back("<string>", true);
            break;
          case StringHandling::KeepTruncated15:
            if (token.text.size() >= 15) {
              pieces.emplace_back("\"\"", false);
            } else {
              pieces.emplace_back(token.text, false);
            }
            break;
        }
        break;
      default:
        pieces.emplace_back(token.text, false);
    }

    for (auto& [text, placeholder] : pieces) {
      if (!placeholder && config.non_english_filter && has_non_ascii(text)) {
        text = "<non-en>";
        placeholder = true;
      }
      if (!placeholder && (config.convention_split || config.digit_split)) {
        std::vector<std::string> subs =
            config.convention_split
                ? split_convention(text, config.case_markers,
                                   config.digit_split)
                : split_digits_only(text);
        for (auto& s : subs) {
          out.push_back({std::move(s), token.category});
        }
      } else {
        out.push_back({std::move(text), token.category});
      }
    }
  }
  return out;
}

std::vector<std::string> apply_prep(const TokenStream& stream,
                                    const PrepConfig& config) {
  std::vector<std::string> out;
  auto tagged = apply_prep_tagged(stream, config);
  out.reserve(tagged.size());
  for (auto& t : tagged) out.push_back(std::move(t.text));
  return out;
}

Vocabulary build_vocabulary(
    const std::vector<std::vector<std::string>>& prepared_corpus) {
  Vocabulary vocab;
  for (const auto& file : prepared_corpus) {
    for (const auto& token : file) {
      ++vocab.counts[token];
      ++vocab.total_tokens;
    }
  }
  return vocab;
}

std::vector<std::pair<std::string, std::uint64_t>> sorted_entries(
    const Vocabulary& vocab) {
  std::vector<std::pair<std::string, std::uint64_t>> entries(
      vocab.counts.begin(), vocab.counts.end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return entries;
}

std::string to_vocab_file(const Vocabulary& vocab) {
  std::string out;
  for (const auto& [token, count] : sorted_entries(vocab)) {
    out += escape_field(token);
    out.push_back('\t');
    out += std::to_string(count);
    out.push_back('\n');
  }
  return out;
}

Vocabulary from_vocab_file(const std::string& content) {
  Vocabulary vocab;
  for (const auto& line : split_lines(content)) {
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error("corrupt", "vocabulary line without separator");
    }
    std::uint64_t count = std::stoull(line.substr(tab + 1));
    vocab.counts[unescape_field(line.substr(0, tab))] = count;
    vocab.total_tokens += count;
  }
  return vocab;
}

VocabReport vocab_report(const Vocabulary& train_vocab,
                         const std::vector<std::string>& test_tokens,
                         const std::vector<std::uint64_t>& cutoffs) {
  if (test_tokens.empty()) {
    throw Error("empty-test", "test corpus has no tokens");
  }
  VocabReport report;
  report.vocab_size = train_vocab.counts.size();
  report.corpus_tokens = train_vocab.total_tokens;

  // Rank of each vocabulary entry under the truncation order; a word with
  // rank r survives cutoff c iff r < c.
  auto entries = sorted_entries(train_vocab);
  std::unordered_map<std::string, std::size_t> rank;
  rank.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    rank.emplace(entries[i].first, i);
  }

  std::unordered_set<std::string> distinct(test_tokens.begin(),
                                           test_tokens.end());
  auto oov_at = [&](std::uint64_t cutoff) {
    std::size_t oov = 0;
    for (const auto& word : distinct) {
      auto it = rank.find(word);
      if (it == rank.end() || it->second >= cutoff) ++oov;
    }
    return 100.0 * static_cast<double>(oov) /
           static_cast<double>(distinct.size());
  };
  report.oov_pct[0] = oov_at(entries.size());
  for (std::uint64_t c : cutoffs) {
    if (c == 0) throw Error("bad-config", "cutoff must be positive");
    report.oov_pct[c] = oov_at(c);
  }

  if (!entries.empty()) {
    std::uint64_t buckets[5] = {0, 0, 0, 0, 0};
    for (const auto& [token, count] : train_vocab.counts) {
      (void)token;
      if (count >= 1000) {
        ++buckets[0];
      } else if (count >= 101) {
        ++buckets[1];
      } else if (count >= 11) {
        ++buckets[2];
      } else if (count >= 2) {
        ++buckets[3];
      } else {
        ++buckets[4];
      }
    }
    double size = static_cast<double>(report.vocab_size);
    report.pct_ge_1000 = 100.0 * static_cast<double>(buckets[0]) / size;
    report.pct_101_999 = 100.0 * static_cast<double>(buckets[1]) / size;
    report.pct_11_100 = 100.0 * static_cast<double>(buckets[2]) / size;
    report.pct_2_10 = 100.0 * static_cast<double>(buckets[3]) / size;
    report.pct_1 = 100.0 * static_cast<double>(buckets[4]) / size;
  }
  return report;
}

std::string to_report_file(const VocabReport& report) {
  std::string out;
  out += "vocab_size=" + std::to_string(report.vocab_size) + "\n";
  out += "corpus_tokens=" + std::to_string(report.corpus_tokens) + "\n";
  auto full = report.oov_pct.find(0);
  if (full != report.oov_pct.end()) {
    out += "oov_full=" + format_double(full->second) + "\n";
  }
  for (auto it = report.oov_pct.rbegin(); it != report.oov_pct.rend(); ++it) {
    if (it->first == 0) continue;
    out += "oov_" + std::to_string(it->first) + "=" +
           format_double(it->second) + "\n";
  }
  out += "freq_pct_ge_1000=" + format_double(report.pct_ge_1000) + "\n";
  out += "freq_pct_101_999=" + format_double(report.pct_101_999) + "\n";
  out += "freq_pct_11_100=" + format_double(report.pct_11_100) + "\n";
  out += "freq_pct_2_10=" + format_double(report.pct_2_10) + "\n";
  out += "freq_pct_1=" + format_double(report.pct_1) + "\n";
  return out;
}

}  // namespace ovlm
