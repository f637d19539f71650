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

// Naive merge learner used as the correctness reference: it rebuilds the
// full pair-count table from scratch every iteration. Deliberately written
// without any of the production learner's machinery.

#ifndef OVLM_TESTS_ORACLES_REFERENCE_BPE_HPP_
#define OVLM_TESTS_ORACLES_REFERENCE_BPE_HPP_

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

inline std::vector<std::string> chars_of(const std::string& text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char b = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if (b >= 0xF0)
      len = 4;
    else if (b >= 0xE0)
      len = 3;
    else if (b >= 0xC0)
      len = 2;
    if (i + len > text.size()) len = 1;
    out.push_back(text.substr(i, len));
    i += len;
  }
  return out;
}

// Sort key making the end-of-token marker compare after every real symbol
// (0xFF never occurs in valid UTF-8).
inline std::string sym_key(const std::string& s) {
  const std::string marker = "</t>";
  if (s.size() >= marker.size() &&
      s.compare(s.size() - marker.size(), marker.size(), marker) == 0)
    return s.substr(0, s.size() - marker.size()) + '\xFF';
  return s;
}

struct PairLess {
  bool operator()(const std::pair<std::string, std::string>& a,
                  const std::pair<std::string, std::string>& b) const {
    const std::string ka = sym_key(a.first), kb = sym_key(b.first);
    if (ka != kb) return ka < kb;
    return sym_key(a.second) < sym_key(b.second);
  }
};

// Recount-everything learner: per-occurrence counts, best pair by count
// then ascending pair order, stop when the best count drops below 2.
inline std::vector<std::pair<std::string, std::string>> naive_learn(
    const std::vector<std::string>& corpus, int num_merges) {
  std::vector<std::vector<std::string>> words;
  words.reserve(corpus.size());
  for (const std::string& tok : corpus) {
    std::vector<std::string> w = chars_of(tok);
    w.push_back("</t>");
    words.push_back(std::move(w));
  }

  std::vector<std::pair<std::string, std::string>> merges;
  for (int m = 0; m < num_merges; ++m) {
    std::map<std::pair<std::string, std::string>, long long, PairLess> counts;
    for (const auto& w : words)
      for (std::size_t i = 0; i + 1 < w.size(); ++i)
        ++counts[{w[i], w[i + 1]}];

    std::pair<std::string, std::string> best;
    long long best_count = 0;
    for (const auto& [pair, count] : counts) {
      if (count > best_count) {  // map order is ascending, first max wins
        best = pair;
        best_count = count;
      }
    }
    if (best_count < 2) break;
    merges.push_back(best);

    for (auto& w : words) {
      std::vector<std::string> next;
      std::size_t i = 0;
      while (i < w.size()) {
        if (i + 1 < w.size() && w[i] == best.first && w[i + 1] == best.second) {
          next.push_back(w[i] + w[i + 1]);
          i += 2;
        } else {
          next.push_back(w[i]);
          ++i;
        }
      }
      w = std::move(next);
    }
  }
  return merges;
}

}  // namespace oracle

#endif  // OVLM_TESTS_ORACLES_REFERENCE_BPE_HPP_
