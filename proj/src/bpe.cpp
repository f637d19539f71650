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

#include "ovlm/bpe.hpp"

#include <algorithm>
#include <cstring>

#include "ovlm/error.hpp"
#include "ovlm/textio.hpp"
#include "ovlm/util.hpp"

namespace ovlm {

namespace {

// Sort key: the end marker compares above every byte that can occur in
// UTF-8 text (0xFF never does).
std::string symbol_key(const std::string& sym) {
  std::string key;
  key.reserve(sym.size());
  std::size_t i = 0;
  while (i < sym.size()) {
    if (sym.compare(i, 4, kEndOfToken) == 0) {
      key.push_back('\xFF');
      i += 4;
    } else {
      key.push_back(sym[i]);
      ++i;
    }
  }
  return key;
}

int utf8_len(unsigned char c) {
  if (c < 0x80) return 1;
  if ((c & 0xE0) == 0xC0) return 2;
  if ((c & 0xF0) == 0xE0) return 3;
  if ((c & 0xF8) == 0xF0) return 4;
  return 1;
}

using PairKey = std::uint64_t;
PairKey pair_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

// Interned-symbol working state for the learner.
struct Learner {
  std::vector<std::string> symbols;       // id -> text
  std::vector<std::string> keys;          // id -> tie-break key
  std::unordered_map<std::string, int> ids;

  // Distinct token strings with multiplicities. Every occurrence of the
  // same token has the same symbol sequence at every step, so grouped
  // counting is exactly per-occurrence counting.
  std::vector<std::vector<int>> words;
  std::vector<std::int64_t> word_count;

  std::unordered_map<PairKey, std::int64_t> pair_counts;
  std::unordered_map<PairKey, std::unordered_set<std::size_t>> where;

  int intern(const std::string& s) {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(symbols.size());
    ids.emplace(s, id);
    symbols.push_back(s);
    keys.push_back(symbol_key(s));
    return id;
  }

  bool id_pair_less(int a1, int b1, int a2, int b2) const {
    if (keys[a1] != keys[a2]) return keys[a1] < keys[a2];
    return keys[b1] < keys[b2];
  }

  void add_pairs(std::size_t w, std::int64_t sign) {
    const auto& seq = words[w];
    std::int64_t c = sign * word_count[w];
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      PairKey k = pair_key(seq[i], seq[i + 1]);
      pair_counts[k] += c;
      if (sign > 0) where[k].insert(w);
    }
  }
};

}  // namespace

bool bpe_symbol_less(const std::string& a, const std::string& b) {
  return symbol_key(a) < symbol_key(b);
}

bool bpe_pair_less(const std::pair<std::string, std::string>& a,
                   const std::pair<std::string, std::string>& b) {
  std::string ka = symbol_key(a.first);
  std::string kb = symbol_key(b.first);
  if (ka != kb) return ka < kb;
  return symbol_key(a.second) < symbol_key(b.second);
}

std::vector<std::string> split_utf8_chars(const std::string& text) {
  std::vector<std::string> chars;
  std::size_t i = 0;
  while (i < text.size()) {
    int len = utf8_len(static_cast<unsigned char>(text[i]));
    if (i + static_cast<std::size_t>(len) > text.size()) {
      len = static_cast<int>(text.size() - i);
    }
    chars.push_back(text.substr(i, static_cast<std::size_t>(len)));
    i += static_cast<std::size_t>(len);
  }
  return chars;
}

BpeModel learn_bpe(const std::vector<std::string>& corpus_tokens,
                   int num_merges) {
  BpeModel model;
  model.initial_symbols.insert(kEndOfToken);

  Learner st;
  int end_id = st.intern(kEndOfToken);

  std::unordered_map<std::string, std::size_t> word_index;
  for (const auto& token : corpus_tokens) {
    auto it = word_index.find(token);
    if (it != word_index.end()) {
      ++st.word_count[it->second];
      continue;
    }
    std::vector<int> seq;
    for (const auto& ch : split_utf8_chars(token)) {
      model.initial_symbols.insert(ch);
      seq.push_back(st.intern(ch));
    }
    seq.push_back(end_id);
    word_index.emplace(token, st.words.size());
    st.words.push_back(std::move(seq));
    st.word_count.push_back(1);
  }
  for (std::size_t w = 0; w < st.words.size(); ++w) st.add_pairs(w, +1);

  for (int m = 0; m < num_merges; ++m) {
    // Highest count wins; ties break toward the smaller (left, right).
    std::int64_t best_count = 0;
    int best_a = -1;
    int best_b = -1;
    for (const auto& [key, count] : st.pair_counts) {
      if (count <= 0) continue;
      int a = static_cast<int>(key >> 32);
      int b = static_cast<int>(key & 0xFFFFFFFFu);
      if (count > best_count ||
          (count == best_count && st.id_pair_less(a, b, best_a, best_b))) {
        best_count = count;
        best_a = a;
        best_b = b;
      }
    }
    if (best_count < 2) break;

    const std::string left = st.symbols[best_a];
    const std::string right = st.symbols[best_b];
    model.merges.emplace_back(left, right);
    int merged = st.intern(left + right);

    PairKey bk = pair_key(best_a, best_b);
    std::unordered_set<std::size_t> touched = std::move(st.where[bk]);
    st.where.erase(bk);
    for (std::size_t w : touched) {
      auto& seq = st.words[w];
      std::vector<int> next;
      next.reserve(seq.size());
      bool changed = false;
      for (std::size_t i = 0; i < seq.size();) {
        if (i + 1 < seq.size() && seq[i] == best_a && seq[i + 1] == best_b) {
          next.push_back(merged);
          i += 2;
          changed = true;
        } else {
          next.push_back(seq[i]);
          ++i;
        }
      }
      if (!changed) continue;  // stale index entry
      st.add_pairs(w, -1);
      seq = std::move(next);
      st.add_pairs(w, +1);
    }
  }
  return model;
}

namespace {

void merge_pass(std::vector<std::string>& units, const std::string& left,
                const std::string& right) {
  std::size_t out = 0;
  std::size_t i = 0;
  bool changed = false;
  while (i < units.size()) {
    if (i + 1 < units.size() && units[i] == left && units[i + 1] == right) {
      units[out] = units[i] + units[i + 1];
      i += 2;
      changed = true;
    } else {
      if (out != i) units[out] = std::move(units[i]);
      ++i;
    }
    ++out;
  }
  if (changed) units.resize(out);
}

}  // namespace

std::vector<std::string> segment(const std::string& token_text,
                                 const BpeModel& model, SegmentStats* stats) {
  std::vector<std::string> units;
  for (auto& ch : split_utf8_chars(token_text)) {
    if (model.initial_symbols.count(ch)) {
      units.push_back(std::move(ch));
    } else {
      units.emplace_back(kUnkChar);
      if (stats) ++stats->unknown_chars;
    }
  }
  units.emplace_back(kEndOfToken);
  for (const auto& [left, right] : model.merges) {
    merge_pass(units, left, right);
  }
  return units;
}

std::vector<std::string> segment_stream(const std::vector<std::string>& tokens,
                                        const BpeModel& model,
                                        SegmentStats* stats) {
  std::vector<std::string> out;
  std::unordered_map<std::string, std::pair<std::vector<std::string>,
                                            std::uint64_t>> memo;
  for (const auto& token : tokens) {
    auto it = memo.find(token);
    if (it == memo.end()) {
      SegmentStats local;
      auto units = segment(token, model, &local);
      it = memo.emplace(token, std::make_pair(std::move(units),
                                              local.unknown_chars)).first;
    }
    if (stats) stats->unknown_chars += it->second.second;
    out.insert(out.end(), it->second.first.begin(), it->second.first.end());
  }
  return out;
}

std::vector<std::string> desegment(const std::vector<std::string>& units) {
  std::vector<std::string> tokens;
  std::string acc;
  bool open = false;
  const std::size_t marker_len = std::strlen(kEndOfToken);
  for (const auto& unit : units) {
    open = true;
    acc += unit;
    if (unit.size() >= marker_len &&
        unit.compare(unit.size() - marker_len, marker_len, kEndOfToken) == 0) {
      acc.resize(acc.size() - marker_len);
      tokens.push_back(std::move(acc));
      acc.clear();
      open = false;
    }
  }
  if (open) {
    throw Error("incomplete-token", "trailing units without end-of-token");
  }
  return tokens;
}

UnitVocab unit_vocab(const BpeModel& model) {
  UnitVocab vocab;
  auto add = [&vocab](const std::string& unit) {
    if (vocab.ids.emplace(unit, vocab.size()).second) {
      vocab.units.push_back(unit);
    }
  };
  add(kUnkChar);
  vocab.unk_id = 0;
  std::vector<std::string> init(model.initial_symbols.begin(),
                                model.initial_symbols.end());
  std::sort(init.begin(), init.end(), bpe_symbol_less);
  for (const auto& s : init) add(s);
  for (const auto& [left, right] : model.merges) add(left + right);
  return vocab;
}

std::string vocab_sha256(const UnitVocab& vocab) {
  std::string joined;
  for (const auto& u : vocab.units) {
    joined += u;
    joined.push_back('\n');
  }
  return sha256_hex(joined);
}

std::string to_bpe_file(const BpeModel& model) {
  std::string out = "#bpe v1 merges=" + std::to_string(model.num_merges()) +
                    "\n#symbols";
  std::vector<std::string> init(model.initial_symbols.begin(),
                                model.initial_symbols.end());
  std::sort(init.begin(), init.end(), bpe_symbol_less);
  for (const auto& s : init) {
    out.push_back(' ');
    out += escape_sym(s);
  }
  out.push_back('\n');
  for (const auto& [left, right] : model.merges) {
    out += escape_sym(left);
    out.push_back(' ');
    out += escape_sym(right);
    out.push_back('\n');
  }
  return out;
}

BpeModel from_bpe_file(const std::string& content) {
  auto lines = split_lines(content);
  if (lines.empty()) throw Error("corrupt", "empty merge file");
  const std::string& header = lines[0];
  if (header.rfind("#bpe ", 0) != 0) {
    throw Error("corrupt", "missing merge-file header");
  }
  if (header.rfind("#bpe v1 ", 0) != 0) {
    throw Error("bad-version", "unsupported merge-file version");
  }
  std::size_t eq = header.find("merges=");
  if (eq == std::string::npos) throw Error("corrupt", "header lacks merges=");
  long declared = std::stol(header.substr(eq + 7));

  BpeModel model;
  bool have_symbols = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("#symbols", 0) == 0) {
        have_symbols = true;
        std::size_t pos = std::strlen("#symbols");
        while (pos < line.size()) {
          while (pos < line.size() && line[pos] == ' ') ++pos;
          std::size_t start = pos;
          while (pos < line.size() && line[pos] != ' ') ++pos;
          if (pos > start) {
            model.initial_symbols.insert(
                unescape_sym(line.substr(start, pos - start)));
          }
        }
      }
      continue;
    }
    std::size_t sp = line.find(' ');
    if (sp == std::string::npos || sp == 0 || sp + 1 == line.size()) {
      throw Error("corrupt", "bad merge line: " + line);
    }
    model.merges.emplace_back(unescape_sym(line.substr(0, sp)),
                              unescape_sym(line.substr(sp + 1)));
  }
  if (static_cast<long>(model.merges.size()) != declared) {
    throw Error("corrupt", "merge count does not match header");
  }
  if (!have_symbols) {
    // Foreign file: recover the alphabet from the merges themselves.
    const std::size_t marker_len = std::strlen(kEndOfToken);
    auto add_chars = [&model, marker_len](std::string sym) {
      if (sym.size() >= marker_len &&
          sym.compare(sym.size() - marker_len, marker_len, kEndOfToken) == 0) {
        sym.resize(sym.size() - marker_len);
      }
      for (auto& ch : split_utf8_chars(sym)) {
        model.initial_symbols.insert(std::move(ch));
      }
    };
    for (const auto& [left, right] : model.merges) {
      add_chars(left);
      add_chars(right);
    }
  }
  model.initial_symbols.insert(kEndOfToken);
  return model;
}

void write_bpe(const std::string& path, const BpeModel& model) {
  write_file(path, to_bpe_file(model));
}

BpeModel read_bpe(const std::string& path) {
  return from_bpe_file(read_file(path));
}

}  // namespace ovlm
