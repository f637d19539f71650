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

#include "ovlm/manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>

#include "ovlm/error.hpp"
#include "ovlm/textio.hpp"

namespace fs = std::filesystem;

namespace ovlm {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

void check_disjoint(const Split& a, const Split& b, const char* pair) {
  std::set<std::string> names;
  for (const auto& p : a) names.insert(p.name);
  for (const auto& p : b) {
    if (names.count(p.name))
      throw Error("contaminated-split",
                  std::string(pair) + " share project " + p.name);
  }
}

}  // namespace

std::vector<std::string> list_source_files(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw Error("missing-path", "not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file()) files.push_back(entry.path().string());
  }
  if (ec) throw Error("missing-path", "cannot list " + dir);
  std::sort(files.begin(), files.end());
  return files;
}

Manifest load_manifest(const std::string& path) {
  const std::string text = read_file(path);
  const fs::path base = fs::path(path).parent_path();

  Manifest m;
  Split* section = nullptr;
  std::set<std::string> within;  // names already seen in current section
  int lineno = 0;
  for (const std::string& raw : split_lines(text)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;

    if (line.front() == '[' && line.back() == ']') {
      const std::string name = line.substr(1, line.size() - 2);
      if (name == "train")
        section = &m.train;
      else if (name == "small_train")
        section = &m.small_train;
      else if (name == "bpe")
        section = &m.bpe;
      else if (name == "valid")
        section = &m.valid;
      else if (name == "test")
        section = &m.test;
      else
        throw Error("corrupt", "unknown section [" + name + "] at line " +
                                   std::to_string(lineno));
      within.clear();
      continue;
    }

    if (line.rfind("language=", 0) == 0) {
      if (section != nullptr)
        throw Error("corrupt", "language= must precede sections");
      m.language = language_from_string(line.substr(9));
      continue;
    }

    if (section == nullptr)
      throw Error("corrupt", "project path before any section at line " +
                                 std::to_string(lineno));
    if (!within.insert(line).second)
      throw Error("corrupt", "duplicate project " + line + " in section");
    Project p;
    p.name = line;
    p.files = list_source_files((base / line).string());
    section->push_back(std::move(p));
  }

  // Splits are pairwise disjoint except small_train, which subsamples train.
  // Emptiness is checked by the operations that consume a split.
  check_disjoint(m.train, m.valid, "train/valid");
  check_disjoint(m.train, m.test, "train/test");
  check_disjoint(m.small_train, m.valid, "small_train/valid");
  check_disjoint(m.small_train, m.test, "small_train/test");
  check_disjoint(m.bpe, m.train, "bpe/train");
  check_disjoint(m.bpe, m.small_train, "bpe/small_train");
  check_disjoint(m.bpe, m.valid, "bpe/valid");
  check_disjoint(m.bpe, m.test, "bpe/test");
  check_disjoint(m.valid, m.test, "valid/test");
  return m;
}

}  // namespace ovlm
