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

#ifndef OVLM_MANIFEST_HPP_
#define OVLM_MANIFEST_HPP_

#include <string>
#include <vector>

#include "ovlm/lexer.hpp"

namespace ovlm {

// A corpus split: project directories, each a list of source files.
struct Project {
  std::string name;  // directory path as written in the manifest
  std::vector<std::string> files;  // resolved absolute or cwd-relative paths
};
using Split = std::vector<Project>;

// Corpus manifest: named splits of project directories plus the language.
//
// File format, line oriented:
//   language=<java|c|python>        (optional, default java)
//   [train] / [small_train] / [bpe] / [valid] / [test]   (section headers)
//   <path>                          (one project directory per line)
// Blank lines and lines starting with '#' are ignored. Paths are resolved
// relative to the manifest's directory. small_train may repeat train
// projects (it is a subsample); every other pair of splits must be disjoint.
struct Manifest {
  Language language = Language::JavaLike;
  Split train;
  Split small_train;
  Split bpe;
  Split valid;
  Split test;
};

// Parses and validates a manifest. Throws Error("missing-path") when the
// manifest or a project directory does not exist, Error("contaminated-split")
// when splits that must be disjoint share a project, and Error("corrupt") for
// unparseable lines. Empty splits load fine; operations that consume a split
// raise Error("empty-split") themselves.
Manifest load_manifest(const std::string& path);

// Source files directly inside dir (non-recursive), name-sorted. Throws
// Error("missing-path") when dir does not exist.
std::vector<std::string> list_source_files(const std::string& dir);

}  // namespace ovlm

#endif  // OVLM_MANIFEST_HPP_
