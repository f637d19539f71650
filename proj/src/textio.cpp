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

#include "ovlm/textio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ovlm/error.hpp"

namespace ovlm {

namespace {

std::string escape_impl(const std::string& text, bool spaces) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case ' ':
        if (spaces) {
          out += "\\s";
        } else {
          out.push_back(c);
        }
        break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape_impl(const std::string& text, bool spaces) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '\\' || i + 1 == text.size()) {
      out.push_back(text[i]);
      continue;
    }
    char next = text[++i];
    switch (next) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case '\\': out.push_back('\\'); break;
      case 's':
        if (spaces) {
          out.push_back(' ');
        } else {
          out.push_back('\\');
          out.push_back('s');
        }
        break;
      default:
        out.push_back('\\');
        out.push_back(next);
    }
  }
  return out;
}

}  // namespace

std::string escape_field(const std::string& text) {
  return escape_impl(text, false);
}

std::string unescape_field(const std::string& text) {
  return unescape_impl(text, false);
}

std::string escape_sym(const std::string& text) {
  return escape_impl(text, true);
}

std::string unescape_sym(const std::string& text) {
  return unescape_impl(text, true);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing-path", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("io", "short write to " + path);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      if (i == text.size() && start == i) break;
      std::string line = text.substr(start, i - start);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(std::move(line));
      start = i + 1;
    }
  }
  return lines;
}

void write_token_lines(const std::string& path,
                       const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    out += escape_field(t);
    out.push_back('\n');
  }
  write_file(path, out);
}

std::vector<std::string> read_token_lines(const std::string& path) {
  std::vector<std::string> tokens;
  for (const auto& line : split_lines(read_file(path))) {
    tokens.push_back(unescape_field(line));
  }
  return tokens;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace ovlm
