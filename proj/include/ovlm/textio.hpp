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

#ifndef OVLM_TEXTIO_HPP_
#define OVLM_TEXTIO_HPP_

#include <string>
#include <vector>

namespace ovlm {

// Escaping used by line-oriented token files: "\n" -> "\\n", "\t" -> "\\t",
// "\\" -> "\\\\". Keeps arbitrary token text on one line, one column.
std::string escape_field(const std::string& text);
std::string unescape_field(const std::string& text);

// Variant for space-separated columns (.bpe merge lines): additionally
// escapes ' ' as "\\s".
std::string escape_sym(const std::string& text);
std::string unescape_sym(const std::string& text);

// Whole-file helpers. read_file throws Error("missing-path") when the file
// cannot be opened; write_file throws Error("io") on failure.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Splits on '\n'; a trailing newline does not produce an empty last line.
std::vector<std::string> split_lines(const std::string& text);

// One escaped token per line (prep/unit list files).
void write_token_lines(const std::string& path,
                       const std::vector<std::string>& tokens);
std::vector<std::string> read_token_lines(const std::string& path);

// Fixed-point decimal with enough digits to round-trip metric values.
std::string format_double(double v);

}  // namespace ovlm

#endif  // OVLM_TEXTIO_HPP_
