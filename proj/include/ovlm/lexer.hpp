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

#ifndef OVLM_LEXER_HPP_
#define OVLM_LEXER_HPP_

#include <string>
#include <unordered_set>
#include <vector>

namespace ovlm {

enum class TokenCategory {
  Identifier,
  Keyword,
  NumberLiteral,
  StringLiteral,
  Comment,
  Operator,
  Punctuation,
  Whitespace,
  Other,
};

const char* to_string(TokenCategory cat);
TokenCategory category_from_string(const std::string& name);

struct Token {
  std::string text;
  TokenCategory category = TokenCategory::Other;
  int line = 1;  // 1-based
  int col = 0;   // 0-based byte column
};

enum class Language { JavaLike, CLike, PythonLike };

const char* to_string(Language lang);
Language language_from_string(const std::string& name);

// Lexing rules for one language family. Simplified grammars: good enough for
// vocabulary work, not a compiler front end.
struct LanguageProfile {
  Language language = Language::JavaLike;
  std::unordered_set<std::string> keywords;  // includes primitive type names
  // (open, close) delimiter pairs; close == "" means "to end of line".
  std::vector<std::pair<std::string, std::string>> comment_delimiters;
  std::string string_delimiters;  // each char opens/closes a string
  std::vector<std::string> operators;  // multi-char first, maximal munch
};

const LanguageProfile& profile_for(Language lang);

// Concatenating tokens[i].text in order reproduces the input byte for byte.
struct TokenStream {
  std::vector<Token> tokens;
  Language language = Language::JavaLike;
  std::string source_path;
};

// Splits source text into a lossless token stream. Unterminated strings or
// block comments run to end of input as one token of the started category.
// Throws Error("encoding") if source_text is not valid UTF-8.
TokenStream lex(const std::string& source_text, const LanguageProfile& profile);

// ".toks" files: one token per line, "<category>\t<escaped text>".
std::string to_toks(const TokenStream& stream);
TokenStream from_toks(const std::string& content);
void write_toks(const std::string& path, const TokenStream& stream);
TokenStream read_toks(const std::string& path);

// True if every byte sequence is well-formed UTF-8.
bool valid_utf8(const std::string& text);

}  // namespace ovlm

#endif  // OVLM_LEXER_HPP_
