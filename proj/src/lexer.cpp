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

#include "ovlm/lexer.hpp"

#include <algorithm>
#include <array>
#include <cstring>

#include "ovlm/error.hpp"
#include "ovlm/textio.hpp"

namespace ovlm {

namespace {

bool is_space_char(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_ident_start(char c, bool allow_dollar) {
  return is_alpha(c) || c == '_' || (allow_dollar && c == '$') ||
         static_cast<unsigned char>(c) >= 0x80;
}

bool is_ident_part(char c, bool allow_dollar) {
  return is_ident_start(c, allow_dollar) || is_digit(c);
}

LanguageProfile make_java_profile() {
  LanguageProfile p;
  p.language = Language::JavaLike;
  p.keywords = {
      "abstract", "assert", "boolean", "break", "byte", "case", "catch",
      "char", "class", "const", "continue", "default", "do", "double",
      "else", "enum", "extends", "final", "finally", "float", "for", "goto",
      "if", "implements", "import", "instanceof", "int", "interface", "long",
      "native", "new", "package", "private", "protected", "public", "record",
      "return", "short", "static", "strictfp", "super", "switch",
      "synchronized", "this", "throw", "throws", "transient", "try", "var",
      "void", "volatile", "while", "yield", "true", "false", "null"};
  p.comment_delimiters = {{"//", ""}, {"/*", "*/"}};
  p.string_delimiters = "\"'";
  p.operators = {"<<=", ">>=", ">>>", "...", "==", "!=", "<=", ">=", "&&",
                 "||", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=",
                 "^=", "<<", ">>", "->", "::", "+", "-", "*", "/", "%", "=",
                 "<", ">", "!", "&", "|", "^", "~", "?", ":", "."};
  return p;
}

LanguageProfile make_c_profile() {
  LanguageProfile p;
  p.language = Language::CLike;
  p.keywords = {
      "auto", "bool", "break", "case", "char", "const", "continue",
      "default", "do", "double", "else", "enum", "extern", "false", "float",
      "for", "goto", "if", "inline", "int", "long", "register", "restrict",
      "return", "short", "signed", "sizeof", "static", "struct", "switch",
      "true", "typedef", "union", "unsigned", "void", "volatile", "while"};
  p.comment_delimiters = {{"//", ""}, {"/*", "*/"}};
  p.string_delimiters = "\"'";
  p.operators = {"<<=", ">>=", "==", "!=", "<=", ">=", "&&", "||", "++",
                 "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<",
                 ">>", "->", "+", "-", "*", "/", "%", "=", "<", ">", "!",
                 "&", "|", "^", "~", "?", ":", ".", "#"};
  return p;
}

LanguageProfile make_python_profile() {
  LanguageProfile p;
  p.language = Language::PythonLike;
  p.keywords = {
      "False", "None", "True", "and", "as", "assert", "async", "await",
      "break", "class", "continue", "def", "del", "elif", "else", "except",
      "finally", "for", "from", "global", "if", "import", "in", "is",
      "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try",
      "while", "with", "yield"};
  p.comment_delimiters = {{"#", ""}};
  p.string_delimiters = "\"'";
  p.operators = {"**=", "//=", ">>=", "<<=", "->", ":=", "==", "!=", "<=",
                 ">=", "**", "//", "<<", ">>", "+=", "-=", "*=", "/=", "%=",
                 "&=", "|=", "^=", "+", "-", "*", "/", "%", "=", "<", ">",
                 "&", "|", "^", "~", ":", "."};
  return p;
}

// Sorted longest-first so prefix matching is maximal munch.
LanguageProfile finalize(LanguageProfile p) {
  std::sort(p.operators.begin(), p.operators.end(),
            [](const std::string& a, const std::string& b) {
              if (a.size() != b.size()) return a.size() > b.size();
              return a < b;
            });
  std::sort(p.comment_delimiters.begin(), p.comment_delimiters.end(),
            [](const auto& a, const auto& b) {
              return a.first.size() > b.first.size();
            });
  return p;
}

bool starts_with_at(const std::string& s, std::size_t pos,
                    const std::string& prefix) {
  return s.compare(pos, prefix.size(), prefix) == 0;
}

}  // namespace

const char* to_string(TokenCategory cat) {
  switch (cat) {
    case TokenCategory::Identifier: return "Identifier";
    case TokenCategory::Keyword: return "Keyword";
    case TokenCategory::NumberLiteral: return "NumberLiteral";
    case TokenCategory::StringLiteral: return "StringLiteral";
    case TokenCategory::Comment: return "Comment";
    case TokenCategory::Operator: return "Operator";
    case TokenCategory::Punctuation: return "Punctuation";
    case TokenCategory::Whitespace: return "Whitespace";
    case TokenCategory::Other: return "Other";
  }
  return "Other";
}

TokenCategory category_from_string(const std::string& name) {
  static const std::array<TokenCategory, 9> cats = {
      TokenCategory::Identifier,   TokenCategory::Keyword,
      TokenCategory::NumberLiteral, TokenCategory::StringLiteral,
      TokenCategory::Comment,      TokenCategory::Operator,
      TokenCategory::Punctuation,  TokenCategory::Whitespace,
      TokenCategory::Other};
  for (TokenCategory c : cats) {
    if (name == to_string(c)) return c;
  }
  throw Error("corrupt", "unknown token category: " + name);
}

const char* to_string(Language lang) {
  switch (lang) {
    case Language::JavaLike: return "javalike";
    case Language::CLike: return "clike";
    case Language::PythonLike: return "pythonlike";
  }
  return "javalike";
}

Language language_from_string(const std::string& name) {
  if (name == "javalike" || name == "java") return Language::JavaLike;
  if (name == "clike" || name == "c") return Language::CLike;
  if (name == "pythonlike" || name == "python") return Language::PythonLike;
  throw Error("corrupt", "unknown language: " + name);
}

const LanguageProfile& profile_for(Language lang) {
  static const LanguageProfile java = finalize(make_java_profile());
  static const LanguageProfile c = finalize(make_c_profile());
  static const LanguageProfile python = finalize(make_python_profile());
  switch (lang) {
    case Language::JavaLike: return java;
    case Language::CLike: return c;
    case Language::PythonLike: return python;
  }
  return java;
}

bool valid_utf8(const std::string& text) {
  const unsigned char* s = reinterpret_cast<const unsigned char*>(text.data());
  std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    unsigned char c = s[i];
    if (c < 0x80) {
      ++i;
      continue;
    }
    int len;
    unsigned int min_cp;
    unsigned int cp;
    if ((c & 0xE0) == 0xC0) {
      len = 2;
      min_cp = 0x80;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      min_cp = 0x800;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      min_cp = 0x10000;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + static_cast<std::size_t>(len) > n) return false;
    for (int k = 1; k < len; ++k) {
      if ((s[i + k] & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (s[i + k] & 0x3F);
    }
    if (cp < min_cp || cp > 0x10FFFF) return false;
    if (cp >= 0xD800 && cp <= 0xDFFF) return false;  // surrogate range
    i += len;
  }
  return true;
}

TokenStream lex(const std::string& source_text,
                const LanguageProfile& profile) {
  if (!valid_utf8(source_text)) {
    throw Error("encoding", "source is not valid UTF-8");
  }
  const bool dollar = profile.language == Language::JavaLike;
  TokenStream stream;
  stream.language = profile.language;

  std::size_t i = 0;
  int line = 1;
  int col = 0;
  const std::size_t n = source_text.size();

  auto emit = [&](std::size_t end, TokenCategory cat) {
    Token t;
    t.text = source_text.substr(i, end - i);
    t.category = cat;
    t.line = line;
    t.col = col;
    for (char c : t.text) {
      if (c == '\n') {
        ++line;
        col = 0;
      } else {
        ++col;
      }
    }
    stream.tokens.push_back(std::move(t));
    i = end;
  };

  while (i < n) {
    char c = source_text[i];

    if (is_space_char(c)) {
      std::size_t j = i;
      while (j < n && is_space_char(source_text[j])) ++j;
      emit(j, TokenCategory::Whitespace);
      continue;
    }

    // Comments win over operators ("//" before "/").
    bool matched = false;
    for (const auto& [open, close] : profile.comment_delimiters) {
      if (!starts_with_at(source_text, i, open)) continue;
      std::size_t j = i + open.size();
      if (close.empty()) {
        while (j < n && source_text[j] != '\n') ++j;
      } else {
        std::size_t pos = source_text.find(close, j);
        j = pos == std::string::npos ? n : pos + close.size();
      }
      emit(j, TokenCategory::Comment);
      matched = true;
      break;
    }
    if (matched) continue;

    if (profile.string_delimiters.find(c) != std::string::npos) {
      std::size_t j = i + 1;
      while (j < n) {
        if (source_text[j] == '\\' && j + 1 < n) {
          j += 2;
          continue;
        }
        if (source_text[j] == c) {
          ++j;
          break;
        }
        ++j;
      }
      emit(j, TokenCategory::StringLiteral);
      continue;
    }

    if (is_digit(c)) {
      std::size_t j = i + 1;
      while (j < n) {
        char d = source_text[j];
        if (is_digit(d) || is_alpha(d) || d == '_') {
          ++j;
        } else if (d == '.' && j + 1 < n && is_digit(source_text[j + 1])) {
          ++j;
        } else if ((d == '+' || d == '-') &&
                   (source_text[j - 1] == 'e' || source_text[j - 1] == 'E') &&
                   j + 1 < n && is_digit(source_text[j + 1])) {
          ++j;
        } else {
          break;
        }
      }
      emit(j, TokenCategory::NumberLiteral);
      continue;
    }

    if (is_ident_start(c, dollar)) {
      std::size_t j = i + 1;
      while (j < n && is_ident_part(source_text[j], dollar)) ++j;
      std::string word = source_text.substr(i, j - i);
      emit(j, profile.keywords.count(word) ? TokenCategory::Keyword
                                           : TokenCategory::Identifier);
      continue;
    }

    for (const auto& op : profile.operators) {
      if (starts_with_at(source_text, i, op)) {
        emit(i + op.size(), TokenCategory::Operator);
        matched = true;
        break;
      }
    }
    if (matched) continue;

    if (std::strchr("()[]{},;@", c) != nullptr) {
      emit(i + 1, TokenCategory::Punctuation);
    } else {
      emit(i + 1, TokenCategory::Other);
    }
  }
  return stream;
}

std::string to_toks(const TokenStream& stream) {
  std::string out;
  for (const auto& t : stream.tokens) {
    out += to_string(t.category);
    out.push_back('\t');
    out += escape_field(t.text);
    out.push_back('\n');
  }
  return out;
}

TokenStream from_toks(const std::string& content) {
  TokenStream stream;
  int line = 1;
  int col = 0;
  for (const auto& raw : split_lines(content)) {
    if (raw.empty()) continue;
    std::size_t tab = raw.find('\t');
    if (tab == std::string::npos) {
      throw Error("corrupt", "token line without separator");
    }
    Token t;
    t.category = category_from_string(raw.substr(0, tab));
    t.text = unescape_field(raw.substr(tab + 1));
    t.line = line;
    t.col = col;
    for (char c : t.text) {
      if (c == '\n') {
        ++line;
        col = 0;
      } else {
        ++col;
      }
    }
    stream.tokens.push_back(std::move(t));
  }
  return stream;
}

void write_toks(const std::string& path, const TokenStream& stream) {
  write_file(path, to_toks(stream));
}

TokenStream read_toks(const std::string& path) {
  TokenStream stream = from_toks(read_file(path));
  stream.source_path = path;
  return stream;
}

}  // namespace ovlm
