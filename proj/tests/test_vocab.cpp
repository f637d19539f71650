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

#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "ovlm/error.hpp"
#include "ovlm/lexer.hpp"
#include "ovlm/vocab.hpp"

using namespace ovlm;

namespace {

std::vector<std::string> prep_of(const std::string& src,
                                 const PrepConfig& config,
                                 Language lang = Language::JavaLike) {
  return apply_prep(lex(src, profile_for(lang)), config);
}

using V = std::vector<std::string>;

}  // namespace

TEST_CASE("default prep is the identity on whitespace-free literals") {
  const std::string src = "int x = compute(y) + 2; //done\n\"str\"";
  auto stream = lex(src, profile_for(Language::JavaLike));
  auto prepared = apply_prep(stream, PrepConfig{});
  REQUIRE(prepared.size() == stream.tokens.size());
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    CHECK(prepared[i] == stream.tokens[i].text);
  }
}

TEST_CASE("whitespace tokens drop when not kept") {
  PrepConfig config;
  config.keep_whitespace = false;
  CHECK(prep_of("a  b", config) == V{"a", "b"});
}

TEST_CASE("non english filter replaces tokens with non-ascii bytes") {
  PrepConfig config;
  config.non_english_filter = true;
  config.keep_whitespace = false;
  CHECK(prep_of("caf\xC3\xA9 = value", config) ==
        V{"<non-en>", "=", "value"});
}

TEST_CASE("comment handling modes") {
  PrepConfig config;
  config.keep_whitespace = false;
  const std::string src = "x // two words\n";

  config.comment_handling = CommentHandling::Keep;
  CHECK(prep_of(src, config) == V{"x", "//", "two", "words"});

  config.comment_handling = CommentHandling::Placeholder;
  CHECK(prep_of(src, config) == V{"x", "<comment>"});

  config.comment_handling = CommentHandling::Remove;
  CHECK(prep_of(src, config) == V{"x"});
}

TEST_CASE("string handling modes") {
  PrepConfig config;
  config.keep_whitespace = false;

  config.string_handling = StringHandling::Keep;
  CHECK(prep_of("\"a b\"", config) == V{"\"a", "b\""});

  config.string_handling = StringHandling::Placeholder;
  CHECK(prep_of("\"a b\"", config) == V{"<string>"});

  config.string_handling = StringHandling::KeepTruncated15;
  // 20 characters including quotes: truncated to the empty-string literal.
  CHECK(prep_of("\"123456789012345678\"", config) == V{"\"\""});
  // 14 characters: kept verbatim.
  CHECK(prep_of("\"123456789012\"", config) == V{"\"123456789012\""});
}

TEST_CASE("split_convention matches the documented examples") {
  CHECK(split_convention("Value", true, false) == V{"<Upper>", "value"});
  CHECK(split_convention("VALUE", true, false) == V{"<UPPER>", "value"});
  CHECK(split_convention("snake_case", false, false) ==
        V{"snake", "<_>", "case"});
  CHECK(split_convention("1024", false, true) == V{"1", "0", "2", "4"});
  CHECK(split_convention("HTTPServer", false, false) == V{"HTTP", "Server"});
  CHECK(split_convention("HTTPServer", true, false) ==
        V{"<UPPER>", "http", "<Upper>", "server"});
  CHECK(split_convention("camelCase", false, false) == V{"camel", "Case"});
  CHECK(split_convention("getX", true, false) ==
        V{"get", "<Upper>", "x"});
  CHECK(split_convention("__init__", false, false) ==
        V{"<_>", "<_>", "init", "<_>", "<_>"});
  CHECK(split_convention("plain", true, true) == V{"plain"});
}

TEST_CASE("desplit inverts the documented examples") {
  CHECK(desplit(V{"<Upper>", "value"}) == "Value");
  CHECK(desplit(V{"<UPPER>", "value"}) == "VALUE");
  CHECK(desplit(V{"snake", "<_>", "case"}) == "snake_case");
}

TEST_CASE("desplit rejects malformed marker placement") {
  CHECK_THROWS_WITH_AS(desplit(V{"<Upper>"}), doctest::Contains("malformed"),
                       Error);
  CHECK_THROWS_WITH_AS(desplit(V{"<Upper>", "<UPPER>", "x"}),
                       doctest::Contains("malformed"), Error);
  CHECK_THROWS_WITH_AS(desplit(V{"<Upper>", "<_>", "x"}),
                       doctest::Contains("malformed"), Error);
}

TEST_CASE("split and desplit roundtrip over identifier-shaped tokens") {
  std::mt19937_64 rng(23);
  const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_";
  for (int it = 0; it < 500; ++it) {
    std::string tok;
    int len = 1 + static_cast<int>(rng() % 12);
    for (int j = 0; j < len; ++j) tok += alphabet[rng() % alphabet.size()];
    for (bool markers : {false, true}) {
      for (bool digits : {false, true}) {
        CAPTURE(tok);
        CAPTURE(markers);
        CAPTURE(digits);
        CHECK(desplit(split_convention(tok, markers, digits)) == tok);
      }
    }
  }
}

TEST_CASE("convention splitting applies after placeholders") {
  PrepConfig config;
  config.keep_whitespace = false;
  config.non_english_filter = true;
  config.convention_split = true;
  // The placeholder itself is never split despite its uppercase letters.
  CHECK(prep_of("caf\xC3\xA9 fooBar", config) == V{"<non-en>", "foo", "Bar"});
}

TEST_CASE("digit split without convention split") {
  PrepConfig config;
  config.keep_whitespace = false;
  config.digit_split = true;
  CHECK(prep_of("a12b", config) == V{"a", "1", "2", "b"});
}

TEST_CASE("case markers require convention split") {
  PrepConfig config;
  config.case_markers = true;
  CHECK_THROWS_WITH_AS(config.validate(), doctest::Contains("bad-config"),
                       Error);
  TokenStream empty;
  CHECK_THROWS_AS(apply_prep(empty, config), Error);
}

TEST_CASE("apply_prep_tagged keeps lexical categories") {
  PrepConfig config;
  config.keep_whitespace = false;
  config.convention_split = true;
  auto tagged =
      apply_prep_tagged(lex("int fooBar", profile_for(Language::JavaLike)),
                        config);
  REQUIRE(tagged.size() == 3);
  CHECK(tagged[0].category == TokenCategory::Keyword);
  CHECK(tagged[1].text == "foo");
  CHECK(tagged[1].category == TokenCategory::Identifier);
  CHECK(tagged[2].text == "Bar");
  CHECK(tagged[2].category == TokenCategory::Identifier);
}

TEST_CASE("build_vocabulary counts occurrences") {
  auto v1 = build_vocabulary({{"a", "b", "a"}});
  CHECK(v1.counts.at("a") == 2);
  CHECK(v1.counts.at("b") == 1);
  CHECK(v1.total_tokens == 3);

  auto v2 = build_vocabulary({});
  CHECK(v2.counts.empty());
  CHECK(v2.total_tokens == 0);

  auto v3 = build_vocabulary({{"x"}, {"x", "y"}});
  CHECK(v3.counts.at("x") == 2);
  CHECK(v3.counts.at("y") == 1);
  CHECK(v3.total_tokens == 3);
}

TEST_CASE("vocab_report oov percentages") {
  Vocabulary train = build_vocabulary({{"a", "a", "a", "a", "a", "b"}});

  auto full = vocab_report(train, {"a", "c"}, {});
  CHECK(full.oov_pct.at(0) == doctest::Approx(50.0));

  auto cut1 = vocab_report(train, {"a", "b"}, {1});
  CHECK(cut1.oov_pct.at(1) == doctest::Approx(50.0));
  CHECK(cut1.oov_pct.at(0) == doctest::Approx(0.0));

  Vocabulary tiny = build_vocabulary({{"a", "a", "a", "a", "a"}});
  auto rep = vocab_report(tiny, {"a"}, {});
  CHECK(rep.oov_pct.at(0) == doctest::Approx(0.0));
  CHECK(rep.pct_2_10 == doctest::Approx(100.0));
}

TEST_CASE("vocab_report rejects an empty test corpus") {
  Vocabulary train = build_vocabulary({{"a"}});
  CHECK_THROWS_WITH_AS(vocab_report(train, {}, {}),
                       doctest::Contains("empty-test"), Error);
}

TEST_CASE("frequency buckets cover every band and sum to 100") {
  Vocabulary train;
  auto add = [&](const std::string& t, std::uint64_t c) {
    train.counts[t] = c;
    train.total_tokens += c;
  };
  add("w1500", 1500);
  add("w999", 999);
  add("w101", 101);
  add("w100", 100);
  add("w11", 11);
  add("w10", 10);
  add("w2", 2);
  add("w1", 1);
  auto rep = vocab_report(train, {"w1"}, {});
  CHECK(rep.pct_ge_1000 == doctest::Approx(100.0 / 8));
  CHECK(rep.pct_101_999 == doctest::Approx(200.0 / 8));
  CHECK(rep.pct_11_100 == doctest::Approx(200.0 / 8));
  CHECK(rep.pct_2_10 == doctest::Approx(200.0 / 8));
  CHECK(rep.pct_1 == doctest::Approx(100.0 / 8));
  double sum = rep.pct_ge_1000 + rep.pct_101_999 + rep.pct_11_100 +
               rep.pct_2_10 + rep.pct_1;
  CHECK(sum == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("oov is monotone as the cutoff shrinks") {
  std::mt19937_64 rng(5);
  std::vector<std::vector<std::string>> files(1);
  for (int i = 0; i < 400; ++i) {
    files[0].push_back("w" + std::to_string(rng() % 60));
  }
  Vocabulary train = build_vocabulary(files);
  std::vector<std::string> test;
  for (int i = 0; i < 100; ++i) {
    test.push_back("w" + std::to_string(rng() % 90));
  }
  auto rep = vocab_report(train, test, {40, 20, 10, 5, 1});
  // Map iteration is ascending by cutoff; shrinking cutoffs (reverse order)
  // must never decrease OOV. Key 0 is the full vocabulary.
  double prev = -1.0;
  for (auto it = rep.oov_pct.rbegin(); it != rep.oov_pct.rend(); ++it) {
    if (it->first == 0) continue;
    CHECK(it->second >= prev);
    prev = it->second;
  }
  CHECK(rep.oov_pct.at(0) <= rep.oov_pct.at(40));
}

TEST_CASE("cutoff truncation breaks count ties lexicographically") {
  Vocabulary train = build_vocabulary({{"beta", "alpha"}});
  // Both count 1: rank order is alpha, beta. Cutoff 1 keeps only alpha.
  auto rep = vocab_report(train, {"alpha", "beta"}, {1});
  CHECK(rep.oov_pct.at(1) == doctest::Approx(50.0));
}

TEST_CASE("vocab file is sorted and roundtrips") {
  Vocabulary v = build_vocabulary({{"b", "a", "b", "c\td", "b", "a"}});
  std::string content = to_vocab_file(v);
  CHECK(content.substr(0, 2) == "b\t");
  CHECK(content.find("c\\td\t1") != std::string::npos);
  Vocabulary back = from_vocab_file(content);
  CHECK(back.counts == v.counts);
  CHECK(back.total_tokens == v.total_tokens);
  CHECK_THROWS_WITH_AS(from_vocab_file("token-without-count\n"),
                       doctest::Contains("corrupt"), Error);
}

TEST_CASE("report file lists oov keys largest cutoff first") {
  Vocabulary train = build_vocabulary({{"a", "b", "a"}});
  auto rep = vocab_report(train, {"a", "z"}, {10, 1});
  std::string text = to_report_file(rep);
  CHECK(text.find("vocab_size=2\n") != std::string::npos);
  CHECK(text.find("corpus_tokens=3\n") != std::string::npos);
  CHECK(text.find("oov_full=50\n") != std::string::npos);
  CHECK(text.find("oov_10=") < text.find("oov_1="));
  CHECK(text.find("freq_pct_1=") != std::string::npos);
}
