// Copyright 2026 The lrnmt Authors.
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

#include "lrnmt/textproc.hpp"

#include <string>
#include <vector>

#include "doctest.h"
#include "lrnmt/error.hpp"
#include "lrnmt/rng.hpp"
#include "lrnmt/utf8.hpp"

using namespace lrnmt;

TEST_SUITE_BEGIN("textproc");

TEST_CASE("entity decode handles both entity spellings") {
  CHECK(normalize_entities("A &amp B", EntityDirection::decode) == "A & B");
  CHECK(normalize_entities("A &amp; B", EntityDirection::decode) == "A & B");
  CHECK(normalize_entities("no entities here", EntityDirection::decode) ==
        "no entities here");
}

TEST_CASE("entity encode produces submission form") {
  CHECK(normalize_entities("A & B", EntityDirection::encode) == "A &amp; B");
  CHECK(normalize_entities("&&", EntityDirection::encode) == "&amp;&amp;");
}

TEST_CASE("entity round trip on well-formed text") {
  const std::string original = "x &amp; y &amp; z";
  const std::string decoded =
      normalize_entities(original, EntityDirection::decode);
  CHECK(normalize_entities(decoded, EntityDirection::encode) == original);
}

TEST_CASE("entity decode is idempotent on entity-free text") {
  const std::string decoded =
      normalize_entities("a & b &am c", EntityDirection::decode);
  CHECK(normalize_entities(decoded, EntityDirection::decode) == decoded);
}

TEST_CASE("to_halfwidth folds the full-width block") {
  CHECK(to_halfwidth("ＡＢＣ１２３") == "ABC123");
  CHECK(to_halfwidth("（x）") == "(x)");
  CHECK(to_halfwidth("中文") == "中文");
  CHECK(to_halfwidth("　") == " ");
}

TEST_CASE("to_halfwidth is idempotent") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::string s;
    for (int i = 0; i < 30; ++i) {
      // Mix of ASCII, full-width forms and CJK.
      const int pick = static_cast<int>(rng.next_below(3));
      char32_t cp;
      if (pick == 0) {
        cp = 0x21 + static_cast<char32_t>(rng.next_below(0x5E - 0x21));
      } else if (pick == 1) {
        cp = 0xFF01 + static_cast<char32_t>(rng.next_below(0x5E));
      } else {
        cp = 0x4E00 + static_cast<char32_t>(rng.next_below(1000));
      }
      utf8::append_codepoint(s, cp);
    }
    const std::string once = to_halfwidth(s);
    CHECK(to_halfwidth(once) == once);
  }
}

TEST_CASE("traditional to simplified via table") {
  SimplificationTable table{{U'漢', U'汉'}, {U'語', U'语'}};
  CHECK(traditional_to_simplified("漢語", table) == "汉语");
  CHECK(traditional_to_simplified("汉语", table) == "汉语");
  CHECK(traditional_to_simplified("", table) == "");
  // Per-codepoint: length in characters preserved.
  CHECK(utf8::length(traditional_to_simplified("漢語的句子", table)) ==
        utf8::length("漢語的句子"));
}

TEST_CASE("shipped simplification table covers the common mappings") {
  const auto table = load_simplification_table(LRNMT_DATA_DIR "/zh_t2s.tsv");
  CHECK(traditional_to_simplified("漢語", table) == "汉语");
  CHECK(traditional_to_simplified("學習機器翻譯", table) == "学习机器翻译");
}

TEST_CASE("missing table file") {
  CHECK_THROWS_AS(load_simplification_table("/nonexistent/t2s.tsv"), Error);
}

TEST_CASE("word tokenization splits on whitespace, case preserved") {
  CHECK(tokenize("saya makan nasi", TokenizerMode::word) ==
        std::vector<std::string>{"saya", "makan", "nasi"});
  CHECK(tokenize("Ab aB", TokenizerMode::word) ==
        std::vector<std::string>{"Ab", "aB"});
  CHECK(tokenize("  a\t b\n", TokenizerMode::word) ==
        std::vector<std::string>{"a", "b"});
}

TEST_CASE("char tokenization yields one token per scalar") {
  CHECK(tokenize("我吃饭", TokenizerMode::charwise) ==
        std::vector<std::string>{"我", "吃", "饭"});
  CHECK(tokenize("我 吃", TokenizerMode::charwise) ==
        std::vector<std::string>{"我", "吃"});
}

TEST_CASE("char token count equals non-whitespace scalar count") {
  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    std::string s;
    size_t expected = 0;
    for (int i = 0; i < 25; ++i) {
      if (rng.next_double() < 0.2) {
        s.push_back(' ');
      } else {
        utf8::append_codepoint(
            s, 0x4E00 + static_cast<char32_t>(rng.next_below(500)));
        ++expected;
      }
    }
    CHECK(tokenize(s, TokenizerMode::charwise).size() == expected);
  }
}

TEST_CASE("build_vocab orders by frequency then lexicographic") {
  const std::vector<std::vector<std::string>> corpus{{"a", "b", "a"}};
  const Vocabulary v1 = build_vocab(corpus, 1, 100);
  REQUIRE(v1.size() == Vocabulary::num_specials + 2);
  CHECK(v1.token(4) == "a");
  CHECK(v1.token(5) == "b");

  const Vocabulary v2 = build_vocab(corpus, 2, 100);
  CHECK(v2.size() == Vocabulary::num_specials + 1);
  CHECK(v2.token(4) == "a");

  // Equal frequency: lexicographic.
  const Vocabulary v3 = build_vocab({{"b", "a"}}, 1, 100);
  CHECK(v3.token(4) == "a");
  CHECK(v3.token(5) == "b");
}

TEST_CASE("build_vocab is deterministic and respects max_size") {
  std::vector<std::vector<std::string>> corpus;
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    std::vector<std::string> sent;
    for (int j = 0; j < 8; ++j) {
      sent.push_back("w" + std::to_string(rng.next_below(40)));
    }
    corpus.push_back(sent);
  }
  const Vocabulary a = build_vocab(corpus, 1, 20);
  const Vocabulary b = build_vocab(corpus, 1, 20);
  CHECK(a.size() == 20);
  CHECK(a.tokens() == b.tokens());
  CHECK(a.content_hash() == b.content_hash());
}

TEST_CASE("build_vocab rejects an empty corpus") {
  CHECK_THROWS_AS(build_vocab({{"rare"}}, 2, 100), Error);
}

TEST_CASE("extra tokens sit right after the specials") {
  const Vocabulary v = build_vocab({{"a", "a", "b"}}, 1, 100, {"<sep>"});
  CHECK(v.token(4) == "<sep>");
  CHECK(v.token(5) == "a");
}

TEST_CASE("encode and decode") {
  const Vocabulary v = build_vocab({{"a", "b"}}, 1, 100);
  CHECK(encode({"a"}, v, true) ==
        TokenIds{Vocabulary::bos_id, v.id("a"), Vocabulary::eos_id});
  CHECK(encode({"zzz-not-in-vocab"}, v, false) ==
        TokenIds{Vocabulary::unk_id});

  const std::vector<std::string> sent{"a", "b", "a"};
  CHECK(decode(encode(sent, v, true), v) == sent);

  CHECK_THROWS_AS(decode({v.size()}, v), Error);
}

TEST_CASE("round trip holds for any in-vocab sentence") {
  const Vocabulary v = build_vocab({{"x", "y", "z", "w"}}, 1, 100);
  Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::string> sent;
    const int len = 1 + static_cast<int>(rng.next_below(10));
    for (int i = 0; i < len; ++i) {
      sent.push_back(v.token(Vocabulary::num_specials +
                             static_cast<int>(rng.next_below(4))));
    }
    CHECK(decode(encode(sent, v, true), v) == sent);
    CHECK(decode(encode(sent, v, false), v) == sent);
  }
}

TEST_CASE("scoring preparation: zh gets half-width then chars") {
  const Sentence s{"Ａ中 &amp 文", Lang::zh};
  CHECK(prepare_for_scoring(s, TokenizerMode::charwise) ==
        std::vector<std::string>{"A", "中", "&", "文"});
}

TEST_SUITE_END();
