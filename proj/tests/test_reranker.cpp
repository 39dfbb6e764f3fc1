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

#include "lrnmt/reranker.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "lrnmt/error.hpp"
#include "lrnmt/rng.hpp"

using namespace lrnmt;

namespace {

std::vector<double> random_vec(Rng& rng, int d) {
  std::vector<double> v(d);
  for (auto& x : v) x = rng.next_range(-1.0, 1.0);
  return v;
}

ContrastiveBatch random_batch(Rng& rng, int d, int negatives, double tau) {
  ContrastiveBatch b;
  b.h_x = random_vec(rng, d);
  b.h_pos = random_vec(rng, d);
  for (int i = 0; i < negatives; ++i) b.h_negs.push_back(random_vec(rng, d));
  b.tau = tau;
  return b;
}

RerankConfig tiny_rerank_cfg() {
  RerankConfig cfg;
  cfg.d_model = 16;
  cfg.heads = 2;
  cfg.d_ff = 32;
  cfg.layers = 1;
  cfg.max_len = 16;
  cfg.d_proj = 8;
  return cfg;
}

Vocabulary vocab_of(std::initializer_list<const char*> tokens) {
  std::vector<std::string> v;
  for (auto* t : tokens) v.emplace_back(t);
  return Vocabulary::from_tokens(v);
}

}  // namespace

TEST_SUITE_BEGIN("reranker");

TEST_CASE("equal similarities give exactly ln(n+1)") {
  // h_pos and all negatives identical: every similarity equals the same
  // value, so the loss is the symmetric baseline.
  ContrastiveBatch b;
  b.h_x = {1.0, 2.0, -0.5};
  b.h_pos = {0.4, -0.2, 0.9};
  for (int i = 0; i < 4; ++i) b.h_negs.push_back(b.h_pos);
  b.tau = 0.1;
  CHECK(contrastive_loss(b) ==
        doctest::Approx(std::log(5.0)).epsilon(1e-9));

  b.h_negs.resize(1);
  CHECK(contrastive_loss(b) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("hand-computed value: n=1, sims +1/-1, tau=1") {
  ContrastiveBatch b;
  b.h_x = {1.0, 0.0};
  b.h_pos = {2.0, 0.0};    // cosine +1
  b.h_negs = {{-3.0, 0.0}};  // cosine -1
  b.tau = 1.0;
  // -log(e / (e + e^{-1})) = log(1 + e^{-2})
  CHECK(contrastive_loss(b) ==
        doctest::Approx(std::log(1.0 + std::exp(-2.0))).epsilon(1e-9));
}

TEST_CASE("small tau with a dominant positive drives the loss to zero") {
  ContrastiveBatch b;
  b.h_x = {1.0, 0.0};
  b.h_pos = {1.0, 0.1};
  b.h_negs = {{0.0, 1.0}, {-1.0, 0.3}};
  b.tau = 1e-3;
  CHECK(contrastive_loss(b) < 1e-2);
}

TEST_CASE("loss is strictly decreasing in the positive similarity") {
  // 2-d geometry pins the cosine exactly: h_pos at angle theta from h_x.
  ContrastiveBatch b;
  b.h_x = {1.0, 0.0};
  b.h_negs = {{0.3, 0.8}, {-0.6, 0.2}};
  b.tau = 0.2;
  double prev_loss = -1.0;
  for (double theta = 3.0; theta >= 0.0; theta -= 0.5) {
    b.h_pos = {std::cos(theta), std::sin(theta)};
    const double loss = contrastive_loss(b);
    if (prev_loss >= 0.0) CHECK(loss < prev_loss);  // cosine rose
    prev_loss = loss;
  }
}

TEST_CASE("zero vectors and bad configs are rejected") {
  ContrastiveBatch b;
  b.h_x = {0.0, 0.0};
  b.h_pos = {1.0, 0.0};
  b.h_negs = {{0.5, 0.5}};
  CHECK_THROWS_AS(contrastive_loss(b), Error);
  b.h_x = {1.0, 0.0};
  b.h_negs.clear();
  CHECK_THROWS_AS(contrastive_loss(b), Error);
  b.h_negs = {{0.5, 0.5}};
  b.tau = 0.0;
  CHECK_THROWS_AS(contrastive_loss(b), Error);
}

TEST_CASE("contrastive gradients match finite differences in every role") {
  Rng rng(9);
  const double eps = 1e-6;
  for (int trial = 0; trial < 5; ++trial) {
    ContrastiveBatch b = random_batch(rng, 6, 3, 0.3);
    const auto grads = contrastive_loss_grads(b);
    double worst = 0.0;
    auto probe = [&](std::vector<double>& vec, const std::vector<double>& g) {
      for (size_t i = 0; i < vec.size(); ++i) {
        const double original = vec[i];
        vec[i] = original + eps;
        const double plus = contrastive_loss(b);
        vec[i] = original - eps;
        const double minus = contrastive_loss(b);
        vec[i] = original;
        const double numeric = (plus - minus) / (2 * eps);
        const double denom =
            std::max(1e-8, std::abs(numeric) + std::abs(g[i]));
        worst = std::max(worst, std::abs(numeric - g[i]) / denom);
      }
    };
    probe(b.h_x, grads.d_h_x);
    probe(b.h_pos, grads.d_h_pos);
    for (size_t j = 0; j < b.h_negs.size(); ++j) {
      probe(b.h_negs[j], grads.d_h_negs[j]);
    }
    CHECK(worst < 1e-3);
  }
}

TEST_CASE("encoder embedding is deterministic with the right width") {
  const Vocabulary src_vocab = vocab_of({"aa", "bb", "cc"});
  const Vocabulary tgt_vocab = vocab_of({"xx", "yy"});
  const RerankEncoder enc =
      make_reranker(tiny_rerank_cfg(), src_vocab, tgt_vocab,
                    TokenizerMode::word, TokenizerMode::word, nullptr);

  const Sentence src{"aa bb", Lang::synthetic};
  const Sentence cand{"xx yy", Lang::synthetic};
  const auto a = rerank_embed(enc, src, cand);
  const auto b = rerank_embed(enc, src, cand);
  CHECK(a.size() == 8);
  CHECK(a == b);
  for (double x : a) CHECK(std::isfinite(x));
}

TEST_CASE("embedding vectors stay finite across random inputs") {
  const Vocabulary src_vocab =
      vocab_of({"t0", "t1", "t2", "t3", "t4", "t5", "t6", "t7"});
  const Vocabulary tgt_vocab = vocab_of({"u0", "u1", "u2", "u3"});
  const RerankEncoder enc =
      make_reranker(tiny_rerank_cfg(), src_vocab, tgt_vocab,
                    TokenizerMode::word, TokenizerMode::word, nullptr);
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::string src_text, cand_text;
    for (int i = 0; i < 1 + static_cast<int>(rng.next_below(6)); ++i) {
      src_text += "t" + std::to_string(rng.next_below(8)) + " ";
    }
    for (int i = 0; i < 1 + static_cast<int>(rng.next_below(6)); ++i) {
      cand_text += "u" + std::to_string(rng.next_below(4)) + " ";
    }
    const auto v = rerank_embed(enc, Sentence{src_text, Lang::synthetic},
                                Sentence{cand_text, Lang::synthetic});
    for (double x : v) CHECK(std::isfinite(x));
  }
}

TEST_CASE("joint vocabulary merges both sides, source first") {
  const Vocabulary src_vocab = vocab_of({"shared", "s1"});
  const Vocabulary tgt_vocab = vocab_of({"shared", "t1"});
  const RerankEncoder enc =
      make_reranker(tiny_rerank_cfg(), src_vocab, tgt_vocab,
                    TokenizerMode::word, TokenizerMode::word, nullptr);
  CHECK(enc.joint_vocab.size() == Vocabulary::num_specials + 3);
  CHECK(enc.joint_vocab.contains("shared"));
  CHECK(enc.joint_vocab.contains("s1"));
  CHECK(enc.joint_vocab.contains("t1"));
}

TEST_CASE("translator embeddings seed the joint table") {
  const Vocabulary src_vocab = vocab_of({"aa", "bb"});
  const Vocabulary tgt_vocab = vocab_of({"xx"});
  ModelConfig mc;
  mc.d_model = 16;
  mc.heads = 2;
  mc.d_ff = 32;
  mc.enc_layers = 1;
  mc.dec_layers = 1;
  mc.max_len = 16;
  mc.src_vocab = src_vocab.size();
  mc.tgt_vocab = tgt_vocab.size();
  const Seq2SeqModel translator = make_seq2seq(mc, 77);

  const RerankEncoder enc =
      make_reranker(tiny_rerank_cfg(), src_vocab, tgt_vocab,
                    TokenizerMode::word, TokenizerMode::word, &translator);
  const auto& tok = enc.params.get("tok");
  const auto& src_tok = translator.params.get("src_tok");
  const int d = mc.d_model;
  const int aa_joint = enc.joint_vocab.id("aa");
  const int aa_src = src_vocab.id("aa");
  for (int j = 0; j < d; ++j) {
    CHECK(tok->val[aa_joint * d + j] == src_tok->val[aa_src * d + j]);
  }
  const auto& tgt_tok = translator.params.get("tgt_tok");
  const int xx_joint = enc.joint_vocab.id("xx");
  const int xx_tgt = tgt_vocab.id("xx");
  for (int j = 0; j < d; ++j) {
    CHECK(tok->val[xx_joint * d + j] == tgt_tok->val[xx_tgt * d + j]);
  }
}

TEST_CASE("rerank output is a scored permutation with stable ties") {
  const Vocabulary src_vocab = vocab_of({"aa", "bb"});
  const Vocabulary tgt_vocab = vocab_of({"xx", "yy"});
  const RerankEncoder enc =
      make_reranker(tiny_rerank_cfg(), src_vocab, tgt_vocab,
                    TokenizerMode::word, TokenizerMode::word, nullptr);
  const Sentence src{"aa bb", Lang::synthetic};

  std::vector<Hypothesis> cands;
  cands.push_back(Hypothesis{
      {Vocabulary::bos_id, tgt_vocab.id("xx"), Vocabulary::eos_id}, -1.0, 0,
      std::nullopt});
  cands.push_back(Hypothesis{
      {Vocabulary::bos_id, tgt_vocab.id("yy"), Vocabulary::eos_id}, -2.0, 1,
      std::nullopt});
  cands.push_back(cands[0]);  // exact duplicate: a guaranteed score tie

  const auto ranked = rerank(enc, src, cands);
  REQUIRE(ranked.size() == 3);
  for (const auto& h : ranked) {
    REQUIRE(h.score.has_value());
    CHECK(std::isfinite(*h.score));
  }
  CHECK(*ranked[0].score >= *ranked[1].score);
  CHECK(*ranked[1].score >= *ranked[2].score);
  // The duplicate pair ties; stable sort keeps original relative order.
  for (size_t i = 0; i + 1 < ranked.size(); ++i) {
    if (ranked[i].ids == ranked[i + 1].ids) {
      CHECK(ranked[i].group <= ranked[i + 1].group);
    }
  }

  CHECK_THROWS_AS(rerank(enc, src, {}), Error);
}

TEST_CASE("single candidate comes back unchanged apart from its score") {
  const Vocabulary src_vocab = vocab_of({"aa"});
  const Vocabulary tgt_vocab = vocab_of({"xx"});
  const RerankEncoder enc =
      make_reranker(tiny_rerank_cfg(), src_vocab, tgt_vocab,
                    TokenizerMode::word, TokenizerMode::word, nullptr);
  std::vector<Hypothesis> cands{Hypothesis{
      {Vocabulary::bos_id, tgt_vocab.id("xx"), Vocabulary::eos_id}, -0.3, 2,
      std::nullopt}};
  const auto ranked =
      rerank(enc, Sentence{"aa", Lang::synthetic}, cands);
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0].ids == cands[0].ids);
  CHECK(ranked[0].logprob == cands[0].logprob);
  CHECK(ranked[0].group == 2);
  CHECK(ranked[0].score.has_value());
}

TEST_CASE("reranker checkpoint round trip") {
  const Vocabulary src_vocab = vocab_of({"aa", "bb", "cc"});
  const Vocabulary tgt_vocab = vocab_of({"xx", "yy"});
  const RerankEncoder enc =
      make_reranker(tiny_rerank_cfg(), src_vocab, tgt_vocab,
                    TokenizerMode::word, TokenizerMode::charwise, nullptr);
  const std::string path =
      (std::filesystem::temp_directory_path() / "lrnmt_rr_test.bin").string();
  save_reranker(enc, path);
  const RerankEncoder loaded = load_reranker(path);
  CHECK(loaded.joint_vocab.tokens() == enc.joint_vocab.tokens());
  CHECK(loaded.tgt_vocab.tokens() == enc.tgt_vocab.tokens());
  CHECK(loaded.src_mode == enc.src_mode);
  CHECK(loaded.tgt_mode == enc.tgt_mode);
  CHECK(loaded.params.checksum() == enc.params.checksum());

  const Sentence src{"aa cc", Lang::synthetic};
  const Sentence cand{"xy", Lang::synthetic};
  CHECK(rerank_embed(loaded, src, cand) == rerank_embed(enc, src, cand));
  std::remove(path.c_str());
}

TEST_SUITE_END();
