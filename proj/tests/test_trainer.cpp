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

#include "lrnmt/trainer.hpp"

#include <cmath>

#include "doctest.h"
#include "lrnmt/error.hpp"

using namespace lrnmt;

namespace {

ModelConfig micro_config(int vocab = 10) {
  ModelConfig cfg;
  cfg.d_model = 16;
  cfg.heads = 2;
  cfg.d_ff = 32;
  cfg.enc_layers = 1;
  cfg.dec_layers = 1;
  cfg.max_len = 12;
  cfg.src_vocab = vocab;
  cfg.tgt_vocab = vocab;
  return cfg;
}

// Tiny copy task: target tokens equal source tokens.
std::vector<EncodedPair> copy_task(int pairs, int vocab, uint64_t seed) {
  Rng rng(seed);
  std::vector<EncodedPair> data;
  for (int i = 0; i < pairs; ++i) {
    const int len = 2 + static_cast<int>(rng.next_below(4));
    TokenIds toks;
    for (int t = 0; t < len; ++t) {
      toks.push_back(Vocabulary::num_specials +
                     static_cast<int>(rng.next_below(
                         vocab - Vocabulary::num_specials)));
    }
    EncodedPair p;
    p.src = toks;
    p.src.push_back(Vocabulary::eos_id);
    p.tgt.push_back(Vocabulary::bos_id);
    p.tgt.insert(p.tgt.end(), toks.begin(), toks.end());
    p.tgt.push_back(Vocabulary::eos_id);
    data.push_back(std::move(p));
  }
  return data;
}

}  // namespace

TEST_SUITE_BEGIN("trainer");

TEST_CASE("encode_pair frames and truncates") {
  const Vocabulary v = build_vocab({{"a", "b", "c"}}, 1, 100);
  const EncodedPair p = encode_pair({"a", "b"}, {"c"}, v, v, 12);
  CHECK(p.src.back() == Vocabulary::eos_id);
  CHECK(p.tgt.front() == Vocabulary::bos_id);
  CHECK(p.tgt.back() == Vocabulary::eos_id);

  const std::vector<std::string> long_side(30, "a");
  const EncodedPair q = encode_pair(long_side, long_side, v, v, 8);
  CHECK(q.src.size() == 8);
  CHECK(q.tgt.size() == 9);  // BOS + 7 + EOS fits tgt_in length 8
}

TEST_CASE("padded batches carry labels shifted by one") {
  const Vocabulary v = build_vocab({{"a", "b", "c"}}, 1, 100);
  std::vector<EncodedPair> pairs{encode_pair({"a"}, {"b", "c"}, v, v, 12),
                                 encode_pair({"b", "c"}, {"a"}, v, v, 12)};
  const PaddedBatch b = make_padded_batch(pairs, 0, 2);
  CHECK(b.batch == 2);
  CHECK(b.tgt_in[0] == Vocabulary::bos_id);
  CHECK(b.labels[0] == v.id("b"));
  // Row 2 is shorter; its tail must be masked out.
  int masked = 0;
  for (uint8_t m : b.label_mask) masked += m == 0 ? 1 : 0;
  CHECK(masked > 0);
}

TEST_CASE("lr zero leaves parameters untouched") {
  Seq2SeqModel model = make_seq2seq(micro_config(), 21);
  const uint64_t before = model.params.checksum();
  auto data = copy_task(4, 10, 1);
  const PaddedBatch batch = make_padded_batch(data, 0, data.size());
  TrainConfig cfg;
  AdamW opt(model.params);
  train_step(model, batch, CrossEntropyLoss(), opt, cfg, /*lr=*/0.0);
  CHECK(model.params.checksum() == before);
}

TEST_CASE("a train step returns the pre-step loss and reduces it") {
  Seq2SeqModel model = make_seq2seq(micro_config(), 22);
  auto data = copy_task(8, 10, 2);
  const PaddedBatch batch = make_padded_batch(data, 0, data.size());
  TrainConfig cfg;
  AdamW opt(model.params);
  const CrossEntropyLoss loss;
  double first = train_step(model, batch, loss, opt, cfg, 2e-3);
  double last = first;
  for (int i = 0; i < 60; ++i) {
    last = train_step(model, batch, loss, opt, cfg, 2e-3);
  }
  CHECK(last < first);
}

TEST_CASE("fitting a single pair increases its log likelihood") {
  Seq2SeqModel model = make_seq2seq(micro_config(), 23);
  auto data = copy_task(1, 10, 3);
  const double before = log_likelihood(model, data[0].src, data[0].tgt);
  const PaddedBatch batch = make_padded_batch(data, 0, 1);
  TrainConfig cfg;
  AdamW opt(model.params);
  const CrossEntropyLoss loss;
  for (int i = 0; i < 200; ++i) {
    train_step(model, batch, loss, opt, cfg, 2e-3);
  }
  const double after = log_likelihood(model, data[0].src, data[0].tgt);
  CHECK(after > before);
}

TEST_CASE("uniform logits give -T ln V") {
  // A model with zeroed output projection produces identical logits for
  // every class, so each step contributes exactly -ln V.
  Seq2SeqModel model = make_seq2seq(micro_config(), 24);
  auto& out_w = model.params.get("out.w");
  auto& out_b = model.params.get("out.b");
  std::fill(out_w->val.begin(), out_w->val.end(), 0.0);
  std::fill(out_b->val.begin(), out_b->val.end(), 0.0);
  const TokenIds src{5, Vocabulary::eos_id};
  const TokenIds tgt{Vocabulary::bos_id, 6, 7, Vocabulary::eos_id};
  CHECK(log_likelihood(model, src, tgt) ==
        doctest::Approx(-3.0 * std::log(10.0)).epsilon(1e-9));
}

TEST_CASE("copy task trains to low cross-entropy") {
  Seq2SeqModel model = make_seq2seq(micro_config(12), 25);
  auto data = copy_task(50, 12, 4);
  TrainConfig cfg;
  cfg.batch_size = 16;
  cfg.epochs = 80;
  cfg.lr_init = 3e-3;
  cfg.lr_min = 3e-4;
  cfg.seed = 9;
  const auto stats =
      train_epochs(model, data, cfg, CrossEntropyLoss(), /*step_budget=*/300);
  CHECK(stats.back().mean_loss < 0.1);
}

TEST_CASE("same seed, same data: bit-identical training") {
  auto run = [] {
    Seq2SeqModel model = make_seq2seq(micro_config(), 26);
    auto data = copy_task(12, 10, 5);
    TrainConfig cfg;
    cfg.batch_size = 4;
    cfg.epochs = 3;
    cfg.seed = 77;
    train_epochs(model, data, cfg, CrossEntropyLoss());
    return model.params.checksum();
  };
  CHECK(run() == run());
}

TEST_CASE("schedule: warmup then cosine decay to lr_min") {
  TrainConfig cfg;
  cfg.lr_init = 1e-3;
  cfg.lr_min = 1e-5;
  const long long total = 100, warmup = 10;
  CHECK(scheduled_lr(cfg, 0, total, warmup) ==
        doctest::Approx(1e-3 / 10.0));
  CHECK(scheduled_lr(cfg, 9, total, warmup) == doctest::Approx(1e-3));
  CHECK(scheduled_lr(cfg, 10, total, warmup) ==
        doctest::Approx(1e-3).epsilon(1e-6));
  CHECK(scheduled_lr(cfg, total + 50, total, warmup) ==
        doctest::Approx(1e-5));
  // Monotone non-increasing after warmup.
  double prev = scheduled_lr(cfg, warmup, total, warmup);
  for (long long s = warmup + 1; s <= total; ++s) {
    const double lr = scheduled_lr(cfg, s, total, warmup);
    CHECK(lr <= prev + 1e-15);
    prev = lr;
  }
}

TEST_CASE("gradient check on the full model with both losses") {
  Seq2SeqModel model = make_seq2seq(micro_config(8), 27);
  auto data = copy_task(3, 8, 6);
  const PaddedBatch batch = make_padded_batch(data, 0, data.size());
  CHECK(grad_check(model, batch, CrossEntropyLoss(), 1e-4, 200, 31) < 1e-3);
  CHECK(grad_check(model, batch, InTrustLoss({1.0, 1.0, 0.5}), 1e-4, 200, 32) <
        1e-3);
}

TEST_CASE("constant loss has zero gradients everywhere") {
  // A loss node that ignores the logits entirely.
  class ConstantLoss final : public SequenceLoss {
   public:
    std::string name() const override { return "constant"; }
    nn::Var build(const nn::Var& logits, const std::vector<int>&,
                  const std::vector<uint8_t>&) const override {
      return nn::make_op({1}, {1.0}, {logits}, [](nn::Node&) {});
    }
  };
  Seq2SeqModel model = make_seq2seq(micro_config(8), 28);
  auto data = copy_task(2, 8, 7);
  const PaddedBatch batch = make_padded_batch(data, 0, data.size());
  CHECK(grad_check(model, batch, ConstantLoss(), 1e-4, 50, 33) == 0.0);
}

TEST_SUITE_END();
