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

#include "lrnmt/curriculum.hpp"

#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "lrnmt/error.hpp"
#include "lrnmt/synthetic.hpp"

using namespace lrnmt;

namespace {

TokenPair pair_of(std::initializer_list<const char*> src,
                  std::initializer_list<const char*> tgt) {
  TokenPair p;
  for (auto* t : src) p.src.emplace_back(t);
  for (auto* t : tgt) p.tgt.emplace_back(t);
  return p;
}

std::vector<TokenPair> pairs_with_src_lengths(std::initializer_list<int> lens) {
  std::vector<TokenPair> out;
  int counter = 0;
  for (int len : lens) {
    TokenPair p;
    for (int i = 0; i < len; ++i) {
      p.src.push_back("s" + std::to_string(counter));
      p.tgt.push_back("t" + std::to_string(counter));
      ++counter;
    }
    out.push_back(std::move(p));
  }
  return out;
}

// Echoing provider used to test the wire contract without HTTP.
class EchoProvider final : public TranslationProvider {
 public:
  std::optional<std::string> translate(const std::string& text,
                                       const std::string&,
                                       const std::string&) override {
    return "echo " + text;
  }
};

ModelConfig micro_model(int src_vocab, int tgt_vocab) {
  ModelConfig cfg;
  cfg.d_model = 16;
  cfg.heads = 2;
  cfg.d_ff = 32;
  cfg.enc_layers = 1;
  cfg.dec_layers = 1;
  cfg.max_len = 16;
  cfg.src_vocab = src_vocab;
  cfg.tgt_vocab = tgt_vocab;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("curriculum");

TEST_CASE("schedule: family, short sorted ascending, spliced long") {
  const auto family = pairs_with_src_lengths({4, 5});
  const auto task = pairs_with_src_lengths({9, 3, 6});
  CurriculumConfig cfg;
  cfg.short_threshold = 10;
  cfg.concat_target_len = 12;
  const Schedule s = build_schedule(family, task, cfg);
  REQUIRE(s.stages.size() == 3);
  CHECK_FALSE(s.family_skipped);
  CHECK(s.stages[0].name == "family");
  CHECK(s.stages[0].data.size() == 2);
  CHECK(s.stages[1].name == "short");
  REQUIRE(s.stages[1].data.size() == 3);
  CHECK(s.stages[1].data[0].src.size() == 3);
  CHECK(s.stages[1].data[1].src.size() == 6);
  CHECK(s.stages[1].data[2].src.size() == 9);
  CHECK(s.stages[2].name == "long");
  CHECK(!s.stages[2].data.empty());
}

TEST_CASE("schedule without family data is two stages plus a flag") {
  const auto task = pairs_with_src_lengths({3, 4});
  CurriculumConfig cfg;
  const Schedule s = build_schedule({}, task, cfg);
  CHECK(s.family_skipped);
  REQUIRE(s.stages.size() == 2);
  CHECK(s.stages[0].name == "short");
}

TEST_CASE("schedule errors: no task data, empty short stage") {
  CurriculumConfig cfg;
  CHECK_THROWS_AS(build_schedule({}, {}, cfg), Error);
  cfg.short_threshold = 2;
  CHECK_THROWS_AS(build_schedule({}, pairs_with_src_lengths({5, 7}), cfg),
                  Error);
}

TEST_CASE("concat grouping follows the greedy rule") {
  const auto pairs = pairs_with_src_lengths({3, 4, 5});
  const auto groups = concat_long_texts(pairs, 6, /*seed=*/0, "<sep>");
  REQUIRE(groups.size() == 2);
  // One group is 3+sep+4 = 8 tokens, the other is the lone 5-token pair.
  size_t total = 0;
  bool saw_join = false, saw_single = false;
  for (const auto& g : groups) {
    total += g.src.size();
    if (g.src.size() == 8) saw_join = true;
    if (g.src.size() == 5) saw_single = true;
  }
  CHECK(saw_join);
  CHECK(saw_single);
  CHECK(total == 3 + 4 + 5 + 1);  // conservation: inputs + one separator
}

TEST_CASE("concat conserves tokens and alignment") {
  const auto pairs = pairs_with_src_lengths({2, 3, 4, 2, 5, 3});
  const auto groups = concat_long_texts(pairs, 7, 9, "<sep>");
  size_t src_in = 0, tgt_in = 0;
  for (const auto& p : pairs) {
    src_in += p.src.size();
    tgt_in += p.tgt.size();
  }
  size_t src_out = 0, tgt_out = 0, seps = 0;
  for (const auto& g : groups) {
    src_out += g.src.size();
    tgt_out += g.tgt.size();
    for (const auto& t : g.src) {
      if (t == "<sep>") ++seps;
    }
    // Segment alignment: k-th source segment pairs with k-th target one.
    size_t src_segs = 1, tgt_segs = 1;
    for (const auto& t : g.src) src_segs += t == "<sep>" ? 1 : 0;
    for (const auto& t : g.tgt) tgt_segs += t == "<sep>" ? 1 : 0;
    CHECK(src_segs == tgt_segs);
  }
  CHECK(src_out == src_in + seps);
  CHECK(tgt_out == tgt_in + seps);
}

TEST_CASE("concat degenerate cases") {
  const auto pairs = pairs_with_src_lengths({3, 4, 2});
  // target_len=1: every pair closes its own group immediately.
  CHECK(concat_long_texts(pairs, 1, 0, "<sep>").size() == pairs.size());
  const auto single = pairs_with_src_lengths({4});
  const auto out = concat_long_texts(single, 100, 0, "<sep>");
  REQUIRE(out.size() == 1);
  CHECK(out[0].src == single[0].src);
  CHECK(out[0].tgt == single[0].tgt);
}

TEST_CASE("back-translation via the stubbed provider") {
  EchoProvider provider;
  BacktransConfig cfg;
  cfg.sample_size = 2;
  const std::vector<std::string> mono{"alpha beta", "gamma", "unused"};
  const auto result = back_translate(provider, mono, cfg,
                                     TokenizerMode::word, TokenizerMode::word);
  REQUIRE(result.pairs.size() == 2);
  CHECK(result.skipped == 0);
  CHECK(result.pairs[0].src ==
        std::vector<std::string>{"echo", "alpha", "beta"});
  CHECK(result.pairs[0].tgt == std::vector<std::string>{"alpha", "beta"});
  for (const auto& p : result.pairs) CHECK(p.synthetic_origin);

  cfg.sample_size = 0;
  CHECK(back_translate(provider, mono, cfg, TokenizerMode::word,
                       TokenizerMode::word)
            .pairs.empty());
}

TEST_CASE("back-translation through the HTTP provider protocol") {
  httplib::Server server;
  server.Post("/translate", [](const httplib::Request& req,
                               httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    // The provider asks for target -> source, so src_lang names the
    // synthetic side being generated.
    nlohmann::json reply{{"text", "rev:" + body["text"].get<std::string>()}};
    res.set_content(reply.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread worker([&server] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpTranslationProvider provider("127.0.0.1", port, 2000, 1);
  BacktransConfig cfg;
  cfg.sample_size = 2;
  const std::vector<std::string> mono{"uno dos", "tres"};
  const auto result = back_translate(provider, mono, cfg,
                                     TokenizerMode::word, TokenizerMode::word);
  server.stop();
  worker.join();

  REQUIRE(result.pairs.size() == 2);
  CHECK(result.pairs[0].src == std::vector<std::string>{"rev:uno", "dos"});
  CHECK(result.pairs[1].src == std::vector<std::string>{"rev:tres"});
}

TEST_CASE("unreachable HTTP provider raises provider_unavailable") {
  HttpTranslationProvider provider("127.0.0.1", 1, /*timeout_ms=*/100,
                                   /*retries=*/0);
  BacktransConfig cfg;
  cfg.sample_size = 1;
  CHECK_THROWS_AS(back_translate(provider, {"text"}, cfg, TokenizerMode::word,
                                 TokenizerMode::word),
                  Error);
}

TEST_CASE("internal provider decodes through a reverse model") {
  // An untrained micro model: outputs are arbitrary but the contract is
  // pairs of (decoded source, original target) with the synthetic flag.
  const Vocabulary vocab = build_vocab({{"w1", "w2", "w3"}}, 1, 100);
  const Seq2SeqModel reverse =
      make_seq2seq(micro_model(vocab.size(), vocab.size()), 5);
  DecodeConfig dc;
  dc.beam = 2;
  dc.max_len = 8;
  ModelTranslationProvider provider(reverse, vocab, vocab,
                                    TokenizerMode::word, TokenizerMode::word,
                                    dc);
  BacktransConfig cfg;
  cfg.sample_size = 3;
  const std::vector<std::string> mono{"w1 w2", "w3", "w2 w2 w1"};
  const auto result = back_translate(provider, mono, cfg,
                                     TokenizerMode::word, TokenizerMode::word);
  CHECK(result.pairs.size() + result.skipped == 3);
  for (const auto& p : result.pairs) {
    CHECK(p.synthetic_origin);
    CHECK(!p.tgt.empty());
  }
}

TEST_CASE("run_curriculum with zero-epoch stages leaves the model unchanged") {
  const Vocabulary vocab = build_vocab({{"w1", "w2", "w3"}}, 1, 100);
  Seq2SeqModel model = make_seq2seq(micro_model(vocab.size(), vocab.size()), 6);
  const uint64_t before = model.params.checksum();

  CurriculumConfig cc;
  cc.short_threshold = 10;
  cc.family_epochs = 0;
  cc.short_epochs = 0;
  cc.long_epochs = 0;
  const Schedule schedule = build_schedule(
      pairs_with_src_lengths({3}), pairs_with_src_lengths({2, 4}), cc);

  TrainConfig tc;
  std::vector<uint64_t> checkpoint_sums;
  const auto metrics = run_curriculum(
      model, schedule, vocab, vocab, tc, CrossEntropyLoss(), nullptr,
      [&](const std::string&, const Seq2SeqModel& m) {
        checkpoint_sums.push_back(m.params.checksum());
      });
  CHECK(model.params.checksum() == before);
  REQUIRE(checkpoint_sums.size() == 3);
  for (uint64_t sum : checkpoint_sums) CHECK(sum == before);
  CHECK(metrics.empty());
}

TEST_CASE("run_curriculum records per-epoch rows and stage-end dev scores") {
  SyntheticConfig sc;
  sc.clusters = 6;
  sc.synonyms = 2;
  sc.train_pairs = 24;
  sc.dev_pairs = 4;
  sc.test_pairs = 2;
  sc.family_pairs = 8;
  sc.mono_sentences = 10;
  sc.max_len = 6;
  sc.seed = 3;
  SyntheticWorld world(sc);
  const auto dir = make_direction(world, SynLang::nusa, SynLang::core, sc, 1);

  std::vector<std::vector<std::string>> src_corpus, tgt_corpus;
  for (const auto& p : dir.train) {
    src_corpus.push_back(p.src);
    tgt_corpus.push_back(p.tgt);
  }
  for (const auto& p : dir.family) {
    src_corpus.push_back(p.src);
    tgt_corpus.push_back(p.tgt);
  }
  const Vocabulary src_vocab = build_vocab(src_corpus, 1, 4000, {"<sep>"});
  const Vocabulary tgt_vocab = build_vocab(tgt_corpus, 1, 4000, {"<sep>"});
  Seq2SeqModel model =
      make_seq2seq(micro_model(src_vocab.size(), tgt_vocab.size()), 7);

  CurriculumConfig cc;
  cc.short_threshold = 8;
  cc.concat_target_len = 10;
  cc.family_epochs = 1;
  cc.short_epochs = 1;
  cc.long_epochs = 1;
  const Schedule schedule = build_schedule(dir.family, dir.train, cc);

  TrainConfig tc;
  tc.batch_size = 8;
  tc.epochs = 3;
  int evals = 0;
  const auto metrics = run_curriculum(
      model, schedule, src_vocab, tgt_vocab, tc, CrossEntropyLoss(),
      [&evals](const Seq2SeqModel&) {
        ++evals;
        return 12.5;
      });
  CHECK(evals == 3);
  REQUIRE(metrics.size() == 3);
  CHECK(metrics[0].stage == "family");
  CHECK(metrics[1].stage == "short");
  CHECK(metrics[2].stage == "long");
  for (const auto& row : metrics) CHECK(row.dev_bleu == 12.5);
}

TEST_CASE("curriculum training is deterministic given the seed") {
  const auto task = pairs_with_src_lengths({2, 3, 4, 3, 2});
  std::vector<std::vector<std::string>> corpus;
  for (const auto& p : task) {
    corpus.push_back(p.src);
    corpus.push_back(p.tgt);
  }
  const Vocabulary vocab = build_vocab(corpus, 1, 4000, {"<sep>"});

  auto run = [&] {
    Seq2SeqModel model =
        make_seq2seq(micro_model(vocab.size(), vocab.size()), 8);
    CurriculumConfig cc;
    cc.short_threshold = 10;
    cc.concat_target_len = 6;
    cc.family_epochs = 1;
    cc.short_epochs = 2;
    cc.long_epochs = 1;
    const Schedule schedule = build_schedule(task, task, cc);
    TrainConfig tc;
    tc.batch_size = 2;
    tc.seed = 123;
    run_curriculum(model, schedule, vocab, vocab, tc, CrossEntropyLoss());
    return model.params.checksum();
  };
  CHECK(run() == run());
}

TEST_SUITE_END();
