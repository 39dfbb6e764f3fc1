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

#include "lrnmt/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "lrnmt/error.hpp"
#include "lrnmt/rng.hpp"

using namespace lrnmt;
namespace fs = std::filesystem;

namespace {

std::string temp_file(const char* name, const std::string& content) {
  const std::string path = (fs::temp_directory_path() / name).string();
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace

TEST_SUITE_BEGIN("pipeline");

TEST_CASE("parallel TSV loading skips malformed lines and counts them") {
  const std::string path = temp_file(
      "lrnmt_tsv_test.tsv",
      "hello dunia\thalo dunia\n"
      "no tab here\n"
      "a\tb\n"
      "too\tmany\ttabs\n"
      "c\td\n");
  const ParallelCorpus corpus =
      load_parallel_tsv(path, Lang::ms, Lang::zh);
  CHECK(corpus.pairs.size() == 3);
  CHECK(corpus.skipped_lines == 2);
  CHECK(corpus.pairs[0].first.lang == Lang::ms);
  CHECK(corpus.pairs[0].second.lang == Lang::zh);
  std::remove(path.c_str());
}

TEST_CASE("CRLF endings load identically to LF") {
  const std::string lf = temp_file("lrnmt_lf.tsv", "a x\tb y\nc\td\n");
  const std::string crlf = temp_file("lrnmt_crlf.tsv", "a x\tb y\r\nc\td\r\n");
  const auto a = load_parallel_tsv(lf, Lang::ms, Lang::ms);
  const auto b = load_parallel_tsv(crlf, Lang::ms, Lang::ms);
  REQUIRE(a.pairs.size() == b.pairs.size());
  for (size_t i = 0; i < a.pairs.size(); ++i) {
    CHECK(a.pairs[i].first.text == b.pairs[i].first.text);
    CHECK(a.pairs[i].second.text == b.pairs[i].second.text);
  }
  std::remove(lf.c_str());
  std::remove(crlf.c_str());
}

TEST_CASE("TSV loading entity-decodes both sides") {
  const std::string path =
      temp_file("lrnmt_ent.tsv", "x &amp y\tp &amp; q\n");
  const auto corpus = load_parallel_tsv(path, Lang::ms, Lang::ms);
  REQUIRE(corpus.pairs.size() == 1);
  CHECK(corpus.pairs[0].first.text == "x & y");
  CHECK(corpus.pairs[0].second.text == "p & q");
  std::remove(path.c_str());
}

TEST_CASE("missing corpus file raises an io error") {
  CHECK_THROWS_AS(load_parallel_tsv("/nonexistent/x.tsv", Lang::ms, Lang::ms),
                  Error);
}

TEST_CASE("vocabulary file round trip") {
  const Vocabulary v = build_vocab({{"alpha", "beta", "alpha"}}, 1, 100);
  const std::string path =
      (fs::temp_directory_path() / "lrnmt_vocab_test.txt").string();
  save_vocab(v, path);
  const Vocabulary loaded = load_vocab(path);
  CHECK(loaded.tokens() == v.tokens());
  CHECK(loaded.content_hash() == v.content_hash());
  std::remove(path.c_str());
}

TEST_CASE("submission writer escapes ampersands and numbers from one") {
  const std::string path =
      (fs::temp_directory_path() / "lrnmt_sub_test.xml").string();
  write_submission({Sentence{"a & b", Lang::ms}, Sentence{"plain", Lang::ms}},
                   path);
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content.find("<seg id=\"1\">a &amp; b</seg>") != std::string::npos);
  CHECK(content.find("<seg id=\"2\">plain</seg>") != std::string::npos);
  // '&' appears only as part of "&amp;".
  for (size_t i = 0; i < content.size(); ++i) {
    if (content[i] == '&') CHECK(content.compare(i, 5, "&amp;") == 0);
  }
  std::remove(path.c_str());
}

TEST_CASE("empty submission is a bare translations element") {
  const std::string path =
      (fs::temp_directory_path() / "lrnmt_sub_empty.xml").string();
  write_submission({}, path);
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content.find("<translations></translations>") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("submission round trip recovers 100 random sentences exactly") {
  Rng rng(2027);
  std::vector<Sentence> hyps;
  const std::vector<std::string> pieces{"kata", "&",  "benar", "x<y",
                                        "p>q",  "ab", "中文",  "&amp;"};
  for (int i = 0; i < 100; ++i) {
    std::string text;
    const int len = 1 + static_cast<int>(rng.next_below(6));
    for (int j = 0; j < len; ++j) {
      if (j > 0) text += ' ';
      text += pieces[rng.next_below(pieces.size())];
    }
    hyps.push_back(Sentence{text, Lang::ms});
  }
  const std::string path =
      (fs::temp_directory_path() / "lrnmt_sub_round.xml").string();
  write_submission(hyps, path);
  const auto back = read_submission(path);
  REQUIRE(back.size() == hyps.size());
  for (size_t i = 0; i < hyps.size(); ++i) CHECK(back[i] == hyps[i].text);
  std::remove(path.c_str());
}

TEST_CASE("candidate JSON-lines round trip") {
  std::vector<SentenceCandidates> all;
  SentenceCandidates a;
  a.sentence_index = 0;
  a.hyps.push_back(Hypothesis{{1, 5, 2}, -1.25, 0, std::nullopt});
  a.hyps.push_back(Hypothesis{{1, 6, 2}, -2.5, 1, 0.75});
  a.texts = {"x", "y"};
  SentenceCandidates b;
  b.sentence_index = 1;
  b.hyps.push_back(Hypothesis{{1, 7, 2}, -0.5, 3, std::nullopt});
  b.texts = {"z"};
  all.push_back(a);
  all.push_back(b);

  const std::string path =
      (fs::temp_directory_path() / "lrnmt_cand_test.jsonl").string();
  write_candidates_jsonl(all, path);
  const auto back = read_candidates_jsonl(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].hyps.size() == 2);
  CHECK(back[0].hyps[0].ids == TokenIds{1, 5, 2});
  CHECK(back[0].hyps[1].score.has_value());
  CHECK(*back[0].hyps[1].score == doctest::Approx(0.75));
  CHECK(back[1].hyps[0].group == 3);
  CHECK(back[0].texts[1] == "y");
  std::remove(path.c_str());
}

TEST_CASE("config parsing applies defaults and rejects unknown keys") {
  const ExperimentConfig cfg = parse_experiment_config(R"({
    "seed": 9,
    "out_dir": "runs/x",
    "loss": "ce",
    "synthetic": {"train_pairs": 12},
    "train": {"epochs": 2, "batch_size": 4}
  })");
  CHECK(cfg.seed == 9);
  CHECK(cfg.loss == "ce");
  CHECK(cfg.train.epochs == 2);
  CHECK(cfg.train.batch_size == 4);
  CHECK(cfg.train.lr_init == doctest::Approx(1e-4));
  CHECK(cfg.model.d_model == 64);
  REQUIRE(cfg.synthetic.has_value());
  CHECK(cfg.synthetic->train_pairs == 12);
  // Seed propagation to components.
  CHECK(cfg.train.seed == 9);

  CHECK_THROWS_AS(parse_experiment_config(R"({"synthetic": {}, "typo": 1})"),
                  Error);
  CHECK_THROWS_AS(
      parse_experiment_config(R"({"synthetic": {}, "train": {"epoch": 3}})"),
      Error);
  CHECK_THROWS_AS(parse_experiment_config(R"({"loss": "huber"})"), Error);
  CHECK_THROWS_AS(parse_experiment_config("not json"), Error);
  CHECK_THROWS_AS(parse_experiment_config(R"({"loss": "ce"})"), Error);
}

TEST_CASE("config overrides navigate dotted paths") {
  const std::string path = temp_file("lrnmt_cfg_test.json", R"({
    "synthetic": {"train_pairs": 10},
    "train": {"epochs": 4}
  })");
  const ExperimentConfig cfg = load_experiment_config(
      path, {"train.epochs=9", "loss=ce", "synthetic.noise_rate=0.25"});
  CHECK(cfg.train.epochs == 9);
  CHECK(cfg.loss == "ce");
  CHECK(cfg.synthetic->noise_rate == doctest::Approx(0.25));
  std::remove(path.c_str());
}

TEST_CASE("file-based directions validate that files exist") {
  ExperimentConfig cfg = parse_experiment_config(R"({
    "directions": [{"name": "d", "train": "/nonexistent/train.tsv",
                    "dev": "/nonexistent/dev.tsv",
                    "test": "/nonexistent/test.tsv"}]
  })");
  CHECK_THROWS_AS(build_directions(cfg), Error);
}

TEST_CASE("synthetic directions are deterministic and four-way") {
  ExperimentConfig cfg = parse_experiment_config(R"({
    "synthetic": {"train_pairs": 8, "dev_pairs": 2, "test_pairs": 2,
                   "family_pairs": 4, "mono_sentences": 6}
  })");
  const auto a = build_directions(cfg);
  const auto b = build_directions(cfg);
  REQUIRE(a.size() == 4);
  CHECK(a[0].name == "core-nusa");
  CHECK(a[1].name == "nusa-core");
  CHECK(a[2].name == "core-melu");
  CHECK(a[3].name == "melu-core");
  for (size_t d = 0; d < 4; ++d) {
    CHECK(a[d].train.size() == 8);
    REQUIRE(a[d].train.size() == b[d].train.size());
    for (size_t i = 0; i < a[d].train.size(); ++i) {
      CHECK(a[d].train[i].src == b[d].train[i].src);
      CHECK(a[d].train[i].tgt == b[d].train[i].tgt);
    }
  }
}

TEST_CASE("synthetic task: translations are cluster-canonical and aligned") {
  SyntheticConfig sc;
  sc.train_pairs = 30;
  sc.seed = 5;
  SyntheticWorld world(sc);
  const auto dir = make_direction(world, SynLang::nusa, SynLang::core, sc, 9);
  for (const auto& p : dir.train) {
    REQUIRE(p.src.size() == p.tgt.size());
  }
  // Same source word always maps to the same target word (no noise).
  std::map<std::string, std::string> mapping;
  for (const auto& p : dir.dev) {
    for (size_t i = 0; i < p.src.size(); ++i) {
      auto [it, inserted] = mapping.emplace(p.src[i], p.tgt[i]);
      if (!inserted) CHECK(it->second == p.tgt[i]);
    }
  }
}

TEST_CASE("synthetic noise corrupts roughly the requested share") {
  SyntheticConfig sc;
  sc.train_pairs = 200;
  sc.noise_rate = 0.3;
  sc.seed = 6;
  SyntheticWorld world(sc);
  const auto noisy =
      make_direction(world, SynLang::nusa, SynLang::core, sc, 4);
  SyntheticConfig clean_cfg = sc;
  clean_cfg.noise_rate = 0.0;
  const auto clean =
      make_direction(world, SynLang::nusa, SynLang::core, clean_cfg, 4);

  long long total = 0, corrupted = 0;
  REQUIRE(noisy.train.size() == clean.train.size());
  for (size_t i = 0; i < noisy.train.size(); ++i) {
    REQUIRE(noisy.train[i].src == clean.train[i].src);
    for (size_t t = 0; t < noisy.train[i].tgt.size(); ++t) {
      ++total;
      if (noisy.train[i].tgt[t] != clean.train[i].tgt[t]) ++corrupted;
    }
  }
  const double rate = static_cast<double>(corrupted) / total;
  CHECK(rate > 0.2);
  CHECK(rate < 0.4);
  // Dev and test stay clean.
  for (size_t i = 0; i < noisy.dev.size(); ++i) {
    CHECK(noisy.dev[i].tgt == clean.dev[i].tgt);
  }
}

TEST_CASE("fnv1a_file changes when the file changes") {
  const std::string path = temp_file("lrnmt_hash_test.txt", "abc");
  const uint64_t h1 = fnv1a_file(path);
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "abd";
  }
  CHECK(fnv1a_file(path) != h1);
  std::remove(path.c_str());
}

TEST_SUITE_END();
