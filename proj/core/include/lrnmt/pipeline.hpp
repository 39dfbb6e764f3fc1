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
//
// The experiment driver: corpus ingestion, the full train -> decode ->
// re-rank -> score chain, run reports and the submission writer.

#ifndef LRNMT_PIPELINE_HPP_
#define LRNMT_PIPELINE_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lrnmt/corpus.hpp"
#include "lrnmt/curriculum.hpp"
#include "lrnmt/decoding.hpp"
#include "lrnmt/metrics.hpp"
#include "lrnmt/reranker.hpp"
#include "lrnmt/synthetic.hpp"

namespace lrnmt {

struct VocabConfig {
  int min_count = 1;
  int max_size = 20000;
};

struct AugmentSettings {
  bool enabled = true;
  AugmentConfig cfg;
};

struct CurriculumSettings {
  bool enabled = true;
  CurriculumConfig cfg;
};

struct RerankSettings {
  bool enabled = true;
  RerankConfig cfg;
  int train_subset = 200;  // pairs used for contrastive training
};

struct DirectionFiles {
  std::string name;
  Lang src_lang = Lang::synthetic;
  Lang tgt_lang = Lang::synthetic;
  std::string train_tsv;
  std::string dev_tsv;
  std::string test_tsv;
  std::string family_tsv;  // optional
  std::string mono_src;    // optional
};

struct ExperimentConfig {
  uint64_t seed = 7;
  std::string out_dir = "runs/exp";
  std::string loss = "in_trust";  // "ce" | "in_trust"
  double label_smoothing = 0.0;   // ce only
  InTrustParams in_trust;
  VocabConfig vocab;
  ModelConfig model;
  TrainConfig train;
  SkipgramConfig skipgram;
  AugmentSettings augment;
  CurriculumSettings curriculum;
  DecodeConfig decode;
  int eval_beam = 4;  // beam width for dev/test scoring decodes
  RerankSettings rerank;
  std::optional<SyntheticConfig> synthetic;
  std::vector<DirectionFiles> directions;  // used when synthetic is absent
};

// Parses the JSON config; unknown keys are rejected so typos surface as
// config errors. `overrides` are dotted "key.path=value" assignments.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(
    const std::string& path, const std::vector<std::string>& overrides = {});

// In-memory direction ready for training.
struct BuiltDirection {
  std::string name;
  Lang src_lang = Lang::synthetic;
  Lang tgt_lang = Lang::synthetic;
  TokenizerMode src_mode = TokenizerMode::word;
  TokenizerMode tgt_mode = TokenizerMode::word;
  std::vector<TokenPair> train, dev, test, family;
  std::vector<std::vector<std::string>> mono_src;
};

std::vector<BuiltDirection> build_directions(const ExperimentConfig& cfg);

// Corpus BLEU of beam top-1 decodes against the references.
double corpus_bleu_beam_top1(const Seq2SeqModel& model,
                             const std::vector<TokenPair>& pairs,
                             const Vocabulary& src_vocab,
                             const Vocabulary& tgt_vocab,
                             const DecodeConfig& cfg);

struct DirectionOutcome {
  std::string name;
  double beam_top1_bleu = 0.0;
  double reranked_bleu = 0.0;
  BleuReport report;  // of the re-ranked (final) outputs
  std::vector<StageMetrics> stage_metrics;
  std::vector<std::pair<std::string, double>> timings;  // component, seconds
};

struct RunReport {
  uint64_t seed = 0;
  std::vector<DirectionOutcome> directions;
  std::optional<double> leaderboard_average;  // set with exactly 4 directions
  double total_seconds = 0.0;
};

// Full chain per direction: preprocess, skip-gram, augmentation,
// (curriculum) training, diverse-beam decoding of dev and test, re-ranker
// training, re-ranking, corpus BLEU; plus the leaderboard average when the
// run has exactly four directions. All artifacts land under cfg.out_dir
// with a content-hash manifest.
RunReport run_pipeline(const ExperimentConfig& cfg);

std::string run_report_to_json(const RunReport& report);

// Submission writer: <translations><seg id="N">...</seg></translations>,
// ids 1-based, UTF-8, '&' emitted only as "&amp;".
void write_submission(const std::vector<Sentence>& hyps,
                      const std::string& path);
std::vector<std::string> read_submission(const std::string& path);

// JSON-lines candidate records {sent, ids, logprob, group, score?, text}.
struct SentenceCandidates {
  int sentence_index = 0;
  std::vector<Hypothesis> hyps;
  std::vector<std::string> texts;  // aligned with hyps
};
void write_candidates_jsonl(const std::vector<SentenceCandidates>& all,
                            const std::string& path);
std::vector<SentenceCandidates> read_candidates_jsonl(const std::string& path);

uint64_t fnv1a_file(const std::string& path);

}  // namespace lrnmt

#endif  // LRNMT_PIPELINE_HPP_
