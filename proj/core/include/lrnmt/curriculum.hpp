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
// Three-stage training schedule: related-language pairs first, then short
// task sentences ordered by length, then long texts spliced out of the
// short ones. Also the back-translation generator for synthetic pairs.

#ifndef LRNMT_CURRICULUM_HPP_
#define LRNMT_CURRICULUM_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lrnmt/decoding.hpp"
#include "lrnmt/embeddings.hpp"
#include "lrnmt/trainer.hpp"

namespace lrnmt {

struct CurriculumConfig {
  int short_threshold = 24;   // stage-2 max source length, in tokens
  int concat_target_len = 48; // stage-3 splice length goal
  int family_epochs = 2;
  int short_epochs = 4;
  int long_epochs = 2;
  std::string separator = "<sep>";
  uint64_t seed = 11;
};

struct CurriculumStage {
  std::string name;  // family | short | long
  std::vector<TokenPair> data;
  int epochs = 0;
  std::string order_key;
};

// Stages in fixed order family -> short -> long. An empty family corpus
// drops stage 1 (the returned flag reports it); an empty short stage is an
// error. Throws Error(empty_task_data) / Error(empty_stage).
struct Schedule {
  std::vector<CurriculumStage> stages;
  bool family_skipped = false;
};

Schedule build_schedule(const std::vector<TokenPair>& family_pairs,
                        const std::vector<TokenPair>& task_pairs,
                        const CurriculumConfig& cfg);

// Greedily joins consecutive pairs (sources with sources, targets with
// targets, one separator token between segments) until the source reaches
// target_len, then starts a new group. Every input pair is used exactly
// once and segment alignment is preserved. The seed shuffles the order of
// the finished groups only.
std::vector<TokenPair> concat_long_texts(const std::vector<TokenPair>& pairs,
                                         int target_len, uint64_t seed,
                                         const std::string& separator);

struct BacktransConfig {
  enum class Provider { internal, external };
  Provider provider = Provider::internal;
  int sample_size = 0;
  int max_len = 64;
  uint64_t seed = 3;
  // External provider endpoint (HTTP POST /translate).
  std::string host = "127.0.0.1";
  int port = 0;
  int timeout_ms = 2000;
  int retries = 2;
  std::string src_lang = "synthetic";
  std::string tgt_lang = "synthetic";
};

class TranslationProvider {
 public:
  virtual ~TranslationProvider() = default;
  // Empty optional = this sentence failed; callers count it as skipped.
  virtual std::optional<std::string> translate(const std::string& text,
                                               const std::string& src_lang,
                                               const std::string& tgt_lang) = 0;
};

// Decodes with a reverse-direction model (target -> source).
class ModelTranslationProvider final : public TranslationProvider {
 public:
  ModelTranslationProvider(const Seq2SeqModel& reverse_model,
                           const Vocabulary& in_vocab,
                           const Vocabulary& out_vocab, TokenizerMode in_mode,
                           TokenizerMode out_mode, DecodeConfig decode);
  std::optional<std::string> translate(const std::string& text,
                                       const std::string& src_lang,
                                       const std::string& tgt_lang) override;

 private:
  const Seq2SeqModel* model_;
  const Vocabulary* in_vocab_;
  const Vocabulary* out_vocab_;
  TokenizerMode in_mode_;
  TokenizerMode out_mode_;
  DecodeConfig decode_;
};

// POSTs {"src_lang","tgt_lang","text"} to /translate and reads {"text"}.
// Throws Error(provider_unavailable) when the endpoint cannot be reached
// at all; per-sentence failures are reported as skipped entries.
class HttpTranslationProvider final : public TranslationProvider {
 public:
  HttpTranslationProvider(std::string host, int port, int timeout_ms,
                          int retries);
  std::optional<std::string> translate(const std::string& text,
                                       const std::string& src_lang,
                                       const std::string& tgt_lang) override;

 private:
  std::string host_;
  int port_;
  int timeout_ms_;
  int retries_;
};

struct BacktransResult {
  std::vector<TokenPair> pairs;  // synthetic_origin flag set on every entry
  int skipped = 0;
};

// Turns monolingual target-language text into (synthetic source, target)
// pairs; takes min(sample_size, |mono|) sentences from the front.
BacktransResult back_translate(TranslationProvider& provider,
                               const std::vector<std::string>& mono,
                               const BacktransConfig& cfg,
                               TokenizerMode src_mode, TokenizerMode tgt_mode);

struct StageMetrics {
  std::string stage;
  int epoch = 0;
  double loss = 0.0;
  double dev_bleu = -1.0;  // < 0 means not evaluated at this row
};

using DevEvaluator = std::function<double(const Seq2SeqModel&)>;
using StageCheckpointer =
    std::function<void(const std::string& stage, const Seq2SeqModel&)>;

// Trains stage by stage, carrying parameters forward. Per-epoch loss rows
// are emitted for every stage; dev BLEU is evaluated after each stage when
// an evaluator is supplied. Optimizer state persists across stages.
std::vector<StageMetrics> run_curriculum(
    Seq2SeqModel& model, const Schedule& schedule,
    const Vocabulary& src_vocab, const Vocabulary& tgt_vocab,
    const TrainConfig& train_cfg, const SequenceLoss& loss,
    const DevEvaluator& evaluate = nullptr,
    const StageCheckpointer& checkpoint = nullptr);

}  // namespace lrnmt

#endif  // LRNMT_CURRICULUM_HPP_
