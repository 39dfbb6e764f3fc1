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
// Length-normalized beam search plus the group-diverse variant used to mine
// hard negatives: group 0 is a plain search, and each later group pays a
// Hamming penalty of lambda_div per earlier-group occurrence of a token at
// the current step. Penalties steer selection only; stored scores are true
// model log-probabilities.

#ifndef LRNMT_DECODING_HPP_
#define LRNMT_DECODING_HPP_

#include <optional>
#include <vector>

#include "lrnmt/model.hpp"
#include "lrnmt/textproc.hpp"

namespace lrnmt {

struct DecodeConfig {
  int beam = 8;
  int groups = 4;
  int beam_per_group = 2;
  double lambda_div = 0.5;
  int max_len = 64;
  double length_norm = 0.6;
};

struct Hypothesis {
  TokenIds ids;  // BOS ... (EOS unless cut at max_len)
  double logprob = 0.0;
  int group = 0;
  std::optional<double> score;  // re-rank confidence, set by the re-ranker

  // logprob / len^length_norm over generated tokens.
  double normalized(double length_norm) const;
};

// Next-token distribution provider. Decoding is written against this
// interface so tests can drive it with fixed-logit stubs.
class NextTokenScorer {
 public:
  virtual ~NextTokenScorer() = default;
  virtual int vocab_size() const = 0;
  // One row of log-probabilities per prefix (each prefix starts with BOS).
  virtual std::vector<std::vector<double>> next_logprobs(
      const TokenIds& src, const std::vector<TokenIds>& prefixes) const = 0;
};

class ModelScorer final : public NextTokenScorer {
 public:
  explicit ModelScorer(const Seq2SeqModel& model) : model_(&model) {}
  int vocab_size() const override { return model_->cfg.tgt_vocab; }
  std::vector<std::vector<double>> next_logprobs(
      const TokenIds& src,
      const std::vector<TokenIds>& prefixes) const override;

 private:
  const Seq2SeqModel* model_;
};

// Returns up to cfg.beam finished hypotheses sorted by normalized score
// (ties broken by token ids ascending). Deterministic.
std::vector<Hypothesis> beam_search(const NextTokenScorer& scorer,
                                    const TokenIds& src,
                                    const DecodeConfig& cfg);

// cfg.groups x cfg.beam_per_group hypotheses, each labeled with its group,
// ordered by (group, rank within group). With lambda_div = 0 or groups = 1
// every group degenerates to a plain search of width beam_per_group.
std::vector<Hypothesis> diverse_beam_search(const NextTokenScorer& scorer,
                                            const TokenIds& src,
                                            const DecodeConfig& cfg);

// Removes exact-id duplicates, keeping the highest-logprob instance at the
// first occurrence's position.
std::vector<Hypothesis> dedup_candidates(const std::vector<Hypothesis>& hyps);

}  // namespace lrnmt

#endif  // LRNMT_DECODING_HPP_
