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

#ifndef LRNMT_TRAINER_HPP_
#define LRNMT_TRAINER_HPP_

#include <functional>
#include <vector>

#include "lrnmt/losses.hpp"
#include "lrnmt/model.hpp"

namespace lrnmt {

struct TrainConfig {
  int batch_size = 16;
  int epochs = 8;
  double lr_init = 1e-4;
  double lr_min = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 0.01;
  int warmup_epochs = 1;
  uint64_t seed = 1;
};

struct EncodedPair {
  TokenIds src;  // tokens + EOS
  TokenIds tgt;  // BOS + tokens + EOS
};

// Encodes one tokenized pair, truncating so both sides fit max_len.
EncodedPair encode_pair(const std::vector<std::string>& src_tokens,
                        const std::vector<std::string>& tgt_tokens,
                        const Vocabulary& src_vocab,
                        const Vocabulary& tgt_vocab, int max_len);

PaddedBatch make_padded_batch(const std::vector<EncodedPair>& pairs,
                              size_t begin, size_t end);

// Deterministically shuffled batch schedule for one epoch.
std::vector<PaddedBatch> make_batches(const std::vector<EncodedPair>& pairs,
                                      int batch_size, Rng& rng, bool shuffle);

// AdamW with decoupled weight decay. Moments are doubles; updated
// parameters are rounded back onto the float32 grid.
class AdamW {
 public:
  explicit AdamW(const ParamSet& params);
  void step(ParamSet& params, const TrainConfig& cfg, double lr);
  // Per-parameter learning rates (e.g. separate body and head groups).
  void step(ParamSet& params, const TrainConfig& cfg,
            const std::vector<double>& lr_per_param);
  int64_t steps_taken() const { return t_; }

 private:
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  int64_t t_ = 0;
};

// Linear warmup over the first warmup_steps, then cosine decay from
// lr_init to lr_min across the remaining steps.
double scheduled_lr(const TrainConfig& cfg, long long step,
                    long long total_steps, long long warmup_steps);

// One optimizer step; returns the pre-step loss. Throws
// Error(non_finite_loss) (carrying `batch_tag` context) without touching
// the parameters if the loss is not finite.
double train_step(Seq2SeqModel& model, const PaddedBatch& batch,
                  const SequenceLoss& loss, AdamW& opt, const TrainConfig& cfg,
                  double lr, int batch_tag = -1);

// Mean loss of the batch without updating anything.
double eval_loss(const Seq2SeqModel& model, const PaddedBatch& batch,
                 const SequenceLoss& loss);

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Standard loop: shuffled batches per epoch, scheduled learning rate.
// `step_budget` (when >= 0) caps the total number of optimizer steps and
// is also used as the schedule horizon, so arms of an ablation can be
// compared at an equal step count.
std::vector<EpochStats> train_epochs(Seq2SeqModel& model,
                                     const std::vector<EncodedPair>& data,
                                     const TrainConfig& cfg,
                                     const SequenceLoss& loss,
                                     long long step_budget = -1,
                                     const EpochCallback& callback = nullptr);

// Central finite differences over a random sample of parameters; returns
// the maximum relative error. Intended for small models.
double grad_check(Seq2SeqModel& model, const PaddedBatch& batch,
                  const SequenceLoss& loss, double eps, int sample_size,
                  uint64_t seed);

}  // namespace lrnmt

#endif  // LRNMT_TRAINER_HPP_
