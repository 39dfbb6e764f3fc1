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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lrnmt/error.hpp"

namespace lrnmt {

namespace {

nn::Var batch_loss(const Seq2SeqModel& model, const PaddedBatch& batch,
                   const SequenceLoss& loss) {
  nn::Var logits = forward_logits(model, batch.src, batch.batch, batch.src_len,
                                  batch.tgt_in, batch.tgt_len);
  return loss.build(logits, batch.labels, batch.label_mask);
}

}  // namespace

EncodedPair encode_pair(const std::vector<std::string>& src_tokens,
                        const std::vector<std::string>& tgt_tokens,
                        const Vocabulary& src_vocab,
                        const Vocabulary& tgt_vocab, int max_len) {
  EncodedPair out;
  out.src = encode(src_tokens, src_vocab, /*add_bos_eos=*/false);
  if (static_cast<int>(out.src.size()) > max_len - 1) {
    out.src.resize(max_len - 1);
  }
  out.src.push_back(Vocabulary::eos_id);

  std::vector<std::string> tgt = tgt_tokens;
  if (static_cast<int>(tgt.size()) > max_len - 1) tgt.resize(max_len - 1);
  out.tgt = encode(tgt, tgt_vocab, /*add_bos_eos=*/true);
  return out;
}

PaddedBatch make_padded_batch(const std::vector<EncodedPair>& pairs,
                              size_t begin, size_t end) {
  if (begin >= end || end > pairs.size()) {
    fail(ErrorCode::shape_mismatch, "make_padded_batch: bad range");
  }
  PaddedBatch b;
  b.batch = static_cast<int>(end - begin);
  for (size_t i = begin; i < end; ++i) {
    b.src_len = std::max(b.src_len, (int)pairs[i].src.size());
    b.tgt_len = std::max(b.tgt_len, (int)pairs[i].tgt.size() - 1);
  }
  b.src.assign(static_cast<size_t>(b.batch) * b.src_len, Vocabulary::pad_id);
  b.tgt_in.assign(static_cast<size_t>(b.batch) * b.tgt_len,
                  Vocabulary::pad_id);
  b.labels.assign(b.tgt_in.size(), Vocabulary::pad_id);
  b.label_mask.assign(b.tgt_in.size(), 0);
  for (size_t i = begin; i < end; ++i) {
    const size_t row = i - begin;
    const auto& p = pairs[i];
    std::copy(p.src.begin(), p.src.end(),
              b.src.begin() + row * b.src_len);
    const size_t steps = p.tgt.size() - 1;
    for (size_t t = 0; t < steps; ++t) {
      b.tgt_in[row * b.tgt_len + t] = p.tgt[t];
      b.labels[row * b.tgt_len + t] = p.tgt[t + 1];
      b.label_mask[row * b.tgt_len + t] = 1;
    }
  }
  return b;
}

std::vector<PaddedBatch> make_batches(const std::vector<EncodedPair>& pairs,
                                      int batch_size, Rng& rng, bool shuffle) {
  if (pairs.empty()) fail(ErrorCode::empty_corpus, "no training pairs");
  std::vector<size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), size_t{0});
  if (shuffle) rng.shuffle(order);
  std::vector<EncodedPair> shuffled;
  shuffled.reserve(pairs.size());
  for (size_t i : order) shuffled.push_back(pairs[i]);

  std::vector<PaddedBatch> batches;
  for (size_t begin = 0; begin < shuffled.size();
       begin += static_cast<size_t>(batch_size)) {
    const size_t end =
        std::min(shuffled.size(), begin + static_cast<size_t>(batch_size));
    batches.push_back(make_padded_batch(shuffled, begin, end));
  }
  return batches;
}

AdamW::AdamW(const ParamSet& params) {
  m_.resize(params.size());
  v_.resize(params.size());
  for (size_t i = 0; i < params.size(); ++i) {
    m_[i].assign(params.var(i)->numel(), 0.0);
    v_[i].assign(params.var(i)->numel(), 0.0);
  }
}

void AdamW::step(ParamSet& params, const TrainConfig& cfg, double lr) {
  step(params, cfg, std::vector<double>(params.size(), lr));
}

void AdamW::step(ParamSet& params, const TrainConfig& cfg,
                 const std::vector<double>& lr_per_param) {
  if (lr_per_param.size() != params.size()) {
    fail(ErrorCode::shape_mismatch, "AdamW: learning-rate vector mismatch");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
  for (size_t i = 0; i < params.size(); ++i) {
    auto& var = params.var(i);
    var->ensure_grad();
    const double lr = lr_per_param[i];
    auto& m = m_[i];
    auto& v = v_[i];
    for (size_t j = 0; j < var->numel(); ++j) {
      const double g = var->grad[j];
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g;
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g * g;
      const double update = (m[j] / bc1) / (std::sqrt(v[j] / bc2) + cfg.adam_eps);
      var->val[j] -= lr * (update + cfg.weight_decay * var->val[j]);
    }
    nn::round_to_f32(var->val);
  }
}

double scheduled_lr(const TrainConfig& cfg, long long step,
                    long long total_steps, long long warmup_steps) {
  if (total_steps <= 0) return cfg.lr_init;
  if (warmup_steps > 0 && step < warmup_steps) {
    return cfg.lr_init * static_cast<double>(step + 1) /
           static_cast<double>(warmup_steps);
  }
  const long long decay_steps = std::max<long long>(1, total_steps - warmup_steps);
  const double t =
      std::min(1.0, static_cast<double>(step - warmup_steps) /
                        static_cast<double>(decay_steps));
  const double cosine = 0.5 * (1.0 + std::cos(t * 3.14159265358979323846));
  return cfg.lr_min + (cfg.lr_init - cfg.lr_min) * cosine;
}

double train_step(Seq2SeqModel& model, const PaddedBatch& batch,
                  const SequenceLoss& loss, AdamW& opt, const TrainConfig& cfg,
                  double lr, int batch_tag) {
  model.params.zero_grads();
  nn::Var loss_var = batch_loss(model, batch, loss);
  const double value = loss_var->val[0];
  if (!std::isfinite(value)) {
    fail(ErrorCode::non_finite_loss,
         "non-finite loss at batch " + std::to_string(batch_tag));
  }
  nn::backward(loss_var);
  opt.step(model.params, cfg, lr);
  return value;
}

double eval_loss(const Seq2SeqModel& model, const PaddedBatch& batch,
                 const SequenceLoss& loss) {
  nn::NoGradGuard guard;
  return batch_loss(model, batch, loss)->val[0];
}

std::vector<EpochStats> train_epochs(Seq2SeqModel& model,
                                     const std::vector<EncodedPair>& data,
                                     const TrainConfig& cfg,
                                     const SequenceLoss& loss,
                                     long long step_budget,
                                     const EpochCallback& callback) {
  Rng rng(cfg.seed);
  AdamW opt(model.params);
  const long long steps_per_epoch =
      (static_cast<long long>(data.size()) + cfg.batch_size - 1) /
      cfg.batch_size;
  const long long natural_total = steps_per_epoch * cfg.epochs;
  const long long total_steps =
      step_budget >= 0 ? step_budget : natural_total;
  const long long warmup_steps =
      std::min<long long>(total_steps, steps_per_epoch * cfg.warmup_epochs);

  std::vector<EpochStats> stats;
  long long step = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (step_budget >= 0 && step >= step_budget) break;
    Rng epoch_rng = rng.fork(static_cast<uint64_t>(epoch));
    auto batches = make_batches(data, cfg.batch_size, epoch_rng, true);
    double sum_loss = 0.0;
    long long seen = 0;
    for (size_t i = 0; i < batches.size(); ++i) {
      if (step_budget >= 0 && step >= step_budget) break;
      const double lr = scheduled_lr(cfg, step, total_steps, warmup_steps);
      sum_loss += train_step(model, batches[i], loss, opt, cfg, lr,
                             static_cast<int>(i));
      ++seen;
      ++step;
    }
    EpochStats es;
    es.epoch = epoch;
    es.mean_loss = seen > 0 ? sum_loss / static_cast<double>(seen) : 0.0;
    stats.push_back(es);
    if (callback) callback(es);
  }
  return stats;
}

double grad_check(Seq2SeqModel& model, const PaddedBatch& batch,
                  const SequenceLoss& loss, double eps, int sample_size,
                  uint64_t seed) {
  model.params.zero_grads();
  {
    nn::Var loss_var = batch_loss(model, batch, loss);
    nn::backward(loss_var);
  }
  // Snapshot the analytic gradients before probing.
  std::vector<std::vector<double>> analytic(model.params.size());
  for (size_t i = 0; i < model.params.size(); ++i) {
    analytic[i] = model.params.var(i)->grad;
  }

  Rng rng(seed);
  const size_t total = model.params.total_elements();
  double worst = 0.0;
  for (int s = 0; s < sample_size; ++s) {
    size_t flat = static_cast<size_t>(rng.next_below(total));
    size_t pi = 0;
    while (flat >= model.params.var(pi)->numel()) {
      flat -= model.params.var(pi)->numel();
      ++pi;
    }
    auto& var = model.params.var(pi);
    const double original = var->val[flat];

    var->val[flat] = original + eps;
    const double plus = eval_loss(model, batch, loss);
    var->val[flat] = original - eps;
    const double minus = eval_loss(model, batch, loss);
    var->val[flat] = original;

    const double numeric = (plus - minus) / (2.0 * eps);
    const double exact = analytic[pi][flat];
    const double denom =
        std::max(1e-8, std::abs(exact) + std::abs(numeric));
    worst = std::max(worst, std::abs(exact - numeric) / denom);
  }
  return worst;
}

}  // namespace lrnmt
