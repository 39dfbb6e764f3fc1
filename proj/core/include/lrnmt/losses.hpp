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
// Training objectives. Besides plain cross-entropy there is a composite
// noise-robust loss: alpha * CE plus beta * DCE, where
// DCE = -sum_i p_i * log(delta * p_i + (1 - delta) * q_i) blends the model
// distribution p into the label q, so confidently-wrong labels pull less
// hard than under pure cross-entropy.

#ifndef LRNMT_LOSSES_HPP_
#define LRNMT_LOSSES_HPP_

#include <span>
#include <string>
#include <vector>

#include "lrnmt/tensor.hpp"

namespace lrnmt {

struct InTrustParams {
  double alpha = 1.0;
  double beta = 1.0;
  double delta = 0.5;  // in (0, 1]
};

// Pointwise forms over an explicit probability distribution. The
// distribution must sum to 1 within 1e-6 with no negative entries;
// probabilities and blended log arguments are clamped to >= 1e-12.
double cross_entropy(std::span<const double> probs, int label);
double dce(std::span<const double> probs, int label, double delta);
double in_trust(std::span<const double> probs, int label,
                const InTrustParams& params);

// Differentiable batch objective over logits [n_tokens, vocab]; the value
// is the mean per-token loss over positions with a nonzero mask.
class SequenceLoss {
 public:
  virtual ~SequenceLoss() = default;
  virtual std::string name() const = 0;
  virtual nn::Var build(const nn::Var& logits, const std::vector<int>& labels,
                        const std::vector<uint8_t>& mask) const = 0;
};

class CrossEntropyLoss final : public SequenceLoss {
 public:
  explicit CrossEntropyLoss(double label_smoothing = 0.0)
      : label_smoothing_(label_smoothing) {}
  std::string name() const override { return "ce"; }
  nn::Var build(const nn::Var& logits, const std::vector<int>& labels,
                const std::vector<uint8_t>& mask) const override;

 private:
  double label_smoothing_;
};

class InTrustLoss final : public SequenceLoss {
 public:
  explicit InTrustLoss(InTrustParams params = {}) : params_(params) {}
  std::string name() const override { return "in_trust"; }
  nn::Var build(const nn::Var& logits, const std::vector<int>& labels,
                const std::vector<uint8_t>& mask) const override;
  const InTrustParams& params() const { return params_; }

 private:
  InTrustParams params_;
};

}  // namespace lrnmt

#endif  // LRNMT_LOSSES_HPP_
