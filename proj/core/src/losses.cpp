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

#include "lrnmt/losses.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "lrnmt/error.hpp"

namespace lrnmt {

namespace {

constexpr double kProbFloor = 1e-12;

void check_distribution(std::span<const double> probs, int label) {
  if (probs.empty() || label < 0 ||
      label >= static_cast<int>(probs.size())) {
    fail(ErrorCode::invalid_distribution, "label outside distribution");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (p < -1e-9 || !std::isfinite(p)) {
      fail(ErrorCode::invalid_distribution, "negative or non-finite mass");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    fail(ErrorCode::invalid_distribution, "probabilities do not sum to 1");
  }
}

double dce_unchecked(std::span<const double> probs, int label, double delta) {
  double loss = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    const double q = static_cast<int>(i) == label ? 1.0 : 0.0;
    const double blended =
        std::max(kProbFloor, delta * probs[i] + (1.0 - delta) * q);
    loss -= probs[i] * std::log(blended);
  }
  return loss;
}

struct TokenGradTerms {
  double value = 0.0;
};

// Shared fused node: value is the masked mean of
//   alpha * CE + beta * DCE
// per token, with CE optionally label-smoothed. Backward writes
//   alpha * (p - q~) + beta * p o (g - <g, p>)         (per token / count)
// where g_j = -log(m_j) - delta * p_j / m_j and m = delta*p + (1-delta)*q.
nn::Var masked_token_loss(const nn::Var& logits, const std::vector<int>& labels,
                          const std::vector<uint8_t>& mask, double alpha,
                          double beta, double delta, double label_smoothing) {
  if (logits->shape.size() != 2) {
    fail(ErrorCode::shape_mismatch, "loss: logits must be 2-d");
  }
  const int n = logits->shape[0];
  const int v = logits->shape[1];
  if (labels.size() != static_cast<size_t>(n) || mask.size() != labels.size()) {
    fail(ErrorCode::shape_mismatch, "loss: labels/mask must match logits rows");
  }

  auto probs = std::make_shared<std::vector<double>>(logits->numel(), 0.0);
  long long count = 0;
  double total = 0.0;
  for (int t = 0; t < n; ++t) {
    if (mask[t] == 0) continue;
    const int label = labels[t];
    if (label < 0 || label >= v) {
      fail(ErrorCode::id_out_of_range, "loss: label outside vocabulary");
    }
    ++count;
    const double* z = logits->val.data() + static_cast<size_t>(t) * v;
    double* p = probs->data() + static_cast<size_t>(t) * v;
    double max_z = z[0];
    for (int j = 1; j < v; ++j) max_z = std::max(max_z, z[j]);
    double sum = 0.0;
    for (int j = 0; j < v; ++j) {
      p[j] = std::exp(z[j] - max_z);
      sum += p[j];
    }
    for (int j = 0; j < v; ++j) p[j] /= sum;

    if (alpha != 0.0) {
      if (label_smoothing == 0.0) {
        total += alpha * -std::log(std::max(kProbFloor, p[label]));
      } else {
        const double uniform = label_smoothing / v;
        double ce = 0.0;
        for (int j = 0; j < v; ++j) {
          const double q = (j == label ? 1.0 - label_smoothing : 0.0) + uniform;
          ce -= q * std::log(std::max(kProbFloor, p[j]));
        }
        total += alpha * ce;
      }
    }
    if (beta != 0.0) {
      total += beta *
               dce_unchecked(std::span<const double>(p, v), label, delta);
    }
  }
  const double value = count == 0 ? 0.0 : total / static_cast<double>(count);

  nn::Node* zn = logits.get();
  return nn::make_op(
      {1}, {value}, {logits},
      [zn, probs, labels, mask, n, v, alpha, beta, delta, label_smoothing,
       count](nn::Node& self) {
        if (count == 0) return;
        const double upstream = self.grad[0] / static_cast<double>(count);
        for (int t = 0; t < n; ++t) {
          if (mask[t] == 0) continue;
          const int label = labels[t];
          const double* p = probs->data() + static_cast<size_t>(t) * v;
          double* dz = zn->grad.data() + static_cast<size_t>(t) * v;

          if (alpha != 0.0) {
            const double uniform = label_smoothing / v;
            for (int j = 0; j < v; ++j) {
              const double q =
                  (j == label ? 1.0 - label_smoothing : 0.0) + uniform;
              dz[j] += upstream * alpha * (p[j] - q);
            }
          }
          if (beta != 0.0) {
            // g_j, then project through the softmax Jacobian.
            double g_dot_p = 0.0;
            for (int j = 0; j < v; ++j) {
              const double q = j == label ? 1.0 : 0.0;
              const double m = delta * p[j] + (1.0 - delta) * q;
              double g;
              if (m < kProbFloor) {
                g = -std::log(kProbFloor);  // clamped: log term is constant
              } else {
                g = -std::log(m) - delta * p[j] / m;
              }
              g_dot_p += g * p[j];
              dz[j] += upstream * beta * p[j] * g;  // the -<g,p> part follows
            }
            for (int j = 0; j < v; ++j) {
              dz[j] -= upstream * beta * p[j] * g_dot_p;
            }
          }
        }
      });
}

}  // namespace

double cross_entropy(std::span<const double> probs, int label) {
  check_distribution(probs, label);
  return -std::log(std::max(kProbFloor, probs[label]));
}

double dce(std::span<const double> probs, int label, double delta) {
  check_distribution(probs, label);
  if (delta <= 0.0 || delta > 1.0) {
    fail(ErrorCode::config, "dce delta must be in (0, 1]");
  }
  return dce_unchecked(probs, label, delta);
}

double in_trust(std::span<const double> probs, int label,
                const InTrustParams& params) {
  check_distribution(probs, label);
  if (params.alpha < 0.0 || params.beta < 0.0 ||
      params.alpha + params.beta <= 0.0) {
    fail(ErrorCode::config, "in_trust weights must be nonnegative, not both 0");
  }
  double loss = 0.0;
  if (params.alpha != 0.0) {
    loss += params.alpha * -std::log(std::max(kProbFloor, probs[label]));
  }
  if (params.beta != 0.0) {
    loss += params.beta * dce_unchecked(probs, label, params.delta);
  }
  return loss;
}

nn::Var CrossEntropyLoss::build(const nn::Var& logits,
                                const std::vector<int>& labels,
                                const std::vector<uint8_t>& mask) const {
  return masked_token_loss(logits, labels, mask, /*alpha=*/1.0, /*beta=*/0.0,
                           /*delta=*/1.0, label_smoothing_);
}

nn::Var InTrustLoss::build(const nn::Var& logits,
                           const std::vector<int>& labels,
                           const std::vector<uint8_t>& mask) const {
  return masked_token_loss(logits, labels, mask, params_.alpha, params_.beta,
                           params_.delta, /*label_smoothing=*/0.0);
}

}  // namespace lrnmt
