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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "lrnmt/error.hpp"
#include "lrnmt/rng.hpp"

using namespace lrnmt;

namespace {

// Direct per-class summation, written independently of the library path.
double dce_oracle(const std::vector<double>& p, int label, double delta) {
  double loss = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const double q = static_cast<int>(i) == label ? 1.0 : 0.0;
    loss -= p[i] * std::log(std::max(1e-12, delta * p[i] + (1 - delta) * q));
  }
  return loss;
}

std::vector<double> random_distribution(Rng& rng, int n) {
  std::vector<double> p(n);
  double sum = 0.0;
  for (auto& x : p) {
    x = 0.05 + rng.next_double();
    sum += x;
  }
  for (auto& x : p) x /= sum;
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("losses");

TEST_CASE("cross entropy basics") {
  CHECK(cross_entropy(std::vector<double>{0.0, 1.0, 0.0}, 1) ==
        doctest::Approx(0.0));
  CHECK(cross_entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}, 2) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));
  // Zero probability clamps at 1e-12: ceiling of 12 ln 10.
  CHECK(cross_entropy(std::vector<double>{0.0, 1.0}, 0) ==
        doctest::Approx(12.0 * std::log(10.0)).epsilon(1e-9));
}

TEST_CASE("cross entropy validates the distribution") {
  CHECK_THROWS_AS(cross_entropy(std::vector<double>{0.5, 0.4}, 0), Error);
  CHECK_THROWS_AS(cross_entropy(std::vector<double>{0.5, 0.5}, 2), Error);
  CHECK_THROWS_AS(cross_entropy(std::vector<double>{1.5, -0.5}, 0), Error);
}

TEST_CASE("dce closed-form values") {
  // One-hot p on the correct label: -1 * log(delta + 1 - delta) = 0.
  CHECK(dce(std::vector<double>{0.0, 1.0}, 1, 0.5) == doctest::Approx(0.0));
  // Uniform p over V=2, delta=0.5: -(0.5 ln 0.75 + 0.5 ln 0.25) = 0.83699.
  CHECK(dce(std::vector<double>{0.5, 0.5}, 0, 0.5) ==
        doctest::Approx(0.83699).epsilon(1e-5));
  // delta=1 reduces to the entropy of p, independent of the label.
  const std::vector<double> p{0.2, 0.3, 0.5};
  double entropy = 0.0;
  for (double x : p) entropy -= x * std::log(x);
  CHECK(dce(p, 0, 1.0) == doctest::Approx(entropy).epsilon(1e-12));
  CHECK(dce(p, 2, 1.0) == doctest::Approx(entropy).epsilon(1e-12));
}

TEST_CASE("dce matches the summation oracle to 1e-6") {
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(8));
    const auto p = random_distribution(rng, n);
    const int label = static_cast<int>(rng.next_below(n));
    const double delta = 0.1 + 0.9 * rng.next_double();
    CHECK(dce(p, label, delta) ==
          doctest::Approx(dce_oracle(p, label, delta)).epsilon(1e-6));
  }
}

TEST_CASE("dce is nonnegative and zero only at a one-hot correct p") {
  Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_distribution(rng, 4);
    const int label = static_cast<int>(rng.next_below(4));
    CHECK(dce(p, label, 0.5) > 0.0);
  }
  CHECK(dce(std::vector<double>{1.0, 0.0, 0.0}, 0, 0.5) ==
        doctest::Approx(0.0));
}

TEST_CASE("dce permutation equivariance") {
  Rng rng(44);
  const auto p = random_distribution(rng, 5);
  const double base = dce(p, 2, 0.4);
  // Swap classes 0 and 2 together with the label.
  std::vector<double> swapped = p;
  std::swap(swapped[0], swapped[2]);
  CHECK(dce(swapped, 0, 0.4) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("composite loss reduces to its parts") {
  Rng rng(45);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(6));
    const auto p = random_distribution(rng, n);
    const int label = static_cast<int>(rng.next_below(n));
    CHECK(in_trust(p, label, {1.0, 0.0, 0.5}) ==
          doctest::Approx(cross_entropy(p, label)).epsilon(1e-15));
    CHECK(in_trust(p, label, {0.0, 1.0, 0.5}) ==
          doctest::Approx(dce(p, label, 0.5)).epsilon(1e-15));
  }
}

TEST_CASE("composite loss at the documented point") {
  // alpha=1, beta=1, delta=0.5, uniform p over V=2, correct label:
  // ln 2 + 0.83699 = 1.53014.
  CHECK(in_trust(std::vector<double>{0.5, 0.5}, 0, {1.0, 1.0, 0.5}) ==
        doctest::Approx(1.53014).epsilon(1e-5));
}

TEST_CASE("sequence losses agree with the pointwise forms") {
  Rng rng(46);
  const int rows = 6, vocab = 5;
  std::vector<double> logits(rows * vocab);
  for (auto& z : logits) z = rng.next_range(-2.0, 2.0);
  std::vector<int> labels(rows);
  std::vector<uint8_t> mask(rows, 1);
  mask[4] = 0;  // one masked row must not contribute
  for (auto& l : labels) l = static_cast<int>(rng.next_below(vocab));

  auto logits_var = nn::make_leaf({rows, vocab}, logits, false);
  const InTrustParams params{1.0, 1.0, 0.5};
  const double got =
      InTrustLoss(params).build(logits_var, labels, mask)->val[0];

  double expected = 0.0;
  int count = 0;
  for (int t = 0; t < rows; ++t) {
    if (!mask[t]) continue;
    std::vector<double> p(vocab);
    double z = 0.0;
    for (int j = 0; j < vocab; ++j) z += std::exp(logits[t * vocab + j]);
    for (int j = 0; j < vocab; ++j) p[j] = std::exp(logits[t * vocab + j]) / z;
    expected += in_trust(p, labels[t], params);
    ++count;
  }
  CHECK(got == doctest::Approx(expected / count).epsilon(1e-9));
}

TEST_CASE("sequence loss gradient matches finite differences") {
  Rng rng(47);
  const int rows = 4, vocab = 6;
  std::vector<double> logits(rows * vocab);
  for (auto& z : logits) z = rng.next_range(-1.5, 1.5);
  std::vector<int> labels(rows);
  for (auto& l : labels) l = static_cast<int>(rng.next_below(vocab));
  std::vector<uint8_t> mask(rows, 1);
  mask[1] = 0;

  for (const InTrustParams params :
       {InTrustParams{1.0, 0.0, 0.5}, InTrustParams{0.0, 1.0, 0.5},
        InTrustParams{1.0, 1.0, 0.3}}) {
    auto var = nn::make_leaf({rows, vocab}, logits, true);
    InTrustLoss loss(params);
    auto out = loss.build(var, labels, mask);
    nn::backward(out);
    const double eps = 1e-6;
    double worst = 0.0;
    for (int i = 0; i < rows * vocab; ++i) {
      auto probe = logits;
      probe[i] += eps;
      const double plus =
          loss.build(nn::make_leaf({rows, vocab}, probe, false), labels, mask)
              ->val[0];
      probe[i] -= 2 * eps;
      const double minus =
          loss.build(nn::make_leaf({rows, vocab}, probe, false), labels, mask)
              ->val[0];
      const double numeric = (plus - minus) / (2 * eps);
      const double denom =
          std::max(1e-8, std::abs(numeric) + std::abs(var->grad[i]));
      worst = std::max(worst, std::abs(numeric - var->grad[i]) / denom);
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("all-masked batch yields zero loss and zero gradient") {
  auto var = nn::make_leaf({2, 3}, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, true);
  const std::vector<int> labels{0, 1};
  const std::vector<uint8_t> mask{0, 0};
  auto out = CrossEntropyLoss().build(var, labels, mask);
  CHECK(out->val[0] == 0.0);
  nn::backward(out);
  for (double g : var->grad) CHECK(g == 0.0);
}

TEST_CASE("label smoothing shifts the target distribution") {
  auto var = nn::make_leaf({1, 4}, {0.0, 0.0, 0.0, 0.0}, true);
  const std::vector<int> labels{2};
  const std::vector<uint8_t> mask{1};
  // Uniform logits: smoothed CE over V=4 equals ln 4 regardless of ls.
  CHECK(CrossEntropyLoss(0.1).build(var, labels, mask)->val[0] ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_SUITE_END();
