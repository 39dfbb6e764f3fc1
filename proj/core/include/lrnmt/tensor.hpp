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
// A small reverse-mode automatic differentiation engine. Values are dense
// row-major double tensors; graphs are rebuilt per step and freed when the
// last Var goes out of scope. Single-threaded by construction, so results
// are bit-reproducible.

#ifndef LRNMT_TENSOR_HPP_
#define LRNMT_TENSOR_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace lrnmt::nn {

class Node;
using Var = std::shared_ptr<Node>;

class Node {
 public:
  std::vector<int> shape;
  std::vector<double> val;
  std::vector<double> grad;  // sized lazily, same length as val
  bool needs_grad = false;
  std::vector<Var> parents;
  // Reads this node's grad and accumulates into the parents' grads.
  std::function<void(Node&)> backward_fn;

  size_t numel() const { return val.size(); }
  void ensure_grad() {
    if (grad.size() != val.size()) grad.assign(val.size(), 0.0);
  }
  void zero_grad() { grad.assign(val.size(), 0.0); }
};

// While a guard is alive no backward closures are recorded; forward values
// are computed as usual. Used for decoding and evaluation.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;
};
bool grad_enabled();

Var make_leaf(std::vector<int> shape, std::vector<double> values,
              bool needs_grad);
Var make_scalar(double value);

// Generic hook for fused ops (losses build their own nodes with this).
Var make_op(std::vector<int> shape, std::vector<double> values,
            std::vector<Var> parents, std::function<void(Node&)> backward_fn);

// Seeds root (a scalar) with gradient 1 and runs reverse topological order.
void backward(const Var& root);

// ---- tensor ops ----

// Gathers rows of a [V, d] table; out[r] = table[ids[r]].
Var rows_lookup(const Var& table, const std::vector<int>& ids);

Var matmul(const Var& a, const Var& b);              // [m,k] x [k,n]
Var add(const Var& a, const Var& b);                 // same shape
Var add_rowvec(const Var& x, const Var& bias);       // [m,n] + [n]
Var mul(const Var& a, const Var& b);                 // elementwise
Var scale(const Var& a, double c);
Var gelu(const Var& x);                              // exact erf form
Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps);

// Multi-head scaled dot-product attention over flattened [batch*len, d]
// activations. key_mask has batch*k_len entries, nonzero = attendable.
// causal additionally restricts query i to keys j <= i.
Var attention(const Var& q, const Var& k, const Var& v, int batch, int heads,
              int q_len, int k_len, const std::vector<uint8_t>& key_mask,
              bool causal);

// Masked mean over each sequence's rows: [batch*len, d] -> [batch, d].
Var mean_pool_rows(const Var& x, int batch, int len,
                   const std::vector<uint8_t>& mask);

Var take_row(const Var& x, int row);                 // [m,n] -> [n]

// ---- vector/scalar ops (shapes [n] and [1]) ----

Var dot(const Var& u, const Var& v);
Var stack_scalars(const std::vector<Var>& scalars);  // k x [1] -> [k]
Var logsumexp_all(const Var& x);                     // [n] -> [1]
Var s_add(const Var& a, const Var& b);
Var s_sub(const Var& a, const Var& b);
Var s_mul(const Var& a, const Var& b);
Var s_div(const Var& a, const Var& b);
Var s_sqrt(const Var& a);

// Rounds every element to the nearest float32; model parameters live on
// this grid so checkpoints (f32 blobs) round-trip bit-exactly.
void round_to_f32(std::vector<double>& values);

}  // namespace lrnmt::nn

#endif  // LRNMT_TENSOR_HPP_
