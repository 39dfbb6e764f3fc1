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

#include "lrnmt/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "lrnmt/error.hpp"

namespace lrnmt::nn {

namespace {

thread_local int g_no_grad_depth = 0;

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

size_t shape_numel(const std::vector<int>& shape) {
  size_t n = 1;
  for (int d : shape) n *= static_cast<size_t>(d);
  return n;
}

void check_same_shape(const Var& a, const Var& b, const char* op) {
  if (a->shape != b->shape) {
    fail(ErrorCode::shape_mismatch, std::string(op) + ": shape mismatch");
  }
}

bool track(const std::vector<Var>& parents) {
  if (!grad_enabled()) return false;
  for (const auto& p : parents) {
    if (p->needs_grad) return true;
  }
  return false;
}

Var finish(std::vector<int> shape, std::vector<double> values,
           std::vector<Var> parents, std::function<void(Node&)> backward_fn) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->val = std::move(values);
  if (track(parents)) {
    node->needs_grad = true;
    node->parents = std::move(parents);
    node->backward_fn = std::move(backward_fn);
  }
  return node;
}

}  // namespace

NoGradGuard::NoGradGuard() { ++g_no_grad_depth; }
NoGradGuard::~NoGradGuard() { --g_no_grad_depth; }
bool grad_enabled() { return g_no_grad_depth == 0; }

Var make_leaf(std::vector<int> shape, std::vector<double> values,
              bool needs_grad) {
  if (shape_numel(shape) != values.size()) {
    fail(ErrorCode::shape_mismatch, "leaf: shape does not match data length");
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->val = std::move(values);
  node->needs_grad = needs_grad;
  return node;
}

Var make_scalar(double value) { return make_leaf({1}, {value}, false); }

Var make_op(std::vector<int> shape, std::vector<double> values,
            std::vector<Var> parents, std::function<void(Node&)> backward_fn) {
  if (shape_numel(shape) != values.size()) {
    fail(ErrorCode::shape_mismatch, "op: shape does not match data length");
  }
  return finish(std::move(shape), std::move(values), std::move(parents),
                std::move(backward_fn));
}

void backward(const Var& root) {
  if (root->numel() != 1) {
    fail(ErrorCode::shape_mismatch, "backward: root must be a scalar");
  }
  // Iterative DFS for reverse topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(root.get(), 0);
  visited.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next].get();
      ++next;
      if (parent->needs_grad && !visited.count(parent)) {
        visited.insert(parent);
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  for (Node* node : order) node->ensure_grad();
  root->grad[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward_fn) {
      for (auto& p : node->parents) p->ensure_grad();
      node->backward_fn(*node);
    }
  }
}

Var rows_lookup(const Var& table, const std::vector<int>& ids) {
  if (table->shape.size() != 2) {
    fail(ErrorCode::shape_mismatch, "rows_lookup: table must be 2-d");
  }
  const int num_rows = table->shape[0];
  const int dim = table->shape[1];
  const int n = static_cast<int>(ids.size());
  std::vector<double> out(static_cast<size_t>(n) * dim);
  for (int r = 0; r < n; ++r) {
    if (ids[r] < 0 || ids[r] >= num_rows) {
      fail(ErrorCode::id_out_of_range,
           "rows_lookup: id " + std::to_string(ids[r]) + " not in [0, " +
               std::to_string(num_rows) + ")");
    }
    const double* src = table->val.data() + static_cast<size_t>(ids[r]) * dim;
    std::copy(src, src + dim, out.data() + static_cast<size_t>(r) * dim);
  }
  Node* t = table.get();
  return finish({n, dim}, std::move(out), {table}, [t, ids, dim](Node& self) {
    for (size_t r = 0; r < ids.size(); ++r) {
      double* dst = t->grad.data() + static_cast<size_t>(ids[r]) * dim;
      const double* g = self.grad.data() + r * dim;
      for (int c = 0; c < dim; ++c) dst[c] += g[c];
    }
  });
}

Var matmul(const Var& a, const Var& b) {
  if (a->shape.size() != 2 || b->shape.size() != 2 ||
      a->shape[1] != b->shape[0]) {
    fail(ErrorCode::shape_mismatch, "matmul: incompatible shapes");
  }
  const int m = a->shape[0], k = a->shape[1], n = b->shape[1];
  std::vector<double> out(static_cast<size_t>(m) * n, 0.0);
  const double* av = a->val.data();
  const double* bv = b->val.data();
  for (int i = 0; i < m; ++i) {
    double* orow = out.data() + static_cast<size_t>(i) * n;
    const double* arow = av + static_cast<size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double av_ip = arow[p];
      if (av_ip == 0.0) continue;
      const double* brow = bv + static_cast<size_t>(p) * n;
      for (int j = 0; j < n; ++j) orow[j] += av_ip * brow[j];
    }
  }
  Node* an = a.get();
  Node* bn = b.get();
  return finish({m, n}, std::move(out), {a, b}, [an, bn, m, k, n](Node& self) {
    const double* g = self.grad.data();
    // dA = dC * B^T
    if (an->needs_grad) {
      for (int i = 0; i < m; ++i) {
        double* da = an->grad.data() + static_cast<size_t>(i) * k;
        const double* grow = g + static_cast<size_t>(i) * n;
        for (int p = 0; p < k; ++p) {
          const double* brow = bn->val.data() + static_cast<size_t>(p) * n;
          double acc = 0.0;
          for (int j = 0; j < n; ++j) acc += grow[j] * brow[j];
          da[p] += acc;
        }
      }
    }
    // dB = A^T * dC
    if (bn->needs_grad) {
      for (int i = 0; i < m; ++i) {
        const double* arow = an->val.data() + static_cast<size_t>(i) * k;
        const double* grow = g + static_cast<size_t>(i) * n;
        for (int p = 0; p < k; ++p) {
          const double a_ip = arow[p];
          if (a_ip == 0.0) continue;
          double* db = bn->grad.data() + static_cast<size_t>(p) * n;
          for (int j = 0; j < n; ++j) db[j] += a_ip * grow[j];
        }
      }
    }
  });
}

Var add(const Var& a, const Var& b) {
  check_same_shape(a, b, "add");
  std::vector<double> out(a->numel());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a->val[i] + b->val[i];
  Node* an = a.get();
  Node* bn = b.get();
  return finish(a->shape, std::move(out), {a, b}, [an, bn](Node& self) {
    if (an->needs_grad) {
      for (size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += self.grad[i];
    }
    if (bn->needs_grad) {
      for (size_t i = 0; i < self.grad.size(); ++i) bn->grad[i] += self.grad[i];
    }
  });
}

Var add_rowvec(const Var& x, const Var& bias) {
  if (x->shape.size() != 2 || bias->shape.size() != 1 ||
      x->shape[1] != bias->shape[0]) {
    fail(ErrorCode::shape_mismatch, "add_rowvec: incompatible shapes");
  }
  const int m = x->shape[0], n = x->shape[1];
  std::vector<double> out(x->numel());
  for (int i = 0; i < m; ++i) {
    const double* xr = x->val.data() + static_cast<size_t>(i) * n;
    double* orow = out.data() + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) orow[j] = xr[j] + bias->val[j];
  }
  Node* xn = x.get();
  Node* bn = bias.get();
  return finish({m, n}, std::move(out), {x, bias}, [xn, bn, m, n](Node& self) {
    if (xn->needs_grad) {
      for (size_t i = 0; i < self.grad.size(); ++i) xn->grad[i] += self.grad[i];
    }
    if (bn->needs_grad) {
      for (int i = 0; i < m; ++i) {
        const double* g = self.grad.data() + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) bn->grad[j] += g[j];
      }
    }
  });
}

Var mul(const Var& a, const Var& b) {
  check_same_shape(a, b, "mul");
  std::vector<double> out(a->numel());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a->val[i] * b->val[i];
  Node* an = a.get();
  Node* bn = b.get();
  return finish(a->shape, std::move(out), {a, b}, [an, bn](Node& self) {
    if (an->needs_grad) {
      for (size_t i = 0; i < self.grad.size(); ++i) {
        an->grad[i] += self.grad[i] * bn->val[i];
      }
    }
    if (bn->needs_grad) {
      for (size_t i = 0; i < self.grad.size(); ++i) {
        bn->grad[i] += self.grad[i] * an->val[i];
      }
    }
  });
}

Var scale(const Var& a, double c) {
  std::vector<double> out(a->numel());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a->val[i] * c;
  Node* an = a.get();
  return finish(a->shape, std::move(out), {a}, [an, c](Node& self) {
    for (size_t i = 0; i < self.grad.size(); ++i) {
      an->grad[i] += self.grad[i] * c;
    }
  });
}

Var gelu(const Var& x) {
  std::vector<double> out(x->numel());
  for (size_t i = 0; i < out.size(); ++i) {
    const double v = x->val[i];
    out[i] = 0.5 * v * (1.0 + std::erf(v * kInvSqrt2));
  }
  Node* xn = x.get();
  return finish(x->shape, std::move(out), {x}, [xn](Node& self) {
    for (size_t i = 0; i < self.grad.size(); ++i) {
      const double v = xn->val[i];
      const double cdf = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
      const double pdf = kInvSqrt2Pi * std::exp(-0.5 * v * v);
      xn->grad[i] += self.grad[i] * (cdf + v * pdf);
    }
  });
}

Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps) {
  if (x->shape.size() != 2 || gain->shape != std::vector<int>{x->shape[1]} ||
      bias->shape != gain->shape) {
    fail(ErrorCode::shape_mismatch, "layer_norm: incompatible shapes");
  }
  const int m = x->shape[0], n = x->shape[1];
  std::vector<double> out(x->numel());
  auto xhat = std::make_shared<std::vector<double>>(x->numel());
  auto inv_sigma = std::make_shared<std::vector<double>>(m);
  for (int i = 0; i < m; ++i) {
    const double* xr = x->val.data() + static_cast<size_t>(i) * n;
    double mean = 0.0;
    for (int j = 0; j < n; ++j) mean += xr[j];
    mean /= n;
    double var = 0.0;
    for (int j = 0; j < n; ++j) {
      const double d = xr[j] - mean;
      var += d * d;
    }
    var /= n;
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_sigma)[i] = is;
    double* xh = xhat->data() + static_cast<size_t>(i) * n;
    double* orow = out.data() + static_cast<size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      xh[j] = (xr[j] - mean) * is;
      orow[j] = xh[j] * gain->val[j] + bias->val[j];
    }
  }
  Node* xn = x.get();
  Node* gn = gain.get();
  Node* bn = bias.get();
  return finish(
      {m, n}, std::move(out), {x, gain, bias},
      [xn, gn, bn, xhat, inv_sigma, m, n](Node& self) {
        for (int i = 0; i < m; ++i) {
          const double* g = self.grad.data() + static_cast<size_t>(i) * n;
          const double* xh = xhat->data() + static_cast<size_t>(i) * n;
          if (gn->needs_grad) {
            for (int j = 0; j < n; ++j) gn->grad[j] += g[j] * xh[j];
          }
          if (bn->needs_grad) {
            for (int j = 0; j < n; ++j) bn->grad[j] += g[j];
          }
          if (xn->needs_grad) {
            // dx = (gy - mean(gy) - xhat * mean(gy*xhat)) / sigma
            double mean_gy = 0.0, mean_gyx = 0.0;
            for (int j = 0; j < n; ++j) {
              const double gy = g[j] * gn->val[j];
              mean_gy += gy;
              mean_gyx += gy * xh[j];
            }
            mean_gy /= n;
            mean_gyx /= n;
            double* dx = xn->grad.data() + static_cast<size_t>(i) * n;
            const double is = (*inv_sigma)[i];
            for (int j = 0; j < n; ++j) {
              const double gy = g[j] * gn->val[j];
              dx[j] += (gy - mean_gy - xh[j] * mean_gyx) * is;
            }
          }
        }
      });
}

Var attention(const Var& q, const Var& k, const Var& v, int batch, int heads,
              int q_len, int k_len, const std::vector<uint8_t>& key_mask,
              bool causal) {
  const int d = q->shape.size() == 2 ? q->shape[1] : -1;
  if (d <= 0 || d % heads != 0 || k->shape != std::vector<int>{batch * k_len, d} ||
      v->shape != k->shape || q->shape != std::vector<int>{batch * q_len, d} ||
      key_mask.size() != static_cast<size_t>(batch) * k_len) {
    fail(ErrorCode::shape_mismatch, "attention: incompatible shapes");
  }
  const int dh = d / heads;
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));

  // Attention probabilities are kept for the backward pass.
  auto probs = std::make_shared<std::vector<double>>(
      static_cast<size_t>(batch) * heads * q_len * k_len, 0.0);
  std::vector<double> out(static_cast<size_t>(batch) * q_len * d, 0.0);
  std::vector<double> scores(k_len);

  for (int b = 0; b < batch; ++b) {
    for (int h = 0; h < heads; ++h) {
      const int off = h * dh;
      for (int i = 0; i < q_len; ++i) {
        const double* qrow =
            q->val.data() + (static_cast<size_t>(b) * q_len + i) * d + off;
        double max_s = -1e300;
        for (int j = 0; j < k_len; ++j) {
          const bool blocked = key_mask[b * k_len + j] == 0 || (causal && j > i);
          if (blocked) {
            scores[j] = -1e300;
            continue;
          }
          const double* krow =
              k->val.data() + (static_cast<size_t>(b) * k_len + j) * d + off;
          double s = 0.0;
          for (int t = 0; t < dh; ++t) s += qrow[t] * krow[t];
          scores[j] = s * inv_sqrt_dh;
          max_s = std::max(max_s, scores[j]);
        }
        double* prow = probs->data() +
                       ((static_cast<size_t>(b) * heads + h) * q_len + i) * k_len;
        if (max_s <= -1e299) continue;  // fully masked row: zero output
        double z = 0.0;
        for (int j = 0; j < k_len; ++j) {
          if (scores[j] <= -1e299) {
            prow[j] = 0.0;
          } else {
            prow[j] = std::exp(scores[j] - max_s);
            z += prow[j];
          }
        }
        double* orow =
            out.data() + (static_cast<size_t>(b) * q_len + i) * d + off;
        for (int j = 0; j < k_len; ++j) {
          prow[j] /= z;
          if (prow[j] == 0.0) continue;
          const double* vrow =
              v->val.data() + (static_cast<size_t>(b) * k_len + j) * d + off;
          for (int t = 0; t < dh; ++t) orow[t] += prow[j] * vrow[t];
        }
      }
    }
  }

  Node* qn = q.get();
  Node* kn = k.get();
  Node* vn = v.get();
  return finish(
      {batch * q_len, d}, std::move(out), {q, k, v},
      [qn, kn, vn, probs, batch, heads, q_len, k_len, dh, d,
       inv_sqrt_dh](Node& self) {
        std::vector<double> da(k_len);
        for (int b = 0; b < batch; ++b) {
          for (int h = 0; h < heads; ++h) {
            const int off = h * dh;
            for (int i = 0; i < q_len; ++i) {
              const double* g = self.grad.data() +
                                (static_cast<size_t>(b) * q_len + i) * d + off;
              const double* prow =
                  probs->data() +
                  ((static_cast<size_t>(b) * heads + h) * q_len + i) * k_len;
              // dV and dA
              double da_dot_a = 0.0;
              for (int j = 0; j < k_len; ++j) {
                if (prow[j] == 0.0) {
                  da[j] = 0.0;
                  continue;
                }
                const double* vrow =
                    vn->val.data() +
                    (static_cast<size_t>(b) * k_len + j) * d + off;
                double acc = 0.0;
                for (int t = 0; t < dh; ++t) acc += g[t] * vrow[t];
                da[j] = acc;
                da_dot_a += acc * prow[j];
                if (vn->needs_grad) {
                  double* dv = vn->grad.data() +
                               (static_cast<size_t>(b) * k_len + j) * d + off;
                  for (int t = 0; t < dh; ++t) dv[t] += prow[j] * g[t];
                }
              }
              // dS = A * (dA - <dA, A>), then into dQ and dK
              const double* qrow =
                  qn->val.data() +
                  (static_cast<size_t>(b) * q_len + i) * d + off;
              double* dq =
                  qn->needs_grad
                      ? qn->grad.data() +
                            (static_cast<size_t>(b) * q_len + i) * d + off
                      : nullptr;
              for (int j = 0; j < k_len; ++j) {
                if (prow[j] == 0.0) continue;
                const double ds = prow[j] * (da[j] - da_dot_a) * inv_sqrt_dh;
                const double* krow =
                    kn->val.data() +
                    (static_cast<size_t>(b) * k_len + j) * d + off;
                if (dq != nullptr) {
                  for (int t = 0; t < dh; ++t) dq[t] += ds * krow[t];
                }
                if (kn->needs_grad) {
                  double* dk = kn->grad.data() +
                               (static_cast<size_t>(b) * k_len + j) * d + off;
                  for (int t = 0; t < dh; ++t) dk[t] += ds * qrow[t];
                }
              }
            }
          }
        }
      });
}

Var mean_pool_rows(const Var& x, int batch, int len,
                   const std::vector<uint8_t>& mask) {
  if (x->shape != std::vector<int>{batch * len, x->shape[1]} ||
      mask.size() != static_cast<size_t>(batch) * len) {
    fail(ErrorCode::shape_mismatch, "mean_pool_rows: incompatible shapes");
  }
  const int d = x->shape[1];
  std::vector<double> out(static_cast<size_t>(batch) * d, 0.0);
  auto counts = std::make_shared<std::vector<double>>(batch, 0.0);
  for (int b = 0; b < batch; ++b) {
    double cnt = 0.0;
    double* orow = out.data() + static_cast<size_t>(b) * d;
    for (int t = 0; t < len; ++t) {
      if (mask[b * len + t] == 0) continue;
      cnt += 1.0;
      const double* xr =
          x->val.data() + (static_cast<size_t>(b) * len + t) * d;
      for (int j = 0; j < d; ++j) orow[j] += xr[j];
    }
    if (cnt > 0.0) {
      for (int j = 0; j < d; ++j) orow[j] /= cnt;
    }
    (*counts)[b] = cnt;
  }
  Node* xn = x.get();
  return finish({batch, d}, std::move(out), {x},
                [xn, counts, batch, len, d, mask](Node& self) {
                  for (int b = 0; b < batch; ++b) {
                    const double cnt = (*counts)[b];
                    if (cnt == 0.0) continue;
                    const double* g = self.grad.data() + static_cast<size_t>(b) * d;
                    for (int t = 0; t < len; ++t) {
                      if (mask[b * len + t] == 0) continue;
                      double* dx = xn->grad.data() +
                                   (static_cast<size_t>(b) * len + t) * d;
                      for (int j = 0; j < d; ++j) dx[j] += g[j] / cnt;
                    }
                  }
                });
}

Var take_row(const Var& x, int row) {
  if (x->shape.size() != 2 || row < 0 || row >= x->shape[0]) {
    fail(ErrorCode::shape_mismatch, "take_row: bad row index");
  }
  const int n = x->shape[1];
  std::vector<double> out(x->val.begin() + static_cast<size_t>(row) * n,
                          x->val.begin() + static_cast<size_t>(row + 1) * n);
  Node* xn = x.get();
  return finish({n}, std::move(out), {x}, [xn, row, n](Node& self) {
    double* dst = xn->grad.data() + static_cast<size_t>(row) * n;
    for (int j = 0; j < n; ++j) dst[j] += self.grad[j];
  });
}

Var dot(const Var& u, const Var& v) {
  if (u->numel() != v->numel()) {
    fail(ErrorCode::shape_mismatch, "dot: length mismatch");
  }
  double acc = 0.0;
  for (size_t i = 0; i < u->numel(); ++i) acc += u->val[i] * v->val[i];
  Node* un = u.get();
  Node* vn = v.get();
  return finish({1}, {acc}, {u, v}, [un, vn](Node& self) {
    const double g = self.grad[0];
    if (un->needs_grad) {
      for (size_t i = 0; i < un->val.size(); ++i) {
        un->grad[i] += g * vn->val[i];
      }
    }
    if (vn->needs_grad) {
      for (size_t i = 0; i < vn->val.size(); ++i) {
        vn->grad[i] += g * un->val[i];
      }
    }
  });
}

Var stack_scalars(const std::vector<Var>& scalars) {
  std::vector<double> out(scalars.size());
  for (size_t i = 0; i < scalars.size(); ++i) {
    if (scalars[i]->numel() != 1) {
      fail(ErrorCode::shape_mismatch, "stack_scalars: inputs must be scalars");
    }
    out[i] = scalars[i]->val[0];
  }
  std::vector<Node*> raw;
  raw.reserve(scalars.size());
  for (const auto& s : scalars) raw.push_back(s.get());
  return finish({static_cast<int>(scalars.size())}, std::move(out), scalars,
                [raw](Node& self) {
                  for (size_t i = 0; i < raw.size(); ++i) {
                    if (raw[i]->needs_grad) raw[i]->grad[0] += self.grad[i];
                  }
                });
}

Var logsumexp_all(const Var& x) {
  double max_v = -1e300;
  for (double v : x->val) max_v = std::max(max_v, v);
  double z = 0.0;
  for (double v : x->val) z += std::exp(v - max_v);
  const double lse = max_v + std::log(z);
  auto softmax = std::make_shared<std::vector<double>>(x->numel());
  for (size_t i = 0; i < x->numel(); ++i) {
    (*softmax)[i] = std::exp(x->val[i] - lse);
  }
  Node* xn = x.get();
  return finish({1}, {lse}, {x}, [xn, softmax](Node& self) {
    for (size_t i = 0; i < xn->val.size(); ++i) {
      xn->grad[i] += self.grad[0] * (*softmax)[i];
    }
  });
}

namespace {
void check_scalar(const Var& a, const char* op) {
  if (a->numel() != 1) {
    fail(ErrorCode::shape_mismatch, std::string(op) + ": scalar expected");
  }
}
}  // namespace

Var s_add(const Var& a, const Var& b) {
  check_scalar(a, "s_add");
  check_scalar(b, "s_add");
  Node* an = a.get();
  Node* bn = b.get();
  return finish({1}, {a->val[0] + b->val[0]}, {a, b}, [an, bn](Node& self) {
    if (an->needs_grad) an->grad[0] += self.grad[0];
    if (bn->needs_grad) bn->grad[0] += self.grad[0];
  });
}

Var s_sub(const Var& a, const Var& b) {
  check_scalar(a, "s_sub");
  check_scalar(b, "s_sub");
  Node* an = a.get();
  Node* bn = b.get();
  return finish({1}, {a->val[0] - b->val[0]}, {a, b}, [an, bn](Node& self) {
    if (an->needs_grad) an->grad[0] += self.grad[0];
    if (bn->needs_grad) bn->grad[0] -= self.grad[0];
  });
}

Var s_mul(const Var& a, const Var& b) {
  check_scalar(a, "s_mul");
  check_scalar(b, "s_mul");
  Node* an = a.get();
  Node* bn = b.get();
  return finish({1}, {a->val[0] * b->val[0]}, {a, b}, [an, bn](Node& self) {
    if (an->needs_grad) an->grad[0] += self.grad[0] * bn->val[0];
    if (bn->needs_grad) bn->grad[0] += self.grad[0] * an->val[0];
  });
}

Var s_div(const Var& a, const Var& b) {
  check_scalar(a, "s_div");
  check_scalar(b, "s_div");
  Node* an = a.get();
  Node* bn = b.get();
  return finish({1}, {a->val[0] / b->val[0]}, {a, b}, [an, bn](Node& self) {
    const double inv = 1.0 / bn->val[0];
    if (an->needs_grad) an->grad[0] += self.grad[0] * inv;
    if (bn->needs_grad) {
      bn->grad[0] -= self.grad[0] * an->val[0] * inv * inv;
    }
  });
}

Var s_sqrt(const Var& a) {
  check_scalar(a, "s_sqrt");
  const double root = std::sqrt(a->val[0]);
  Node* an = a.get();
  return finish({1}, {root}, {a}, [an, root](Node& self) {
    an->grad[0] += self.grad[0] * 0.5 / root;
  });
}

void round_to_f32(std::vector<double>& values) {
  for (double& v : values) v = static_cast<double>(static_cast<float>(v));
}

}  // namespace lrnmt::nn
