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

#include "lrnmt/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "binio.hpp"
#include "lrnmt/error.hpp"

namespace lrnmt {

namespace {

constexpr char kMagic[5] = {'L', 'R', 'N', 'M', 'T'};
constexpr uint32_t kVersion = 1;
constexpr uint8_t kKindSeq2seq = 1;
constexpr double kLnEps = 1e-5;

void check_ids(const std::vector<int>& ids, int vocab, const char* side) {
  for (int id : ids) {
    if (id < 0 || id >= vocab) {
      fail(ErrorCode::id_out_of_range,
           std::string(side) + " id " + std::to_string(id) +
               " outside vocabulary of size " + std::to_string(vocab));
    }
  }
}

std::vector<uint8_t> pad_mask(const std::vector<int>& ids) {
  std::vector<uint8_t> mask(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) {
    mask[i] = ids[i] == Vocabulary::pad_id ? 0 : 1;
  }
  return mask;
}

std::vector<int> positions(int batch, int len) {
  std::vector<int> pos(static_cast<size_t>(batch) * len);
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < len; ++t) pos[static_cast<size_t>(b) * len + t] = t;
  }
  return pos;
}

nn::Var linear(const ParamSet& p, const std::string& name, const nn::Var& x) {
  return nn::add_rowvec(nn::matmul(x, p.get(name + ".w")), p.get(name + ".b"));
}

nn::Var attention_block(const ParamSet& p, const std::string& prefix,
                        const nn::Var& q_in, const nn::Var& kv_in, int batch,
                        int heads, int q_len, int k_len,
                        const std::vector<uint8_t>& key_mask, bool causal) {
  nn::Var q = linear(p, prefix + ".q", q_in);
  nn::Var k = linear(p, prefix + ".k", kv_in);
  nn::Var v = linear(p, prefix + ".v", kv_in);
  nn::Var ctx =
      nn::attention(q, k, v, batch, heads, q_len, k_len, key_mask, causal);
  return linear(p, prefix + ".o", ctx);
}

nn::Var ff_block(const ParamSet& p, const std::string& prefix,
                 const nn::Var& x) {
  return linear(p, prefix + ".ff2", nn::gelu(linear(p, prefix + ".ff1", x)));
}

void init_linear(ParamSet& p, const std::string& name, int in, int out,
                 Rng& rng, double bound) {
  p.add_uniform(name + ".w", {in, out}, rng, bound);
  p.add_constant(name + ".b", {out}, 0.0);
}

void init_ln(ParamSet& p, const std::string& name, int d) {
  p.add_constant(name + ".gain", {d}, 1.0);
  p.add_constant(name + ".bias", {d}, 0.0);
}

}  // namespace

nn::Var ParamSet::add_uniform(const std::string& name, std::vector<int> shape,
                              Rng& rng, double bound) {
  size_t n = 1;
  for (int d : shape) n *= static_cast<size_t>(d);
  std::vector<double> values(n);
  for (double& v : values) v = rng.next_range(-bound, bound);
  nn::round_to_f32(values);
  auto var = nn::make_leaf(std::move(shape), std::move(values), true);
  index_[name] = static_cast<int>(vars_.size());
  names_.push_back(name);
  vars_.push_back(var);
  return var;
}

nn::Var ParamSet::add_constant(const std::string& name, std::vector<int> shape,
                               double value) {
  size_t n = 1;
  for (int d : shape) n *= static_cast<size_t>(d);
  std::vector<double> values(n, value);
  nn::round_to_f32(values);
  auto var = nn::make_leaf(std::move(shape), std::move(values), true);
  index_[name] = static_cast<int>(vars_.size());
  names_.push_back(name);
  vars_.push_back(var);
  return var;
}

const nn::Var& ParamSet::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    fail(ErrorCode::config, "unknown parameter: " + name);
  }
  return vars_[it->second];
}

size_t ParamSet::total_elements() const {
  size_t n = 0;
  for (const auto& v : vars_) n += v->numel();
  return n;
}

void ParamSet::zero_grads() {
  for (auto& v : vars_) v->zero_grad();
}

uint64_t ParamSet::checksum() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& v : vars_) {
    for (double d : v->val) {
      const float f = static_cast<float>(d);
      unsigned char bytes[4];
      std::memcpy(bytes, &f, 4);
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
      }
    }
  }
  return h;
}

void init_encoder_stack_params(ParamSet& params, const std::string& prefix,
                               int d_model, int d_ff, int layers, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(d_model));
  for (int l = 0; l < layers; ++l) {
    const std::string lp = prefix + std::to_string(l);
    init_ln(params, lp + ".ln1", d_model);
    init_linear(params, lp + ".attn.q", d_model, d_model, rng, bound);
    init_linear(params, lp + ".attn.k", d_model, d_model, rng, bound);
    init_linear(params, lp + ".attn.v", d_model, d_model, rng, bound);
    init_linear(params, lp + ".attn.o", d_model, d_model, rng, bound);
    init_ln(params, lp + ".ln2", d_model);
    init_linear(params, lp + ".ff1", d_model, d_ff, rng, bound);
    init_linear(params, lp + ".ff2", d_ff, d_model, rng, bound);
  }
  init_ln(params, prefix + "final_ln", d_model);
}

nn::Var encoder_stack(const ParamSet& params, const std::string& prefix,
                      nn::Var x, int batch, int len,
                      const std::vector<uint8_t>& key_mask, int heads,
                      int layers) {
  for (int l = 0; l < layers; ++l) {
    const std::string lp = prefix + std::to_string(l);
    nn::Var h1 = nn::layer_norm(x, params.get(lp + ".ln1.gain"),
                                params.get(lp + ".ln1.bias"), kLnEps);
    x = nn::add(x, attention_block(params, lp + ".attn", h1, h1, batch, heads,
                                   len, len, key_mask, /*causal=*/false));
    nn::Var h2 = nn::layer_norm(x, params.get(lp + ".ln2.gain"),
                                params.get(lp + ".ln2.bias"), kLnEps);
    x = nn::add(x, ff_block(params, lp, h2));
  }
  return nn::layer_norm(x, params.get(prefix + "final_ln.gain"),
                        params.get(prefix + "final_ln.bias"), kLnEps);
}

Seq2SeqModel make_seq2seq(const ModelConfig& cfg, uint64_t seed,
                          uint64_t src_vocab_hash, uint64_t tgt_vocab_hash) {
  if (cfg.src_vocab <= 0 || cfg.tgt_vocab <= 0) {
    fail(ErrorCode::config, "model requires positive vocabulary sizes");
  }
  if (cfg.d_model % cfg.heads != 0) {
    fail(ErrorCode::config, "d_model must be divisible by heads");
  }
  Seq2SeqModel model;
  model.cfg = cfg;
  model.src_vocab_hash = src_vocab_hash;
  model.tgt_vocab_hash = tgt_vocab_hash;

  Rng rng(seed);
  ParamSet& p = model.params;
  const double bound = 1.0 / std::sqrt(static_cast<double>(cfg.d_model));
  p.add_uniform("src_tok", {cfg.src_vocab, cfg.d_model}, rng, bound);
  p.add_uniform("src_pos", {cfg.max_len, cfg.d_model}, rng, bound);
  p.add_uniform("tgt_tok", {cfg.tgt_vocab, cfg.d_model}, rng, bound);
  p.add_uniform("tgt_pos", {cfg.max_len, cfg.d_model}, rng, bound);
  init_encoder_stack_params(p, "enc.", cfg.d_model, cfg.d_ff, cfg.enc_layers,
                            rng);
  for (int l = 0; l < cfg.dec_layers; ++l) {
    const std::string lp = "dec." + std::to_string(l);
    init_ln(p, lp + ".ln1", cfg.d_model);
    init_linear(p, lp + ".self.q", cfg.d_model, cfg.d_model, rng, bound);
    init_linear(p, lp + ".self.k", cfg.d_model, cfg.d_model, rng, bound);
    init_linear(p, lp + ".self.v", cfg.d_model, cfg.d_model, rng, bound);
    init_linear(p, lp + ".self.o", cfg.d_model, cfg.d_model, rng, bound);
    init_ln(p, lp + ".ln2", cfg.d_model);
    init_linear(p, lp + ".cross.q", cfg.d_model, cfg.d_model, rng, bound);
    init_linear(p, lp + ".cross.k", cfg.d_model, cfg.d_model, rng, bound);
    init_linear(p, lp + ".cross.v", cfg.d_model, cfg.d_model, rng, bound);
    init_linear(p, lp + ".cross.o", cfg.d_model, cfg.d_model, rng, bound);
    init_ln(p, lp + ".ln3", cfg.d_model);
    init_linear(p, lp + ".ff1", cfg.d_model, cfg.d_ff, rng, bound);
    init_linear(p, lp + ".ff2", cfg.d_ff, cfg.d_model, rng, bound);
  }
  init_ln(p, "dec.final_ln", cfg.d_model);
  init_linear(p, "out", cfg.d_model, cfg.tgt_vocab, rng, bound);
  return model;
}

nn::Var forward_logits(const Seq2SeqModel& model, const std::vector<int>& src,
                       int batch, int src_len, const std::vector<int>& tgt_in,
                       int tgt_len) {
  const ModelConfig& cfg = model.cfg;
  if (batch <= 0 || src_len <= 0 || tgt_len <= 0) {
    fail(ErrorCode::shape_mismatch, "forward: empty batch");
  }
  if (src.size() != static_cast<size_t>(batch) * src_len ||
      tgt_in.size() != static_cast<size_t>(batch) * tgt_len) {
    fail(ErrorCode::shape_mismatch, "forward: id buffers do not match dims");
  }
  if (src_len > cfg.max_len || tgt_len > cfg.max_len) {
    fail(ErrorCode::shape_mismatch, "forward: sequence exceeds max_len");
  }
  check_ids(src, cfg.src_vocab, "source");
  check_ids(tgt_in, cfg.tgt_vocab, "target");

  const ParamSet& p = model.params;
  const double emb_scale = std::sqrt(static_cast<double>(cfg.d_model));
  const std::vector<uint8_t> src_mask = pad_mask(src);
  const std::vector<uint8_t> tgt_mask = pad_mask(tgt_in);

  nn::Var x = nn::add(
      nn::scale(nn::rows_lookup(p.get("src_tok"), src), emb_scale),
      nn::rows_lookup(p.get("src_pos"), positions(batch, src_len)));
  nn::Var memory =
      encoder_stack(p, "enc.", x, batch, src_len, src_mask, cfg.heads,
                    cfg.enc_layers);

  nn::Var y = nn::add(
      nn::scale(nn::rows_lookup(p.get("tgt_tok"), tgt_in), emb_scale),
      nn::rows_lookup(p.get("tgt_pos"), positions(batch, tgt_len)));
  for (int l = 0; l < cfg.dec_layers; ++l) {
    const std::string lp = "dec." + std::to_string(l);
    nn::Var h1 = nn::layer_norm(y, p.get(lp + ".ln1.gain"),
                                p.get(lp + ".ln1.bias"), kLnEps);
    y = nn::add(y, attention_block(p, lp + ".self", h1, h1, batch, cfg.heads,
                                   tgt_len, tgt_len, tgt_mask,
                                   /*causal=*/true));
    nn::Var h2 = nn::layer_norm(y, p.get(lp + ".ln2.gain"),
                                p.get(lp + ".ln2.bias"), kLnEps);
    y = nn::add(y, attention_block(p, lp + ".cross", h2, memory, batch,
                                   cfg.heads, tgt_len, src_len, src_mask,
                                   /*causal=*/false));
    nn::Var h3 = nn::layer_norm(y, p.get(lp + ".ln3.gain"),
                                p.get(lp + ".ln3.bias"), kLnEps);
    y = nn::add(y, ff_block(p, lp, h3));
  }
  y = nn::layer_norm(y, p.get("dec.final_ln.gain"), p.get("dec.final_ln.bias"),
                     kLnEps);
  return linear(p, "out", y);
}

nn::Var forward_logits(const Seq2SeqModel& model,
                       const std::vector<TokenIds>& src,
                       const std::vector<TokenIds>& tgt_in) {
  if (src.size() != tgt_in.size() || src.empty()) {
    fail(ErrorCode::shape_mismatch, "forward: batch lists must align");
  }
  const int batch = static_cast<int>(src.size());
  int src_len = 1, tgt_len = 1;
  for (const auto& s : src) src_len = std::max(src_len, (int)s.size());
  for (const auto& t : tgt_in) tgt_len = std::max(tgt_len, (int)t.size());
  std::vector<int> src_flat(static_cast<size_t>(batch) * src_len,
                            Vocabulary::pad_id);
  std::vector<int> tgt_flat(static_cast<size_t>(batch) * tgt_len,
                            Vocabulary::pad_id);
  for (int b = 0; b < batch; ++b) {
    std::copy(src[b].begin(), src[b].end(),
              src_flat.begin() + static_cast<size_t>(b) * src_len);
    std::copy(tgt_in[b].begin(), tgt_in[b].end(),
              tgt_flat.begin() + static_cast<size_t>(b) * tgt_len);
  }
  return forward_logits(model, src_flat, batch, src_len, tgt_flat, tgt_len);
}

double log_likelihood(const Seq2SeqModel& model, const TokenIds& src,
                      const TokenIds& tgt) {
  if (tgt.size() < 2) return 0.0;
  nn::NoGradGuard guard;
  const TokenIds tgt_in(tgt.begin(), tgt.end() - 1);
  nn::Var logits = forward_logits(model, {src}, {tgt_in});
  const int v = model.cfg.tgt_vocab;
  double total = 0.0;
  for (size_t t = 0; t + 1 < tgt.size(); ++t) {
    const int label = tgt[t + 1];
    if (label == Vocabulary::pad_id) continue;
    const double* row = logits->val.data() + t * v;
    double max_z = row[0];
    for (int j = 1; j < v; ++j) max_z = std::max(max_z, row[j]);
    double z = 0.0;
    for (int j = 0; j < v; ++j) z += std::exp(row[j] - max_z);
    total += row[label] - max_z - std::log(z);
  }
  return total;
}

void save_checkpoint(const Seq2SeqModel& model, const std::string& path) {
  binio::Writer w(path);
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  w.u8(kKindSeq2seq);
  w.i32(model.cfg.d_model);
  w.i32(model.cfg.heads);
  w.i32(model.cfg.d_ff);
  w.i32(model.cfg.enc_layers);
  w.i32(model.cfg.dec_layers);
  w.i32(model.cfg.max_len);
  w.i32(model.cfg.src_vocab);
  w.i32(model.cfg.tgt_vocab);
  w.u64(model.src_vocab_hash);
  w.u64(model.tgt_vocab_hash);
  w.u32(static_cast<uint32_t>(model.params.size()));
  for (size_t i = 0; i < model.params.size(); ++i) {
    const auto& var = model.params.var(i);
    w.str(model.params.name(i));
    w.u32(static_cast<uint32_t>(var->shape.size()));
    for (int d : var->shape) w.i32(d);
    for (double value : var->val) w.f32(static_cast<float>(value));
  }
  w.finish_with_digest();
}

Seq2SeqModel load_checkpoint(const std::string& path,
                             std::optional<uint64_t> expect_src_hash,
                             std::optional<uint64_t> expect_tgt_hash) {
  binio::Reader r(path);
  r.verify_digest();
  char magic[5];
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    fail(ErrorCode::corrupt_checkpoint, "bad checkpoint magic");
  }
  if (r.u32() != kVersion) {
    fail(ErrorCode::corrupt_checkpoint, "unsupported checkpoint version");
  }
  if (r.u8() != kKindSeq2seq) {
    fail(ErrorCode::corrupt_checkpoint, "not a seq2seq checkpoint");
  }
  ModelConfig cfg;
  cfg.d_model = r.i32();
  cfg.heads = r.i32();
  cfg.d_ff = r.i32();
  cfg.enc_layers = r.i32();
  cfg.dec_layers = r.i32();
  cfg.max_len = r.i32();
  cfg.src_vocab = r.i32();
  cfg.tgt_vocab = r.i32();
  const uint64_t src_hash = r.u64();
  const uint64_t tgt_hash = r.u64();
  if ((expect_src_hash && *expect_src_hash != src_hash) ||
      (expect_tgt_hash && *expect_tgt_hash != tgt_hash)) {
    fail(ErrorCode::corrupt_checkpoint,
         "checkpoint was trained with a different vocabulary");
  }

  Seq2SeqModel model = make_seq2seq(cfg, /*seed=*/0, src_hash, tgt_hash);
  const uint32_t count = r.u32();
  if (count != model.params.size()) {
    fail(ErrorCode::corrupt_checkpoint, "unexpected parameter count");
  }
  for (size_t i = 0; i < model.params.size(); ++i) {
    const std::string name = r.str();
    if (name != model.params.name(i)) {
      fail(ErrorCode::corrupt_checkpoint, "unexpected parameter " + name);
    }
    auto& var = model.params.var(i);
    const uint32_t ndim = r.u32();
    std::vector<int> shape(ndim);
    for (auto& d : shape) d = r.i32();
    if (shape != var->shape) {
      fail(ErrorCode::corrupt_checkpoint, "parameter shape mismatch: " + name);
    }
    for (double& value : var->val) value = static_cast<double>(r.f32());
  }
  return model;
}

}  // namespace lrnmt
