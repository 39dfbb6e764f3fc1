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
// A small pre-LN encoder-decoder transformer over the autodiff engine.
// Parameters are doubles constrained to the float32 grid, so the f32
// checkpoint blobs round-trip bit-exactly.

#ifndef LRNMT_MODEL_HPP_
#define LRNMT_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lrnmt/rng.hpp"
#include "lrnmt/tensor.hpp"
#include "lrnmt/textproc.hpp"

namespace lrnmt {

struct ModelConfig {
  int d_model = 64;
  int heads = 4;
  int d_ff = 128;
  int enc_layers = 2;
  int dec_layers = 2;
  int max_len = 64;
  int src_vocab = 0;
  int tgt_vocab = 0;
};

// Named, ordered collection of trainable tensors.
class ParamSet {
 public:
  nn::Var add_uniform(const std::string& name, std::vector<int> shape,
                      Rng& rng, double bound);
  nn::Var add_constant(const std::string& name, std::vector<int> shape,
                       double value);
  const nn::Var& get(const std::string& name) const;
  bool has(const std::string& name) const { return index_.count(name) != 0; }

  size_t size() const { return vars_.size(); }
  const std::string& name(size_t i) const { return names_[i]; }
  const nn::Var& var(size_t i) const { return vars_[i]; }
  size_t total_elements() const;

  void zero_grads();
  // FNV-1a over all parameter bytes; used for determinism checks.
  uint64_t checksum() const;

 private:
  std::vector<std::string> names_;
  std::vector<nn::Var> vars_;
  std::unordered_map<std::string, int> index_;
};

struct Seq2SeqModel {
  ModelConfig cfg;
  uint64_t src_vocab_hash = 0;
  uint64_t tgt_vocab_hash = 0;
  ParamSet params;
};

Seq2SeqModel make_seq2seq(const ModelConfig& cfg, uint64_t seed,
                          uint64_t src_vocab_hash = 0,
                          uint64_t tgt_vocab_hash = 0);

// Suffix-padded id batch. Rows of `src` (batch x src_len) and `tgt_in`
// (batch x tgt_len) are flattened row-major; `labels` aligns with `tgt_in`
// shifted by one, and `label_mask` is zero on PAD positions.
struct PaddedBatch {
  int batch = 0;
  int src_len = 0;
  int tgt_len = 0;
  std::vector<int> src;
  std::vector<int> tgt_in;
  std::vector<int> labels;
  std::vector<uint8_t> label_mask;
};

// Logits over the target vocabulary, shape [batch*tgt_len, tgt_vocab].
// Checks id ranges and max_len.
nn::Var forward_logits(const Seq2SeqModel& model, const std::vector<int>& src,
                       int batch, int src_len, const std::vector<int>& tgt_in,
                       int tgt_len);

// Ragged convenience wrapper; pads internally.
nn::Var forward_logits(const Seq2SeqModel& model,
                       const std::vector<TokenIds>& src,
                       const std::vector<TokenIds>& tgt_in);

// Sum over non-PAD target positions of log p(tgt_t | tgt_<t, src).
// `tgt` must carry BOS...EOS framing; an effectively empty target scores 0.
double log_likelihood(const Seq2SeqModel& model, const TokenIds& src,
                      const TokenIds& tgt);

// Reusable pre-LN encoder stack (also the re-ranker body). Parameter names
// are "<prefix><layer>.<leaf>" plus "<prefix>final_ln.{gain,bias}".
nn::Var encoder_stack(const ParamSet& params, const std::string& prefix,
                      nn::Var x, int batch, int len,
                      const std::vector<uint8_t>& key_mask, int heads,
                      int layers);

void init_encoder_stack_params(ParamSet& params, const std::string& prefix,
                               int d_model, int d_ff, int layers, Rng& rng);

// Checkpoints: magic "LRNMT", version, hyper block, little-endian f32
// parameter blobs, FNV-1a trailer. Loading verifies magic, version and
// trailer, and (when provided) the vocabulary content hashes.
void save_checkpoint(const Seq2SeqModel& model, const std::string& path);
Seq2SeqModel load_checkpoint(
    const std::string& path,
    std::optional<uint64_t> expect_src_hash = std::nullopt,
    std::optional<uint64_t> expect_tgt_hash = std::nullopt);

}  // namespace lrnmt

#endif  // LRNMT_MODEL_HPP_
