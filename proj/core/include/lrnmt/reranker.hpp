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
// Contrastive candidate re-ranking. A small bilingual encoder embeds
// (source, candidate) pairs through a non-linear projection head; it is
// trained with single-positive InfoNCE where the positive is the reference
// and the negatives come from diverse beam search. At inference the
// candidate whose embedding is most similar to the source's own embedding
// wins.

#ifndef LRNMT_RERANKER_HPP_
#define LRNMT_RERANKER_HPP_

#include <string>
#include <vector>

#include "lrnmt/decoding.hpp"
#include "lrnmt/model.hpp"
#include "lrnmt/textproc.hpp"

namespace lrnmt {

struct ContrastiveBatch {
  std::vector<double> h_x;                  // source feature
  std::vector<double> h_pos;                // positive candidate feature
  std::vector<std::vector<double>> h_negs;  // negative candidate features
  double tau = 0.1;
};

// Single-positive InfoNCE over cosine similarities:
//   L = -log( e^{s+/tau} / (e^{s+/tau} + sum_j e^{s-_j/tau}) )
// Equal similarities give exactly ln(n+1). Throws Error(zero_vector) on a
// zero-norm input and Error(config) on tau <= 0 or no negatives.
double contrastive_loss(const ContrastiveBatch& batch);

struct ContrastiveGrads {
  double loss = 0.0;
  std::vector<double> d_h_x;
  std::vector<double> d_h_pos;
  std::vector<std::vector<double>> d_h_negs;
};

// Analytic gradients w.r.t. every vector role, for validation and training.
ContrastiveGrads contrastive_loss_grads(const ContrastiveBatch& batch);

struct RerankConfig {
  int d_model = 64;
  int heads = 4;
  int d_ff = 128;
  int layers = 2;
  int max_len = 64;
  int d_proj = 32;
  int epochs = 15;
  int batch_size = 32;
  int negatives = 4;  // positives to negatives 1:4
  double tau = 0.1;
  double lr_body = 1e-5;
  double lr_head = 2e-4;
  double lr_min = 1e-8;
  double weight_decay = 0.01;
  uint64_t seed = 5;
};

struct RerankEncoder {
  RerankConfig cfg;
  TokenizerMode src_mode = TokenizerMode::word;
  TokenizerMode tgt_mode = TokenizerMode::word;
  Vocabulary joint_vocab;  // source and target surface forms together
  Vocabulary tgt_vocab;    // for detokenizing candidate ids
  ParamSet params;
};

// Fresh encoder over the given vocabularies. When `translator` is non-null
// its token embeddings seed the joint embedding matrix (source side wins
// for tokens present in both vocabularies).
RerankEncoder make_reranker(const RerankConfig& cfg,
                            const Vocabulary& src_vocab,
                            const Vocabulary& tgt_vocab,
                            TokenizerMode src_mode, TokenizerMode tgt_mode,
                            const Seq2SeqModel* translator);

// Joint-vocabulary input: BOS src EOS cand EOS, truncated to max_len.
TokenIds rerank_input_ids(const RerankEncoder& enc, const Sentence& src,
                          const Sentence& cand);

// Projection-head feature of one (source, candidate) pair.
std::vector<double> rerank_embed(const RerankEncoder& enc, const Sentence& src,
                                 const Sentence& cand);

// Batched graph form used in training; rows follow `inputs`.
nn::Var rerank_embed_graph(const RerankEncoder& enc,
                           const std::vector<TokenIds>& inputs);

// Diverse-beam candidates minus anything identical to the reference, best
// first; short pools are padded with token-corrupted copies of the
// reference so exactly n pairwise-distinct negatives come back.
std::vector<Sentence> mine_negatives(const Seq2SeqModel& translator,
                                     const Vocabulary& src_vocab,
                                     const Vocabulary& tgt_vocab,
                                     const Sentence& src, const Sentence& ref,
                                     const DecodeConfig& cfg, int n,
                                     uint64_t seed);

struct RerankTrainStats {
  std::vector<double> epoch_loss;
};

// Mines negatives with the frozen translator, then minimizes InfoNCE for
// cfg.epochs. The encoder body and the projection head use separate
// learning rates (cfg.lr_body / cfg.lr_head), cosine-decayed to cfg.lr_min.
RerankEncoder train_reranker(
    const std::vector<std::pair<Sentence, Sentence>>& pairs,
    const Seq2SeqModel& translator, const Vocabulary& src_vocab,
    const Vocabulary& tgt_vocab, TokenizerMode src_mode,
    TokenizerMode tgt_mode, const RerankConfig& cfg,
    const DecodeConfig& decode_cfg, RerankTrainStats* stats = nullptr);

// Scores each candidate as cos(embed(src, src), embed(src, cand)) and
// stable-sorts descending; ties keep the original rank order. The output
// is a permutation of the input with `score` filled in.
std::vector<Hypothesis> rerank(const RerankEncoder& enc, const Sentence& src,
                               const std::vector<Hypothesis>& candidates);

void save_reranker(const RerankEncoder& enc, const std::string& path);
RerankEncoder load_reranker(const std::string& path);

}  // namespace lrnmt

#endif  // LRNMT_RERANKER_HPP_
