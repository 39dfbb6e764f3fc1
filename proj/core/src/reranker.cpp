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

#include "lrnmt/reranker.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <set>

#include "binio.hpp"
#include "lrnmt/error.hpp"
#include "lrnmt/trainer.hpp"

namespace lrnmt {

namespace {

constexpr char kMagic[5] = {'L', 'R', 'N', 'M', 'T'};
constexpr uint32_t kVersion = 1;
constexpr uint8_t kKindReranker = 2;

nn::Var leaf_vec(const std::vector<double>& v, bool needs_grad) {
  return nn::make_leaf({static_cast<int>(v.size())}, v, needs_grad);
}

nn::Var cosine_node(const nn::Var& u, const nn::Var& v) {
  nn::Var uv = nn::dot(u, v);
  nn::Var norm = nn::s_mul(nn::s_sqrt(nn::dot(u, u)),
                           nn::s_sqrt(nn::dot(v, v)));
  return nn::s_div(uv, norm);
}

// Shared graph builder for the pointwise loss and its gradients.
struct ContrastiveGraph {
  nn::Var loss;
  nn::Var x, pos;
  std::vector<nn::Var> negs;
};

ContrastiveGraph build_contrastive(const ContrastiveBatch& batch,
                                   bool needs_grad) {
  if (batch.tau <= 0.0) fail(ErrorCode::config, "tau must be positive");
  if (batch.h_negs.empty()) {
    fail(ErrorCode::config, "contrastive batch needs >= 1 negative");
  }
  auto nonzero = [](const std::vector<double>& v) {
    for (double x : v) {
      if (x != 0.0) return true;
    }
    return false;
  };
  if (!nonzero(batch.h_x) || !nonzero(batch.h_pos)) {
    fail(ErrorCode::zero_vector, "contrastive feature has zero norm");
  }
  for (const auto& n : batch.h_negs) {
    if (!nonzero(n)) fail(ErrorCode::zero_vector, "zero-norm negative");
  }

  ContrastiveGraph g;
  g.x = leaf_vec(batch.h_x, needs_grad);
  g.pos = leaf_vec(batch.h_pos, needs_grad);
  const double inv_tau = 1.0 / batch.tau;
  nn::Var s_pos = nn::scale(cosine_node(g.x, g.pos), inv_tau);
  std::vector<nn::Var> logits{s_pos};
  for (const auto& hn : batch.h_negs) {
    nn::Var neg = leaf_vec(hn, needs_grad);
    g.negs.push_back(neg);
    logits.push_back(nn::scale(cosine_node(g.x, neg), inv_tau));
  }
  g.loss = nn::s_sub(nn::logsumexp_all(nn::stack_scalars(logits)), s_pos);
  return g;
}

std::vector<std::string> sentence_tokens(const Sentence& s,
                                         TokenizerMode mode) {
  return prepare_for_scoring(s, mode);
}

TokenIds pad_or_self(const TokenIds& ids) { return ids; }

std::vector<uint8_t> nonpad_mask(const std::vector<int>& ids) {
  std::vector<uint8_t> mask(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) {
    mask[i] = ids[i] == Vocabulary::pad_id ? 0 : 1;
  }
  return mask;
}

struct Triple {
  TokenIds x;
  TokenIds pos;
  std::vector<TokenIds> negs;
};

double cosine_rows(const nn::Var& emb, int a, int b) {
  const int d = emb->shape[1];
  const double* u = emb->val.data() + static_cast<size_t>(a) * d;
  const double* v = emb->val.data() + static_cast<size_t>(b) * d;
  double uu = 0.0, vv = 0.0, uv = 0.0;
  for (int j = 0; j < d; ++j) {
    uu += u[j] * u[j];
    vv += v[j] * v[j];
    uv += u[j] * v[j];
  }
  if (uu == 0.0 || vv == 0.0) {
    fail(ErrorCode::zero_vector, "re-rank feature has zero norm");
  }
  return uv / (std::sqrt(uu) * std::sqrt(vv));
}

}  // namespace

double contrastive_loss(const ContrastiveBatch& batch) {
  nn::NoGradGuard guard;
  return build_contrastive(batch, false).loss->val[0];
}

ContrastiveGrads contrastive_loss_grads(const ContrastiveBatch& batch) {
  ContrastiveGraph g = build_contrastive(batch, true);
  nn::backward(g.loss);
  ContrastiveGrads out;
  out.loss = g.loss->val[0];
  out.d_h_x = g.x->grad;
  out.d_h_pos = g.pos->grad;
  for (const auto& n : g.negs) out.d_h_negs.push_back(n->grad);
  return out;
}

RerankEncoder make_reranker(const RerankConfig& cfg,
                            const Vocabulary& src_vocab,
                            const Vocabulary& tgt_vocab,
                            TokenizerMode src_mode, TokenizerMode tgt_mode,
                            const Seq2SeqModel* translator) {
  if (cfg.d_model % cfg.heads != 0) {
    fail(ErrorCode::config, "d_model must be divisible by heads");
  }
  RerankEncoder enc;
  enc.cfg = cfg;
  enc.src_mode = src_mode;
  enc.tgt_mode = tgt_mode;
  enc.tgt_vocab = tgt_vocab;

  // Joint surface vocabulary: source tokens first, then unseen target ones.
  std::vector<std::string> joint;
  std::set<std::string> seen;
  for (int id = Vocabulary::num_specials; id < src_vocab.size(); ++id) {
    joint.push_back(src_vocab.token(id));
    seen.insert(src_vocab.token(id));
  }
  for (int id = Vocabulary::num_specials; id < tgt_vocab.size(); ++id) {
    if (seen.insert(tgt_vocab.token(id)).second) {
      joint.push_back(tgt_vocab.token(id));
    }
  }
  enc.joint_vocab = Vocabulary::from_tokens(joint);

  Rng rng(cfg.seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(cfg.d_model));
  nn::Var tok = enc.params.add_uniform(
      "tok", {enc.joint_vocab.size(), cfg.d_model}, rng, bound);
  enc.params.add_uniform("pos", {cfg.max_len, cfg.d_model}, rng, bound);
  init_encoder_stack_params(enc.params, "enc.", cfg.d_model, cfg.d_ff,
                            cfg.layers, rng);
  enc.params.add_uniform("proj1.w", {cfg.d_model, cfg.d_model}, rng, bound);
  enc.params.add_constant("proj1.b", {cfg.d_model}, 0.0);
  enc.params.add_uniform("proj2.w", {cfg.d_model, cfg.d_proj}, rng, bound);
  enc.params.add_constant("proj2.b", {cfg.d_proj}, 0.0);

  if (translator != nullptr) {
    if (translator->cfg.d_model != cfg.d_model) {
      fail(ErrorCode::config,
           "translator embedding width does not match the re-ranker");
    }
    // Bootstrap token rows from the translation model, source side first.
    const auto& src_tok = translator->params.get("src_tok");
    const auto& tgt_tok = translator->params.get("tgt_tok");
    const int d = cfg.d_model;
    for (int id = 0; id < enc.joint_vocab.size(); ++id) {
      const std::string& t = enc.joint_vocab.token(id);
      const double* from = nullptr;
      if (Vocabulary::is_special(id)) {
        from = src_tok->val.data() + static_cast<size_t>(id) * d;
      } else if (src_vocab.contains(t)) {
        from = src_tok->val.data() +
               static_cast<size_t>(src_vocab.id(t)) * d;
      } else if (tgt_vocab.contains(t)) {
        from = tgt_tok->val.data() +
               static_cast<size_t>(tgt_vocab.id(t)) * d;
      }
      if (from != nullptr) {
        std::copy(from, from + d,
                  tok->val.begin() + static_cast<size_t>(id) * d);
      }
    }
  }
  return enc;
}

TokenIds rerank_input_ids(const RerankEncoder& enc, const Sentence& src,
                          const Sentence& cand) {
  const auto src_tokens = sentence_tokens(src, enc.src_mode);
  const auto cand_tokens = sentence_tokens(cand, enc.tgt_mode);
  TokenIds ids;
  ids.reserve(src_tokens.size() + cand_tokens.size() + 3);
  ids.push_back(Vocabulary::bos_id);
  for (const auto& t : src_tokens) ids.push_back(enc.joint_vocab.id(t));
  ids.push_back(Vocabulary::eos_id);
  for (const auto& t : cand_tokens) ids.push_back(enc.joint_vocab.id(t));
  ids.push_back(Vocabulary::eos_id);
  if (static_cast<int>(ids.size()) > enc.cfg.max_len) {
    ids.resize(enc.cfg.max_len);
  }
  return ids;
}

nn::Var rerank_embed_graph(const RerankEncoder& enc,
                           const std::vector<TokenIds>& inputs) {
  if (inputs.empty()) {
    fail(ErrorCode::shape_mismatch, "rerank_embed_graph: no inputs");
  }
  const int batch = static_cast<int>(inputs.size());
  int len = 1;
  for (const auto& seq : inputs) {
    len = std::max(len, static_cast<int>(seq.size()));
  }
  std::vector<int> flat(static_cast<size_t>(batch) * len,
                        Vocabulary::pad_id);
  for (int b = 0; b < batch; ++b) {
    std::copy(inputs[b].begin(), inputs[b].end(),
              flat.begin() + static_cast<size_t>(b) * len);
  }
  const std::vector<uint8_t> mask = nonpad_mask(flat);
  const ParamSet& p = enc.params;
  const double emb_scale = std::sqrt(static_cast<double>(enc.cfg.d_model));

  std::vector<int> pos(flat.size());
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < len; ++t) pos[static_cast<size_t>(b) * len + t] = t;
  }
  nn::Var x =
      nn::add(nn::scale(nn::rows_lookup(p.get("tok"), flat), emb_scale),
              nn::rows_lookup(p.get("pos"), pos));
  x = encoder_stack(p, "enc.", x, batch, len, mask, enc.cfg.heads,
                    enc.cfg.layers);
  nn::Var pooled = nn::mean_pool_rows(x, batch, len, mask);
  nn::Var hidden = nn::gelu(
      nn::add_rowvec(nn::matmul(pooled, p.get("proj1.w")), p.get("proj1.b")));
  return nn::add_rowvec(nn::matmul(hidden, p.get("proj2.w")),
                        p.get("proj2.b"));
}

std::vector<double> rerank_embed(const RerankEncoder& enc, const Sentence& src,
                                 const Sentence& cand) {
  nn::NoGradGuard guard;
  nn::Var emb = rerank_embed_graph(enc, {rerank_input_ids(enc, src, cand)});
  return emb->val;
}

std::vector<Sentence> mine_negatives(const Seq2SeqModel& translator,
                                     const Vocabulary& src_vocab,
                                     const Vocabulary& tgt_vocab,
                                     const Sentence& src, const Sentence& ref,
                                     const DecodeConfig& cfg, int n,
                                     uint64_t seed) {
  if (n < 1) fail(ErrorCode::config, "mine_negatives: n must be >= 1");
  const TokenizerMode src_mode = mode_for_lang(src.lang);
  const TokenizerMode tgt_mode = mode_for_lang(ref.lang);
  const auto ref_tokens = sentence_tokens(ref, tgt_mode);

  TokenIds src_ids = encode(sentence_tokens(src, src_mode), src_vocab, false);
  if (static_cast<int>(src_ids.size()) > translator.cfg.max_len - 1) {
    src_ids.resize(translator.cfg.max_len - 1);
  }
  src_ids.push_back(Vocabulary::eos_id);

  ModelScorer scorer(translator);
  std::vector<Hypothesis> hyps =
      dedup_candidates(diverse_beam_search(scorer, src_ids, cfg));
  std::sort(hyps.begin(), hyps.end(),
            [&cfg](const Hypothesis& a, const Hypothesis& b) {
              return a.normalized(cfg.length_norm) >
                     b.normalized(cfg.length_norm);
            });

  std::vector<Sentence> negatives;
  std::set<std::vector<std::string>> taken;
  for (const auto& h : hyps) {
    if (static_cast<int>(negatives.size()) >= n) break;
    const auto tokens = decode(h.ids, tgt_vocab);
    if (tokens == ref_tokens || tokens.empty()) continue;
    if (!taken.insert(tokens).second) continue;
    negatives.push_back(Sentence{detokenize(tokens, tgt_mode), ref.lang});
  }

  // Pad with token-corrupted copies of the reference.
  Rng rng(seed);
  int guard = 0;
  while (static_cast<int>(negatives.size()) < n && guard < 1000) {
    ++guard;
    std::vector<std::string> corrupted = ref_tokens;
    const int vocab_span = tgt_vocab.size() - Vocabulary::num_specials;
    if (vocab_span <= 0) break;
    const std::string random_tok = tgt_vocab.token(
        Vocabulary::num_specials +
        static_cast<int>(rng.next_below(vocab_span)));
    if (corrupted.empty()) {
      corrupted.push_back(random_tok);
    } else {
      corrupted[rng.next_below(corrupted.size())] = random_tok;
    }
    if (corrupted == ref_tokens || !taken.insert(corrupted).second) continue;
    negatives.push_back(Sentence{detokenize(corrupted, tgt_mode), ref.lang});
  }
  return negatives;
}

RerankEncoder train_reranker(
    const std::vector<std::pair<Sentence, Sentence>>& pairs,
    const Seq2SeqModel& translator, const Vocabulary& src_vocab,
    const Vocabulary& tgt_vocab, TokenizerMode src_mode,
    TokenizerMode tgt_mode, const RerankConfig& cfg,
    const DecodeConfig& decode_cfg, RerankTrainStats* stats) {
  if (pairs.empty()) fail(ErrorCode::empty_corpus, "no re-ranker pairs");
  RerankEncoder enc = make_reranker(cfg, src_vocab, tgt_vocab, src_mode,
                                    tgt_mode, &translator);

  // Negatives are mined once, with the already-trained translator.
  Rng rng(cfg.seed);
  std::vector<Triple> triples;
  triples.reserve(pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) {
    const auto& [src, ref] = pairs[i];
    const auto negs =
        mine_negatives(translator, src_vocab, tgt_vocab, src, ref, decode_cfg,
                       cfg.negatives, rng.next_u64());
    Triple t;
    t.x = rerank_input_ids(enc, src, src);
    t.pos = rerank_input_ids(enc, src, ref);
    for (const auto& neg : negs) {
      t.negs.push_back(rerank_input_ids(enc, src, neg));
    }
    if (!t.negs.empty()) triples.push_back(std::move(t));
  }
  if (triples.empty()) {
    fail(ErrorCode::empty_corpus, "no usable re-ranker triples");
  }

  TrainConfig adam;
  adam.weight_decay = cfg.weight_decay;
  AdamW opt(enc.params);
  std::vector<int> head_param(enc.params.size(), 0);
  for (size_t i = 0; i < enc.params.size(); ++i) {
    if (enc.params.name(i).rfind("proj", 0) == 0) head_param[i] = 1;
  }

  const long long steps_per_epoch =
      (static_cast<long long>(triples.size()) + cfg.batch_size - 1) /
      cfg.batch_size;
  const long long total_steps = steps_per_epoch * cfg.epochs;
  const double inv_tau = 1.0 / cfg.tau;
  if (stats) stats->epoch_loss.clear();

  long long step = 0;
  std::vector<size_t> order(triples.size());
  std::iota(order.begin(), order.end(), size_t{0});
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng erng = rng.fork(static_cast<uint64_t>(epoch));
    erng.shuffle(order);
    double epoch_loss = 0.0;
    long long batches = 0;
    for (size_t begin = 0; begin < order.size();
         begin += static_cast<size_t>(cfg.batch_size)) {
      const size_t end = std::min(
          order.size(), begin + static_cast<size_t>(cfg.batch_size));

      std::vector<TokenIds> inputs;
      std::vector<std::pair<size_t, size_t>> extents;  // (base row, negs)
      for (size_t i = begin; i < end; ++i) {
        const Triple& t = triples[order[i]];
        extents.emplace_back(inputs.size(), t.negs.size());
        inputs.push_back(t.x);
        inputs.push_back(t.pos);
        for (const auto& neg : t.negs) inputs.push_back(neg);
      }

      enc.params.zero_grads();
      nn::Var emb = rerank_embed_graph(enc, inputs);
      std::vector<nn::Var> per_triple;
      for (const auto& [base, negs] : extents) {
        nn::Var hx = nn::take_row(emb, static_cast<int>(base));
        nn::Var hp = nn::take_row(emb, static_cast<int>(base) + 1);
        std::vector<nn::Var> logits;
        nn::Var s_pos = nn::scale(cosine_node(hx, hp), inv_tau);
        logits.push_back(s_pos);
        for (size_t j = 0; j < negs; ++j) {
          nn::Var hn = nn::take_row(emb, static_cast<int>(base + 2 + j));
          logits.push_back(nn::scale(cosine_node(hx, hn), inv_tau));
        }
        per_triple.push_back(
            nn::s_sub(nn::logsumexp_all(nn::stack_scalars(logits)), s_pos));
      }
      nn::Var total = per_triple[0];
      for (size_t i = 1; i < per_triple.size(); ++i) {
        total = nn::s_add(total, per_triple[i]);
      }
      nn::Var loss =
          nn::scale(total, 1.0 / static_cast<double>(per_triple.size()));
      if (!std::isfinite(loss->val[0])) {
        fail(ErrorCode::non_finite_loss, "re-ranker loss diverged");
      }
      nn::backward(loss);

      const double t = total_steps <= 1
                           ? 0.0
                           : static_cast<double>(step) /
                                 static_cast<double>(total_steps - 1);
      const double cosine_decay =
          0.5 * (1.0 + std::cos(t * 3.14159265358979323846));
      std::vector<double> lrs(enc.params.size());
      for (size_t i = 0; i < enc.params.size(); ++i) {
        const double base = head_param[i] ? cfg.lr_head : cfg.lr_body;
        lrs[i] = cfg.lr_min + (base - cfg.lr_min) * cosine_decay;
      }
      opt.step(enc.params, adam, lrs);
      epoch_loss += loss->val[0];
      ++batches;
      ++step;
    }
    if (stats) {
      stats->epoch_loss.push_back(
          batches > 0 ? epoch_loss / static_cast<double>(batches) : 0.0);
    }
  }
  return enc;
}

std::vector<Hypothesis> rerank(const RerankEncoder& enc, const Sentence& src,
                               const std::vector<Hypothesis>& candidates) {
  if (candidates.empty()) {
    fail(ErrorCode::empty_candidates, "nothing to re-rank");
  }
  nn::NoGradGuard guard;
  std::vector<TokenIds> inputs;
  inputs.reserve(candidates.size() + 1);
  inputs.push_back(rerank_input_ids(enc, src, src));
  for (const auto& h : candidates) {
    const auto tokens = decode(h.ids, enc.tgt_vocab);
    inputs.push_back(rerank_input_ids(
        enc, src, Sentence{detokenize(tokens, enc.tgt_mode), src.lang}));
  }
  nn::Var emb = rerank_embed_graph(enc, inputs);

  std::vector<Hypothesis> out = candidates;
  for (size_t i = 0; i < out.size(); ++i) {
    out[i].score = cosine_rows(emb, 0, static_cast<int>(i) + 1);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Hypothesis& a, const Hypothesis& b) {
                     return *a.score > *b.score;
                   });
  return out;
}

void save_reranker(const RerankEncoder& enc, const std::string& path) {
  binio::Writer w(path);
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  w.u8(kKindReranker);
  w.i32(enc.cfg.d_model);
  w.i32(enc.cfg.heads);
  w.i32(enc.cfg.d_ff);
  w.i32(enc.cfg.layers);
  w.i32(enc.cfg.max_len);
  w.i32(enc.cfg.d_proj);
  w.u8(enc.src_mode == TokenizerMode::charwise ? 1 : 0);
  w.u8(enc.tgt_mode == TokenizerMode::charwise ? 1 : 0);
  auto write_vocab = [&w](const Vocabulary& v) {
    w.u32(static_cast<uint32_t>(v.size() - Vocabulary::num_specials));
    for (int id = Vocabulary::num_specials; id < v.size(); ++id) {
      w.str(v.token(id));
    }
  };
  write_vocab(enc.joint_vocab);
  write_vocab(enc.tgt_vocab);
  w.u32(static_cast<uint32_t>(enc.params.size()));
  for (size_t i = 0; i < enc.params.size(); ++i) {
    const auto& var = enc.params.var(i);
    w.str(enc.params.name(i));
    w.u32(static_cast<uint32_t>(var->shape.size()));
    for (int d : var->shape) w.i32(d);
    for (double value : var->val) w.f32(static_cast<float>(value));
  }
  w.finish_with_digest();
}

RerankEncoder load_reranker(const std::string& path) {
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
  if (r.u8() != kKindReranker) {
    fail(ErrorCode::corrupt_checkpoint, "not a re-ranker checkpoint");
  }
  RerankConfig cfg;
  cfg.d_model = r.i32();
  cfg.heads = r.i32();
  cfg.d_ff = r.i32();
  cfg.layers = r.i32();
  cfg.max_len = r.i32();
  cfg.d_proj = r.i32();
  const TokenizerMode src_mode =
      r.u8() ? TokenizerMode::charwise : TokenizerMode::word;
  const TokenizerMode tgt_mode =
      r.u8() ? TokenizerMode::charwise : TokenizerMode::word;
  auto read_vocab = [&r]() {
    const uint32_t count = r.u32();
    std::vector<std::string> tokens;
    tokens.reserve(count);
    for (uint32_t i = 0; i < count; ++i) tokens.push_back(r.str());
    return Vocabulary::from_tokens(tokens);
  };
  const Vocabulary joint = read_vocab();
  const Vocabulary tgt = read_vocab();

  // Rebuild with matching shapes, then overwrite values from the file.
  std::vector<std::string> src_like;
  for (int id = Vocabulary::num_specials; id < joint.size(); ++id) {
    src_like.push_back(joint.token(id));
  }
  RerankEncoder enc =
      make_reranker(cfg, Vocabulary::from_tokens(src_like),
                    Vocabulary::from_tokens({}), src_mode, tgt_mode, nullptr);
  enc.tgt_vocab = tgt;
  if (enc.joint_vocab.size() != joint.size()) {
    fail(ErrorCode::corrupt_checkpoint, "vocabulary reconstruction mismatch");
  }

  const uint32_t count = r.u32();
  if (count != enc.params.size()) {
    fail(ErrorCode::corrupt_checkpoint, "unexpected parameter count");
  }
  for (size_t i = 0; i < enc.params.size(); ++i) {
    const std::string name = r.str();
    if (name != enc.params.name(i)) {
      fail(ErrorCode::corrupt_checkpoint, "unexpected parameter " + name);
    }
    auto& var = enc.params.var(i);
    const uint32_t ndim = r.u32();
    std::vector<int> shape(ndim);
    for (auto& d : shape) d = r.i32();
    if (shape != var->shape) {
      fail(ErrorCode::corrupt_checkpoint, "parameter shape mismatch: " + name);
    }
    for (double& value : var->val) value = static_cast<double>(r.f32());
  }
  return enc;
}

}  // namespace lrnmt
