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

#include "lrnmt/curriculum.hpp"

#include <algorithm>

#include "httplib.h"
#include "json.hpp"
#include "lrnmt/error.hpp"

namespace lrnmt {

namespace {

std::vector<EncodedPair> encode_stage(const std::vector<TokenPair>& data,
                                      const Vocabulary& src_vocab,
                                      const Vocabulary& tgt_vocab,
                                      int max_len) {
  std::vector<EncodedPair> out;
  out.reserve(data.size());
  for (const auto& p : data) {
    out.push_back(encode_pair(p.src, p.tgt, src_vocab, tgt_vocab, max_len));
  }
  return out;
}

}  // namespace

Schedule build_schedule(const std::vector<TokenPair>& family_pairs,
                        const std::vector<TokenPair>& task_pairs,
                        const CurriculumConfig& cfg) {
  if (task_pairs.empty()) {
    fail(ErrorCode::empty_task_data, "curriculum has no task pairs");
  }
  Schedule schedule;
  if (family_pairs.empty()) {
    schedule.family_skipped = true;
  } else {
    CurriculumStage family;
    family.name = "family";
    family.data = family_pairs;
    family.epochs = cfg.family_epochs;
    family.order_key = "corpus order (related-language pairs)";
    schedule.stages.push_back(std::move(family));
  }

  CurriculumStage shorts;
  shorts.name = "short";
  for (const auto& p : task_pairs) {
    if (static_cast<int>(p.src.size()) <= cfg.short_threshold) {
      shorts.data.push_back(p);
    }
  }
  if (shorts.data.empty()) {
    fail(ErrorCode::empty_stage,
         "no task pair has source length <= " +
             std::to_string(cfg.short_threshold));
  }
  std::stable_sort(shorts.data.begin(), shorts.data.end(),
                   [](const TokenPair& a, const TokenPair& b) {
                     return a.src.size() < b.src.size();
                   });
  shorts.epochs = cfg.short_epochs;
  shorts.order_key = "source length ascending";

  CurriculumStage longs;
  longs.name = "long";
  longs.data = concat_long_texts(shorts.data, cfg.concat_target_len, cfg.seed,
                                 cfg.separator);
  longs.epochs = cfg.long_epochs;
  longs.order_key = "spliced groups of the short stage";

  schedule.stages.push_back(std::move(shorts));
  schedule.stages.push_back(std::move(longs));
  return schedule;
}

std::vector<TokenPair> concat_long_texts(const std::vector<TokenPair>& pairs,
                                         int target_len, uint64_t seed,
                                         const std::string& separator) {
  if (target_len < 1) fail(ErrorCode::config, "target_len must be >= 1");
  std::vector<TokenPair> groups;
  TokenPair current;
  bool synthetic = false;
  for (const auto& p : pairs) {
    if (!current.src.empty()) {
      current.src.push_back(separator);
      current.tgt.push_back(separator);
    }
    current.src.insert(current.src.end(), p.src.begin(), p.src.end());
    current.tgt.insert(current.tgt.end(), p.tgt.begin(), p.tgt.end());
    synthetic = synthetic || p.synthetic_origin;
    if (static_cast<int>(current.src.size()) >= target_len) {
      current.synthetic_origin = synthetic;
      groups.push_back(std::move(current));
      current = TokenPair{};
      synthetic = false;
    }
  }
  if (!current.src.empty()) {
    current.synthetic_origin = synthetic;
    groups.push_back(std::move(current));
  }
  Rng rng(seed);
  rng.shuffle(groups);
  return groups;
}

ModelTranslationProvider::ModelTranslationProvider(
    const Seq2SeqModel& reverse_model, const Vocabulary& in_vocab,
    const Vocabulary& out_vocab, TokenizerMode in_mode, TokenizerMode out_mode,
    DecodeConfig decode)
    : model_(&reverse_model),
      in_vocab_(&in_vocab),
      out_vocab_(&out_vocab),
      in_mode_(in_mode),
      out_mode_(out_mode),
      decode_(decode) {}

std::optional<std::string> ModelTranslationProvider::translate(
    const std::string& text, const std::string& /*src_lang*/,
    const std::string& /*tgt_lang*/) {
  auto tokens = tokenize(text, in_mode_);
  if (tokens.empty()) return std::nullopt;
  TokenIds ids = encode(tokens, *in_vocab_, /*add_bos_eos=*/false);
  if (static_cast<int>(ids.size()) > model_->cfg.max_len - 1) {
    ids.resize(model_->cfg.max_len - 1);
  }
  ids.push_back(Vocabulary::eos_id);
  ModelScorer scorer(*model_);
  const auto hyps = beam_search(scorer, ids, decode_);
  if (hyps.empty()) return std::nullopt;
  const auto out_tokens = decode(hyps.front().ids, *out_vocab_);
  if (out_tokens.empty()) return std::nullopt;
  return detokenize(out_tokens, out_mode_);
}

HttpTranslationProvider::HttpTranslationProvider(std::string host, int port,
                                                 int timeout_ms, int retries)
    : host_(std::move(host)),
      port_(port),
      timeout_ms_(timeout_ms),
      retries_(retries) {}

std::optional<std::string> HttpTranslationProvider::translate(
    const std::string& text, const std::string& src_lang,
    const std::string& tgt_lang) {
  httplib::Client client(host_, port_);
  client.set_connection_timeout(0, timeout_ms_ * 1000);
  client.set_read_timeout(0, timeout_ms_ * 1000);

  nlohmann::json body = {
      {"src_lang", src_lang}, {"tgt_lang", tgt_lang}, {"text", text}};
  const std::string payload = body.dump();

  bool reached = false;
  for (int attempt = 0; attempt <= retries_; ++attempt) {
    auto res = client.Post("/translate", payload, "application/json");
    if (!res) continue;
    reached = true;
    if (res->status != 200) continue;
    auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("text")) return std::nullopt;
    return parsed["text"].get<std::string>();
  }
  if (!reached) {
    fail(ErrorCode::provider_unavailable,
         "translation provider unreachable at " + host_ + ":" +
             std::to_string(port_));
  }
  return std::nullopt;
}

BacktransResult back_translate(TranslationProvider& provider,
                               const std::vector<std::string>& mono,
                               const BacktransConfig& cfg,
                               TokenizerMode src_mode,
                               TokenizerMode tgt_mode) {
  BacktransResult result;
  const size_t take = std::min<size_t>(mono.size(),
                                       std::max(0, cfg.sample_size));
  for (size_t i = 0; i < take; ++i) {
    // Reverse direction: monolingual text is in the *target* language.
    auto synthetic_src =
        provider.translate(mono[i], cfg.tgt_lang, cfg.src_lang);
    if (!synthetic_src) {
      ++result.skipped;
      continue;
    }
    TokenPair pair;
    pair.src = tokenize(*synthetic_src, src_mode);
    pair.tgt = tokenize(mono[i], tgt_mode);
    if (pair.src.empty() || pair.tgt.empty() ||
        static_cast<int>(pair.src.size()) > cfg.max_len) {
      ++result.skipped;
      continue;
    }
    pair.synthetic_origin = true;
    result.pairs.push_back(std::move(pair));
  }
  return result;
}

std::vector<StageMetrics> run_curriculum(
    Seq2SeqModel& model, const Schedule& schedule,
    const Vocabulary& src_vocab, const Vocabulary& tgt_vocab,
    const TrainConfig& train_cfg, const SequenceLoss& loss,
    const DevEvaluator& evaluate, const StageCheckpointer& checkpoint) {
  std::vector<StageMetrics> metrics;
  AdamW opt(model.params);
  Rng rng(train_cfg.seed);

  // The schedule horizon spans all stages so the learning rate decays over
  // the whole curriculum rather than restarting per stage.
  long long total_steps = 0;
  for (const auto& stage : schedule.stages) {
    const long long per_epoch =
        (static_cast<long long>(stage.data.size()) + train_cfg.batch_size - 1) /
        train_cfg.batch_size;
    total_steps += per_epoch * stage.epochs;
  }
  long long warmup_steps = 0;
  if (!schedule.stages.empty()) {
    const auto& first = schedule.stages.front();
    warmup_steps = std::min<long long>(
        total_steps,
        train_cfg.warmup_epochs *
            ((static_cast<long long>(first.data.size()) +
              train_cfg.batch_size - 1) /
             train_cfg.batch_size));
  }

  long long step = 0;
  for (const auto& stage : schedule.stages) {
    const auto encoded =
        encode_stage(stage.data, src_vocab, tgt_vocab, model.cfg.max_len);
    for (int epoch = 0; epoch < stage.epochs; ++epoch) {
      Rng erng = rng.fork(static_cast<uint64_t>(metrics.size() * 131 + epoch));
      auto batches = make_batches(encoded, train_cfg.batch_size, erng, true);
      double sum_loss = 0.0;
      long long seen = 0;
      for (size_t i = 0; i < batches.size(); ++i) {
        const double lr =
            scheduled_lr(train_cfg, step, total_steps, warmup_steps);
        try {
          sum_loss += train_step(model, batches[i], loss, opt, train_cfg, lr,
                                 static_cast<int>(i));
        } catch (const Error& e) {
          if (e.code() == ErrorCode::non_finite_loss) {
            fail(ErrorCode::non_finite_loss,
                 "stage '" + stage.name + "': " + e.what());
          }
          throw;
        }
        ++seen;
        ++step;
      }
      StageMetrics row;
      row.stage = stage.name;
      row.epoch = epoch;
      row.loss = seen > 0 ? sum_loss / static_cast<double>(seen) : 0.0;
      metrics.push_back(row);
    }
    if (evaluate) {
      // Attach the stage-end dev score to the stage's last row (or a
      // dedicated row for a 0-epoch stage).
      if (metrics.empty() || metrics.back().stage != stage.name) {
        StageMetrics row;
        row.stage = stage.name;
        row.epoch = -1;
        metrics.push_back(row);
      }
      metrics.back().dev_bleu = evaluate(model);
    }
    if (checkpoint) checkpoint(stage.name, model);
  }
  return metrics;
}

}  // namespace lrnmt
