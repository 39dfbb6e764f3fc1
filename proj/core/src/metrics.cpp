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

#include "lrnmt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lrnmt/error.hpp"

namespace lrnmt {

namespace {

void check_config(const BleuConfig& cfg) {
  if (cfg.max_n < 1) fail(ErrorCode::config, "BLEU max_n must be >= 1");
  if (static_cast<int>(cfg.weights.size()) != cfg.max_n) {
    fail(ErrorCode::config, "BLEU weights must have length max_n");
  }
  const double sum =
      std::accumulate(cfg.weights.begin(), cfg.weights.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-9) {
    fail(ErrorCode::config, "BLEU weights must sum to 1");
  }
}

BleuReport assemble(const std::vector<PrecisionCounts>& counts,
                    long long hyp_len, long long ref_len,
                    const BleuConfig& cfg) {
  BleuReport report;
  report.hyp_len = hyp_len;
  report.ref_len = ref_len;
  report.brevity_penalty = brevity_penalty(hyp_len, ref_len);
  report.precisions.resize(cfg.max_n, 0.0);

  bool any_zero = false;
  double log_sum = 0.0;
  for (int n = 0; n < cfg.max_n; ++n) {
    const auto& c = counts[n];
    if (c.total == 0 || c.matched == 0) {
      any_zero = true;
      report.precisions[n] = 0.0;
    } else {
      const double p =
          static_cast<double>(c.matched) / static_cast<double>(c.total);
      report.precisions[n] = p;
      log_sum += cfg.weights[n] * std::log(p);
    }
  }
  report.bleu = any_zero
                    ? 0.0
                    : cfg.scale * report.brevity_penalty * std::exp(log_sum);
  return report;
}

}  // namespace

NgramCounts ngram_counts(const Tokens& tokens, int n) {
  if (n < 1) fail(ErrorCode::config, "n-gram order must be >= 1");
  NgramCounts counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::vector<std::string> gram(tokens.begin() + i, tokens.begin() + i + n);
    ++counts[gram];
  }
  return counts;
}

PrecisionCounts modified_precision(const Tokens& hyp, const Tokens& ref,
                                   int n) {
  const NgramCounts hyp_counts = ngram_counts(hyp, n);
  const NgramCounts ref_counts = ngram_counts(ref, n);
  PrecisionCounts out;
  for (const auto& [gram, count] : hyp_counts) {
    out.total += count;
    auto it = ref_counts.find(gram);
    if (it != ref_counts.end()) out.matched += std::min(count, it->second);
  }
  return out;
}

double brevity_penalty(long long hyp_len, long long ref_len) {
  if (hyp_len < 0 || ref_len < 0) {
    fail(ErrorCode::degenerate_input, "negative length");
  }
  if (hyp_len > ref_len) return 1.0;
  if (hyp_len == 0) return ref_len == 0 ? 1.0 : 0.0;
  return std::exp(1.0 - static_cast<double>(ref_len) /
                            static_cast<double>(hyp_len));
}

BleuReport corpus_bleu_tokens(
    const std::vector<std::pair<Tokens, Tokens>>& pairs,
    const BleuConfig& cfg) {
  check_config(cfg);
  if (pairs.empty()) fail(ErrorCode::empty_corpus, "no hypothesis/reference pairs");

  std::vector<PrecisionCounts> counts(cfg.max_n);
  long long hyp_len = 0;
  long long ref_len = 0;
  for (const auto& [hyp, ref] : pairs) {
    hyp_len += static_cast<long long>(hyp.size());
    ref_len += static_cast<long long>(ref.size());
    for (int n = 1; n <= cfg.max_n; ++n) {
      const PrecisionCounts c = modified_precision(hyp, ref, n);
      counts[n - 1].matched += c.matched;
      counts[n - 1].total += c.total;
    }
  }
  return assemble(counts, hyp_len, ref_len, cfg);
}

BleuReport sentence_bleu_tokens(const Tokens& hyp, const Tokens& ref,
                                const BleuConfig& cfg) {
  return corpus_bleu_tokens({{hyp, ref}}, cfg);
}

BleuReport sentence_bleu(const Sentence& hyp, const Sentence& ref,
                         const BleuConfig& cfg) {
  return sentence_bleu_tokens(prepare_for_scoring(hyp, cfg.tokenizer_mode),
                              prepare_for_scoring(ref, cfg.tokenizer_mode),
                              cfg);
}

BleuReport corpus_bleu(const std::vector<std::pair<Sentence, Sentence>>& pairs,
                       const BleuConfig& cfg) {
  std::vector<std::pair<Tokens, Tokens>> tokenized;
  tokenized.reserve(pairs.size());
  for (const auto& [hyp, ref] : pairs) {
    tokenized.emplace_back(prepare_for_scoring(hyp, cfg.tokenizer_mode),
                           prepare_for_scoring(ref, cfg.tokenizer_mode));
  }
  return corpus_bleu_tokens(tokenized, cfg);
}

double leaderboard_average(const std::vector<double>& bleu_values) {
  if (bleu_values.size() != 4) {
    fail(ErrorCode::wrong_arity,
         "leaderboard average needs exactly 4 scores, got " +
             std::to_string(bleu_values.size()));
  }
  return (bleu_values[0] + bleu_values[1] + bleu_values[2] + bleu_values[3]) /
         4.0;
}

double leaderboard_average(const std::vector<BleuReport>& reports) {
  std::vector<double> values;
  values.reserve(reports.size());
  for (const auto& r : reports) values.push_back(r.bleu);
  return leaderboard_average(values);
}

}  // namespace lrnmt
