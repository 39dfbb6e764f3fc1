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
// Corpus BLEU as scored by the shared task: clipped n-gram precisions
// combined geometrically under a brevity penalty, case-sensitive, with
// word or character tokens. Counting is exact integer arithmetic; floating
// point enters only when the final score is assembled.

#ifndef LRNMT_METRICS_HPP_
#define LRNMT_METRICS_HPP_

#include <map>
#include <string>
#include <vector>

#include "lrnmt/textproc.hpp"

namespace lrnmt {

struct BleuConfig {
  int max_n = 4;
  std::vector<double> weights = {0.25, 0.25, 0.25, 0.25};
  TokenizerMode tokenizer_mode = TokenizerMode::word;
  double scale = 100.0;
};

struct BleuReport {
  double bleu = 0.0;                // in [0, scale]
  std::vector<double> precisions;  // P_1..P_N
  double brevity_penalty = 0.0;
  long long hyp_len = 0;
  long long ref_len = 0;
};

// Exact n-gram precision numerator/denominator.
struct PrecisionCounts {
  long long matched = 0;  // sum of clipped hypothesis counts
  long long total = 0;    // hypothesis n-grams
};

using Tokens = std::vector<std::string>;
using NgramCounts = std::map<std::vector<std::string>, long long>;

// Multiset of contiguous n-grams; total count is max(0, len - n + 1).
NgramCounts ngram_counts(const Tokens& tokens, int n);

// Clipped precision: hypothesis counts capped by reference counts. A zero
// denominator is reported as 0/0 and treated as precision zero downstream.
PrecisionCounts modified_precision(const Tokens& hyp, const Tokens& ref,
                                   int n);

// 1 when the hypothesis is longer than the reference, exp(1 - ref/hyp)
// otherwise; an empty hypothesis against a nonempty reference scores 0.
double brevity_penalty(long long hyp_len, long long ref_len);

// Corpus-level score over pre-tokenized pairs: per-n numerators,
// denominators and lengths are summed over all pairs before assembly.
// Any zero precision zeroes the whole score (no smoothing).
// Throws Error(empty_corpus) on an empty list, Error(config) on bad weights.
BleuReport corpus_bleu_tokens(
    const std::vector<std::pair<Tokens, Tokens>>& pairs,
    const BleuConfig& cfg);

BleuReport sentence_bleu_tokens(const Tokens& hyp, const Tokens& ref,
                                const BleuConfig& cfg);

// Convenience wrappers that run the scoring normalization (entity decode,
// half-width folding for Chinese) and tokenize with cfg.tokenizer_mode.
BleuReport sentence_bleu(const Sentence& hyp, const Sentence& ref,
                         const BleuConfig& cfg);
BleuReport corpus_bleu(const std::vector<std::pair<Sentence, Sentence>>& pairs,
                       const BleuConfig& cfg);

// Final ranking value: the arithmetic mean of exactly four unidirectional
// scores. Throws Error(wrong_arity) otherwise.
double leaderboard_average(const std::vector<double>& bleu_values);
double leaderboard_average(const std::vector<BleuReport>& reports);

}  // namespace lrnmt

#endif  // LRNMT_METRICS_HPP_
