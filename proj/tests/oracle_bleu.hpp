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
// Test-only brute-force BLEU. Deliberately naive: n-grams are compared by
// scanning, counts are clipped per occurrence, and the score is assembled
// directly from the formula. Shares no code with the library implementation.

#ifndef LRNMT_TESTS_ORACLE_BLEU_HPP_
#define LRNMT_TESTS_ORACLE_BLEU_HPP_

#include <cmath>
#include <string>
#include <vector>

namespace oracle {

using Tokens = std::vector<std::string>;

inline bool same_gram(const Tokens& a, size_t ai, const Tokens& b, size_t bi,
                      int n) {
  for (int k = 0; k < n; ++k) {
    if (a[ai + k] != b[bi + k]) return false;
  }
  return true;
}

// Counts occurrences of the n-gram at hyp[i..i+n) inside `where`.
inline long long count_gram(const Tokens& gram_src, size_t gi,
                            const Tokens& where, int n) {
  if (static_cast<int>(where.size()) < n) return 0;
  long long c = 0;
  for (size_t j = 0; j + n <= where.size(); ++j) {
    if (same_gram(gram_src, gi, where, j, n)) ++c;
  }
  return c;
}

struct Counts {
  long long matched = 0;
  long long total = 0;
};

// Clipped matches by scanning every hypothesis position; a position
// contributes iff its occurrence index (among equal grams so far) is below
// the reference count.
inline Counts clipped(const Tokens& hyp, const Tokens& ref, int n) {
  Counts c;
  if (static_cast<int>(hyp.size()) < n) return c;
  for (size_t i = 0; i + n <= hyp.size(); ++i) {
    ++c.total;
    long long seen_before = 0;
    for (size_t j = 0; j < i; ++j) {
      if (same_gram(hyp, i, hyp, j, n)) ++seen_before;
    }
    if (seen_before < count_gram(hyp, i, ref, n)) ++c.matched;
  }
  return c;
}

struct Score {
  double bleu = 0.0;
  double brevity_penalty = 0.0;
  std::vector<double> precisions;
};

inline Score corpus_bleu(
    const std::vector<std::pair<Tokens, Tokens>>& pairs, int max_n = 4,
    double scale = 100.0) {
  Score s;
  long long hyp_len = 0, ref_len = 0;
  std::vector<Counts> totals(max_n);
  for (const auto& [hyp, ref] : pairs) {
    hyp_len += static_cast<long long>(hyp.size());
    ref_len += static_cast<long long>(ref.size());
    for (int n = 1; n <= max_n; ++n) {
      const Counts c = clipped(hyp, ref, n);
      totals[n - 1].matched += c.matched;
      totals[n - 1].total += c.total;
    }
  }
  if (hyp_len > ref_len) {
    s.brevity_penalty = 1.0;
  } else if (hyp_len == 0) {
    s.brevity_penalty = ref_len == 0 ? 1.0 : 0.0;
  } else {
    s.brevity_penalty =
        std::exp(1.0 - static_cast<double>(ref_len) /
                           static_cast<double>(hyp_len));
  }
  double log_sum = 0.0;
  bool zero = false;
  for (int n = 0; n < max_n; ++n) {
    const double p =
        totals[n].total == 0
            ? 0.0
            : static_cast<double>(totals[n].matched) /
                  static_cast<double>(totals[n].total);
    s.precisions.push_back(p);
    if (p == 0.0) {
      zero = true;
    } else {
      log_sum += (1.0 / max_n) * std::log(p);
    }
  }
  s.bleu = zero ? 0.0 : scale * s.brevity_penalty * std::exp(log_sum);
  return s;
}

}  // namespace oracle

#endif  // LRNMT_TESTS_ORACLE_BLEU_HPP_
