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
// Skip-gram word embeddings trained on monolingual text with negative
// sampling, and the nearest-neighbor substitution augmenter built on them.

#ifndef LRNMT_EMBEDDINGS_HPP_
#define LRNMT_EMBEDDINGS_HPP_

#include <span>
#include <string>
#include <vector>

#include "lrnmt/textproc.hpp"

namespace lrnmt {

struct SkipgramConfig {
  int dim = 64;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  double lr = 0.025;
  int min_count = 1;
  uint64_t seed = 42;
};

struct AugmentConfig {
  int expansion_factor = 10;
  int substitutions_per_sentence = 1;
  int top_k = 5;
  double min_similarity = 0.5;
  uint64_t seed = 17;
};

struct EmbeddingTable {
  Vocabulary vocab;
  int dim = 0;
  std::vector<double> vectors;  // |V| x dim, row-major; special rows are zero

  std::span<const double> row(int id) const {
    return {vectors.data() + static_cast<size_t>(id) * dim,
            static_cast<size_t>(dim)};
  }
};

struct SkipgramStats {
  // Mean negative-sampling objective per epoch (lower is better).
  std::vector<double> epoch_loss;
};

// Deterministic given cfg.seed. Throws Error(empty_corpus) when nothing
// survives the min_count filter.
EmbeddingTable train_skipgram(
    const std::vector<std::vector<std::string>>& corpus,
    const SkipgramConfig& cfg, SkipgramStats* stats = nullptr);

// u.v / (|u||v|); throws Error(zero_vector) on a zero-norm input.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

struct Neighbor {
  std::string token;
  double similarity = 0.0;
};

// Top-k by cosine, excluding the query and the specials; ties broken by
// vocabulary order. Throws Error(unknown_token) for out-of-vocab queries.
std::vector<Neighbor> nearest_neighbors(const EmbeddingTable& table,
                                        const std::string& token, int k);

struct TokenPair {
  std::vector<std::string> src;
  std::vector<std::string> tgt;
  bool synthetic_origin = false;
};

// Each original pair is kept once and expanded with expansion_factor - 1
// source-side variants; targets are never touched. Output size is exactly
// expansion_factor * input size.
std::vector<TokenPair> augment_by_substitution(
    const std::vector<TokenPair>& pairs, const EmbeddingTable& table,
    const AugmentConfig& cfg);

// Text interchange format: "count dim" header, then "token v1 ... vd".
void save_embeddings(const EmbeddingTable& table, const std::string& path);
EmbeddingTable load_embeddings(const std::string& path);

}  // namespace lrnmt

#endif  // LRNMT_EMBEDDINGS_HPP_
