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

#include "lrnmt/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "lrnmt/error.hpp"
#include "lrnmt/rng.hpp"

namespace lrnmt {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Unigram^(3/4) sampler over non-special ids via the cumulative table.
class NegativeSampler {
 public:
  NegativeSampler(const std::vector<long long>& counts_by_id) {
    cumulative_.reserve(counts_by_id.size());
    ids_.reserve(counts_by_id.size());
    double total = 0.0;
    for (size_t id = Vocabulary::num_specials; id < counts_by_id.size();
         ++id) {
      if (counts_by_id[id] <= 0) continue;
      total += std::pow(static_cast<double>(counts_by_id[id]), 0.75);
      cumulative_.push_back(total);
      ids_.push_back(static_cast<int>(id));
    }
    total_ = total;
  }

  int sample(Rng& rng) const {
    const double r = rng.next_double() * total_;
    const auto it =
        std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    const size_t idx = std::min<size_t>(
        static_cast<size_t>(it - cumulative_.begin()), ids_.size() - 1);
    return ids_[idx];
  }

  bool empty() const { return ids_.empty(); }

 private:
  std::vector<double> cumulative_;
  std::vector<int> ids_;
  double total_ = 0.0;
};

}  // namespace

EmbeddingTable train_skipgram(
    const std::vector<std::vector<std::string>>& corpus,
    const SkipgramConfig& cfg, SkipgramStats* stats) {
  if (cfg.dim < 2 || cfg.window < 1 || cfg.negatives < 0 || cfg.epochs < 0 ||
      cfg.lr <= 0.0 || cfg.min_count < 1) {
    fail(ErrorCode::config, "invalid skip-gram configuration");
  }
  Vocabulary vocab =
      build_vocab(corpus, cfg.min_count, /*max_size=*/1 << 30);

  EmbeddingTable table;
  table.vocab = vocab;
  table.dim = cfg.dim;
  table.vectors.assign(static_cast<size_t>(vocab.size()) * cfg.dim, 0.0);

  Rng rng(cfg.seed);
  // word2vec-style init: small uniform input vectors, zero output vectors.
  for (int id = Vocabulary::num_specials; id < vocab.size(); ++id) {
    double* row = table.vectors.data() + static_cast<size_t>(id) * cfg.dim;
    for (int j = 0; j < cfg.dim; ++j) {
      row[j] = rng.next_range(-0.5 / cfg.dim, 0.5 / cfg.dim);
    }
  }
  std::vector<double> context(table.vectors.size(), 0.0);

  // Sentences as in-vocab id sequences; OOV tokens are skipped.
  std::vector<std::vector<int>> sentences;
  std::vector<long long> counts_by_id(vocab.size(), 0);
  long long total_positions = 0;
  for (const auto& sent : corpus) {
    std::vector<int> ids;
    ids.reserve(sent.size());
    for (const auto& tok : sent) {
      const int id = vocab.id(tok);
      if (id == Vocabulary::unk_id) continue;
      ids.push_back(id);
      ++counts_by_id[id];
    }
    if (ids.size() >= 2) {
      total_positions += static_cast<long long>(ids.size());
      sentences.push_back(std::move(ids));
    }
  }

  if (stats) stats->epoch_loss.clear();
  if (cfg.epochs == 0 || sentences.empty()) {
    if (sentences.empty() && cfg.epochs > 0) {
      fail(ErrorCode::empty_corpus,
           "no sentence with >= 2 in-vocabulary tokens");
    }
    return table;
  }

  NegativeSampler sampler(counts_by_id);
  const long long planned =
      total_positions * static_cast<long long>(cfg.epochs);
  long long processed = 0;
  std::vector<double> accum(cfg.dim);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double epoch_loss = 0.0;
    long long epoch_pairs = 0;
    for (const auto& sent : sentences) {
      for (size_t pos = 0; pos < sent.size(); ++pos) {
        const double progress =
            static_cast<double>(processed) / static_cast<double>(planned);
        const double alpha = cfg.lr * std::max(1e-4, 1.0 - progress);
        ++processed;

        const int center = sent[pos];
        const int span = 1 + static_cast<int>(rng.next_below(cfg.window));
        double* u =
            table.vectors.data() + static_cast<size_t>(center) * cfg.dim;
        for (int off = -span; off <= span; ++off) {
          if (off == 0) continue;
          const long long cpos = static_cast<long long>(pos) + off;
          if (cpos < 0 || cpos >= static_cast<long long>(sent.size())) {
            continue;
          }
          const int ctx = sent[cpos];
          std::fill(accum.begin(), accum.end(), 0.0);
          double pair_loss = 0.0;

          for (int n = 0; n <= cfg.negatives; ++n) {
            int target;
            double label;
            if (n == 0) {
              target = ctx;
              label = 1.0;
            } else {
              target = sampler.sample(rng);
              if (target == ctx) continue;
              label = 0.0;
            }
            double* w =
                context.data() + static_cast<size_t>(target) * cfg.dim;
            double dot = 0.0;
            for (int j = 0; j < cfg.dim; ++j) dot += u[j] * w[j];
            const double f = sigmoid(dot);
            pair_loss -= std::log(
                std::max(1e-12, label == 1.0 ? f : 1.0 - f));
            const double g = (label - f) * alpha;
            for (int j = 0; j < cfg.dim; ++j) {
              accum[j] += g * w[j];
              w[j] += g * u[j];
            }
          }
          for (int j = 0; j < cfg.dim; ++j) u[j] += accum[j];
          epoch_loss += pair_loss;
          ++epoch_pairs;
        }
      }
    }
    if (stats) {
      stats->epoch_loss.push_back(
          epoch_pairs > 0 ? epoch_loss / static_cast<double>(epoch_pairs)
                          : 0.0);
    }
  }
  return table;
}

double cosine_similarity(std::span<const double> u,
                         std::span<const double> v) {
  if (u.size() != v.size() || u.empty()) {
    fail(ErrorCode::shape_mismatch, "cosine: dimension mismatch");
  }
  double uu = 0.0, vv = 0.0, uv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    uu += u[i] * u[i];
    vv += v[i] * v[i];
    uv += u[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) {
    fail(ErrorCode::zero_vector, "cosine of a zero vector");
  }
  return uv / (std::sqrt(uu) * std::sqrt(vv));
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingTable& table,
                                        const std::string& token, int k) {
  if (k < 1) fail(ErrorCode::config, "nearest_neighbors: k must be >= 1");
  if (!table.vocab.contains(token)) {
    fail(ErrorCode::unknown_token, "not in embedding vocabulary: " + token);
  }
  const int query = table.vocab.id(token);
  const auto q = table.row(query);

  std::vector<std::pair<double, int>> scored;  // (similarity, id)
  for (int id = Vocabulary::num_specials; id < table.vocab.size(); ++id) {
    if (id == query) continue;
    scored.emplace_back(cosine_similarity(q, table.row(id)), id);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (static_cast<int>(scored.size()) > k) scored.resize(k);

  std::vector<Neighbor> out;
  out.reserve(scored.size());
  for (const auto& [sim, id] : scored) {
    out.push_back(Neighbor{table.vocab.token(id), sim});
  }
  return out;
}

std::vector<TokenPair> augment_by_substitution(
    const std::vector<TokenPair>& pairs, const EmbeddingTable& table,
    const AugmentConfig& cfg) {
  if (cfg.expansion_factor < 1 || cfg.top_k < 1 ||
      cfg.substitutions_per_sentence < 0) {
    fail(ErrorCode::config, "invalid augmentation configuration");
  }
  Rng rng(cfg.seed);

  // Qualifying neighbor lists are cached per distinct source token.
  std::unordered_map<std::string, std::vector<std::string>> cache;
  auto candidates =
      [&](const std::string& token) -> const std::vector<std::string>& {
    auto it = cache.find(token);
    if (it != cache.end()) return it->second;
    std::vector<std::string> list;
    if (table.vocab.contains(token)) {
      for (const auto& n : nearest_neighbors(table, token, cfg.top_k)) {
        if (n.similarity >= cfg.min_similarity) list.push_back(n.token);
      }
    }
    return cache.emplace(token, std::move(list)).first->second;
  };

  std::vector<TokenPair> out;
  out.reserve(pairs.size() * static_cast<size_t>(cfg.expansion_factor));
  for (const auto& pair : pairs) {
    out.push_back(pair);
    for (int variant = 1; variant < cfg.expansion_factor; ++variant) {
      TokenPair copy = pair;
      if (!copy.src.empty()) {
        for (int s = 0; s < cfg.substitutions_per_sentence; ++s) {
          const size_t pos =
              static_cast<size_t>(rng.next_below(copy.src.size()));
          const auto& list = candidates(copy.src[pos]);
          if (list.empty()) continue;  // no qualifying neighbor: keep token
          copy.src[pos] =
              list[static_cast<size_t>(rng.next_below(list.size()))];
        }
      }
      out.push_back(std::move(copy));
    }
  }
  return out;
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write embeddings: " + path);
  const int count = table.vocab.size() - Vocabulary::num_specials;
  out << count << ' ' << table.dim << '\n';
  char buf[64];
  for (int id = Vocabulary::num_specials; id < table.vocab.size(); ++id) {
    out << table.vocab.token(id);
    const auto row = table.row(id);
    for (double v : row) {
      std::snprintf(buf, sizeof(buf), " %.17g", v);
      out << buf;
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::io, "short write: " + path);
}

EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot read embeddings: " + path);
  long long count = 0, dim = 0;
  if (!(in >> count >> dim) || count < 0 || dim < 2) {
    fail(ErrorCode::io, "bad embedding header: " + path);
  }
  std::vector<std::string> tokens;
  std::vector<double> rows;
  tokens.reserve(count);
  rows.reserve(static_cast<size_t>(count) * dim);
  for (long long i = 0; i < count; ++i) {
    std::string token;
    if (!(in >> token)) fail(ErrorCode::io, "truncated embeddings: " + path);
    tokens.push_back(token);
    for (long long j = 0; j < dim; ++j) {
      double v;
      if (!(in >> v)) fail(ErrorCode::io, "truncated embeddings: " + path);
      rows.push_back(v);
    }
  }
  EmbeddingTable table;
  table.vocab = Vocabulary::from_tokens(tokens);
  table.dim = static_cast<int>(dim);
  table.vectors.assign(
      static_cast<size_t>(table.vocab.size()) * dim, 0.0);
  std::copy(rows.begin(), rows.end(),
            table.vectors.begin() +
                static_cast<size_t>(Vocabulary::num_specials) * dim);
  return table;
}

}  // namespace lrnmt
