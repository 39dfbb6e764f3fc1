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

#include "lrnmt/decoding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "lrnmt/error.hpp"

namespace lrnmt {

namespace {

struct Alive {
  TokenIds ids;  // BOS + generated so far
  double lp = 0.0;
};

struct Candidate {
  double selection = 0.0;  // lp + diversity penalty, ranking only
  double lp = 0.0;         // true cumulative model log-probability
  int token = 0;
  int parent = 0;
};

struct GroupState {
  std::vector<Alive> alive;
  std::vector<Hypothesis> finished;
  int label = 0;
};

GroupState fresh_group(int label) {
  GroupState g;
  g.alive.push_back(Alive{{Vocabulary::bos_id}, 0.0});
  g.label = label;
  return g;
}

// One expansion step. Admits candidates in sorted order until `width`
// slots are taken; EOS candidates retire into the finished pool and the
// rest survive. Chosen tokens are reported through `step_counts` so later
// groups can be penalized against them.
void advance_group(GroupState& g, const NextTokenScorer& scorer,
                   const TokenIds& src, int width, double lambda_div,
                   const std::map<int, int>& prior_counts,
                   std::map<int, int>& step_counts) {
  std::vector<TokenIds> prefixes;
  prefixes.reserve(g.alive.size());
  for (const auto& a : g.alive) prefixes.push_back(a.ids);
  const auto logprobs = scorer.next_logprobs(src, prefixes);
  const int vocab = scorer.vocab_size();

  std::vector<Candidate> cands;
  cands.reserve(g.alive.size() * static_cast<size_t>(vocab));
  for (size_t i = 0; i < g.alive.size(); ++i) {
    for (int v = 0; v < vocab; ++v) {
      if (v == Vocabulary::pad_id || v == Vocabulary::bos_id) continue;
      Candidate c;
      c.lp = g.alive[i].lp + logprobs[i][v];
      c.selection = c.lp;
      if (lambda_div > 0.0) {
        auto it = prior_counts.find(v);
        if (it != prior_counts.end()) c.selection -= lambda_div * it->second;
      }
      c.token = v;
      c.parent = static_cast<int>(i);
      cands.push_back(c);
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a,
                                           const Candidate& b) {
    if (a.selection != b.selection) return a.selection > b.selection;
    if (a.token != b.token) return a.token < b.token;
    return a.parent < b.parent;
  });

  std::vector<Alive> next_alive;
  int admitted = 0;
  for (const auto& c : cands) {
    if (admitted >= width) break;
    ++admitted;
    ++step_counts[c.token];
    TokenIds ids = g.alive[c.parent].ids;
    ids.push_back(c.token);
    if (c.token == Vocabulary::eos_id) {
      Hypothesis h;
      h.ids = std::move(ids);
      h.logprob = c.lp;
      h.group = g.label;
      g.finished.push_back(std::move(h));
    } else {
      next_alive.push_back(Alive{std::move(ids), c.lp});
    }
  }
  g.alive = std::move(next_alive);
}

void force_finish(GroupState& g) {
  for (auto& a : g.alive) {
    Hypothesis h;
    h.ids = std::move(a.ids);
    h.logprob = a.lp;
    h.group = g.label;
    g.finished.push_back(std::move(h));
  }
  g.alive.clear();
}

void rank_and_trim(std::vector<Hypothesis>& hyps, double length_norm,
                   size_t keep) {
  std::sort(hyps.begin(), hyps.end(),
            [length_norm](const Hypothesis& a, const Hypothesis& b) {
              const double sa = a.normalized(length_norm);
              const double sb = b.normalized(length_norm);
              if (sa != sb) return sa > sb;
              return a.ids < b.ids;
            });
  if (hyps.size() > keep) hyps.resize(keep);
}

}  // namespace

double Hypothesis::normalized(double length_norm) const {
  const auto generated = static_cast<double>(
      std::max<size_t>(1, ids.empty() ? 1 : ids.size() - 1));
  return logprob / std::pow(generated, length_norm);
}

std::vector<std::vector<double>> ModelScorer::next_logprobs(
    const TokenIds& src, const std::vector<TokenIds>& prefixes) const {
  nn::NoGradGuard guard;
  const int batch = static_cast<int>(prefixes.size());
  std::vector<TokenIds> srcs(batch, src);
  nn::Var logits = forward_logits(*model_, srcs, prefixes);
  const int vocab = model_->cfg.tgt_vocab;
  int tgt_len = 0;
  for (const auto& p : prefixes) {
    tgt_len = std::max(tgt_len, static_cast<int>(p.size()));
  }

  std::vector<std::vector<double>> out(batch, std::vector<double>(vocab));
  for (int b = 0; b < batch; ++b) {
    const size_t last = prefixes[b].size() - 1;
    const double* row =
        logits->val.data() + (static_cast<size_t>(b) * tgt_len + last) * vocab;
    double max_z = row[0];
    for (int j = 1; j < vocab; ++j) max_z = std::max(max_z, row[j]);
    double z = 0.0;
    for (int j = 0; j < vocab; ++j) z += std::exp(row[j] - max_z);
    const double log_z = max_z + std::log(z);
    for (int j = 0; j < vocab; ++j) out[b][j] = row[j] - log_z;
  }
  return out;
}

std::vector<Hypothesis> beam_search(const NextTokenScorer& scorer,
                                    const TokenIds& src,
                                    const DecodeConfig& cfg) {
  if (cfg.beam < 1) fail(ErrorCode::config, "beam width must be >= 1");
  GroupState g = fresh_group(0);
  const int max_generated = cfg.max_len - 1;
  std::map<int, int> no_prior;
  for (int step = 0; step < max_generated && !g.alive.empty(); ++step) {
    std::map<int, int> counts;
    advance_group(g, scorer, src, cfg.beam, 0.0, no_prior, counts);
  }
  force_finish(g);
  rank_and_trim(g.finished, cfg.length_norm, static_cast<size_t>(cfg.beam));
  return g.finished;
}

std::vector<Hypothesis> diverse_beam_search(const NextTokenScorer& scorer,
                                            const TokenIds& src,
                                            const DecodeConfig& cfg) {
  if (cfg.groups < 1 || cfg.beam_per_group < 1) {
    fail(ErrorCode::config, "diverse beam search needs positive group sizes");
  }
  std::vector<GroupState> groups;
  groups.reserve(cfg.groups);
  for (int gi = 0; gi < cfg.groups; ++gi) groups.push_back(fresh_group(gi));

  const int max_generated = cfg.max_len - 1;
  for (int step = 0; step < max_generated; ++step) {
    bool any_alive = false;
    std::map<int, int> counts;  // tokens emitted at this step so far
    for (auto& g : groups) {
      if (g.alive.empty()) continue;
      any_alive = true;
      const std::map<int, int> prior = counts;
      advance_group(g, scorer, src, cfg.beam_per_group, cfg.lambda_div, prior,
                    counts);
    }
    if (!any_alive) break;
  }

  std::vector<Hypothesis> out;
  for (auto& g : groups) {
    force_finish(g);
    rank_and_trim(g.finished, cfg.length_norm,
                  static_cast<size_t>(cfg.beam_per_group));
    for (auto& h : g.finished) out.push_back(std::move(h));
  }
  return out;
}

std::vector<Hypothesis> dedup_candidates(const std::vector<Hypothesis>& hyps) {
  std::vector<Hypothesis> out;
  std::map<TokenIds, size_t> first_pos;
  for (const auto& h : hyps) {
    auto [it, inserted] = first_pos.emplace(h.ids, out.size());
    if (inserted) {
      out.push_back(h);
    } else if (h.logprob > out[it->second].logprob) {
      out[it->second] = h;
    }
  }
  return out;
}

}  // namespace lrnmt
