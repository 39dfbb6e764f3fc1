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
// A deterministic synthetic translation benchmark, so every experiment in
// the repo runs offline. Three word-mapped languages share a hidden
// cluster vocabulary: "core" plays the pivot, "nusa" and "melu" are
// siblings that overlap in surface forms. Words come in synonym groups
// with identical context distributions (a Markov walk over clusters), so
// distributional embeddings discover the synonyms and substitution
// augmentation is meaning-preserving. Translations always emit a cluster's
// canonical word, which keeps references unique.

#ifndef LRNMT_SYNTHETIC_HPP_
#define LRNMT_SYNTHETIC_HPP_

#include <string>
#include <vector>

#include "lrnmt/embeddings.hpp"
#include "lrnmt/rng.hpp"

namespace lrnmt {

enum class SynLang { core = 0, nusa = 1, melu = 2 };

std::string syn_lang_name(SynLang lang);
SynLang sibling(SynLang lang);  // nusa <-> melu; core has none (throws)

struct SyntheticConfig {
  int clusters = 18;
  int synonyms = 3;
  int min_len = 3;
  int max_len = 12;
  int train_pairs = 150;
  int dev_pairs = 40;
  int test_pairs = 40;
  int family_pairs = 120;
  int mono_sentences = 1200;
  double noise_rate = 0.0;       // train-target token corruption
  double sibling_overlap = 0.7;  // shared surface forms between siblings
  uint64_t seed = 1;
};

class SyntheticWorld {
 public:
  explicit SyntheticWorld(const SyntheticConfig& cfg);

  const SyntheticConfig& cfg() const { return cfg_; }
  const std::string& word(SynLang lang, int cluster, int synonym) const;
  const std::string& canonical(SynLang lang, int cluster) const {
    return word(lang, cluster, 0);
  }
  std::vector<int> sample_cluster_path(Rng& rng) const;
  // Any surface form of the language; used for injecting noise.
  const std::string& random_word(SynLang lang, Rng& rng) const;

 private:
  SyntheticConfig cfg_;
  // words_[lang][cluster * synonyms + synonym]
  std::vector<std::vector<std::string>> words_;
  std::vector<std::vector<int>> preferred_next_;
};

struct SyntheticDirection {
  std::string name;  // e.g. "nusa-core"
  SynLang src_lang;
  SynLang tgt_lang;
  std::vector<TokenPair> train;   // noisy when cfg.noise_rate > 0
  std::vector<TokenPair> dev;     // always clean
  std::vector<TokenPair> test;    // always clean
  std::vector<TokenPair> family;  // sibling-language pairs for stage 1
  std::vector<std::vector<std::string>> mono_src;
  std::vector<std::vector<std::string>> mono_tgt;
};

// `salt` decouples the sampling streams of different directions built on
// the same world.
SyntheticDirection make_direction(const SyntheticWorld& world, SynLang src,
                                  SynLang tgt, const SyntheticConfig& cfg,
                                  uint64_t salt);

// The four benchmark directions: core->nusa, nusa->core, core->melu,
// melu->core (mirroring the Chinese/Malay/Indonesian setup).
std::vector<SyntheticDirection> make_benchmark(const SyntheticConfig& cfg);

}  // namespace lrnmt

#endif  // LRNMT_SYNTHETIC_HPP_
