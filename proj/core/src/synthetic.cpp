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

#include "lrnmt/synthetic.hpp"

#include <set>

#include "lrnmt/error.hpp"

namespace lrnmt {

namespace {

const char* kConsonants[] = {"b", "d", "g", "k", "l", "m", "n",
                             "p", "r", "s", "t", "w", "z"};
const char* kVowels[] = {"a", "e", "i", "o", "u"};

std::string random_syllable(Rng& rng) {
  std::string s = kConsonants[rng.next_below(std::size(kConsonants))];
  s += kVowels[rng.next_below(std::size(kVowels))];
  return s;
}

std::string fresh_word(Rng& rng, std::set<std::string>& used, int syllables) {
  for (;;) {
    std::string w;
    for (int i = 0; i < syllables; ++i) w += random_syllable(rng);
    if (used.insert(w).second) return w;
  }
}

}  // namespace

std::string syn_lang_name(SynLang lang) {
  switch (lang) {
    case SynLang::core: return "core";
    case SynLang::nusa: return "nusa";
    case SynLang::melu: return "melu";
  }
  return "core";
}

SynLang sibling(SynLang lang) {
  switch (lang) {
    case SynLang::nusa: return SynLang::melu;
    case SynLang::melu: return SynLang::nusa;
    case SynLang::core:
      fail(ErrorCode::config, "core has no sibling language");
  }
  return SynLang::nusa;
}

SyntheticWorld::SyntheticWorld(const SyntheticConfig& cfg) : cfg_(cfg) {
  if (cfg.clusters < 2 || cfg.synonyms < 1 || cfg.min_len < 1 ||
      cfg.max_len < cfg.min_len) {
    fail(ErrorCode::config, "invalid synthetic task configuration");
  }
  Rng rng(cfg.seed ^ 0x5e3db46aULL);
  std::set<std::string> used;
  const int per_lang = cfg.clusters * cfg.synonyms;

  words_.resize(3);
  // core: three-syllable words; siblings: two-syllable words so the
  // languages look different on the page.
  words_[0].reserve(per_lang);
  for (int i = 0; i < per_lang; ++i) {
    words_[0].push_back(fresh_word(rng, used, 3));
  }
  words_[1].reserve(per_lang);
  for (int i = 0; i < per_lang; ++i) {
    words_[1].push_back(fresh_word(rng, used, 2));
  }
  words_[2].reserve(per_lang);
  for (int i = 0; i < per_lang; ++i) {
    if (rng.next_double() < cfg.sibling_overlap) {
      words_[2].push_back(words_[1][i]);  // shared surface form
    } else {
      words_[2].push_back(fresh_word(rng, used, 2));
    }
  }

  // Each cluster prefers a handful of successors; the walk mostly follows
  // them, which gives synonyms a sharp shared context signature.
  preferred_next_.resize(cfg.clusters);
  for (int c = 0; c < cfg.clusters; ++c) {
    std::set<int> next;
    while (static_cast<int>(next.size()) < std::min(4, cfg.clusters - 1)) {
      const int cand = static_cast<int>(rng.next_below(cfg.clusters));
      if (cand != c) next.insert(cand);
    }
    preferred_next_[c].assign(next.begin(), next.end());
  }
}

const std::string& SyntheticWorld::word(SynLang lang, int cluster,
                                        int synonym) const {
  return words_[static_cast<int>(lang)]
               [cluster * cfg_.synonyms + synonym];
}

std::vector<int> SyntheticWorld::sample_cluster_path(Rng& rng) const {
  const int len = cfg_.min_len +
                  static_cast<int>(rng.next_below(
                      static_cast<uint64_t>(cfg_.max_len - cfg_.min_len + 1)));
  std::vector<int> path;
  path.reserve(len);
  int cluster = static_cast<int>(rng.next_below(cfg_.clusters));
  path.push_back(cluster);
  for (int i = 1; i < len; ++i) {
    if (rng.next_double() < 0.85) {
      const auto& pref = preferred_next_[cluster];
      cluster = pref[rng.next_below(pref.size())];
    } else {
      cluster = static_cast<int>(rng.next_below(cfg_.clusters));
    }
    path.push_back(cluster);
  }
  return path;
}

const std::string& SyntheticWorld::random_word(SynLang lang, Rng& rng) const {
  const auto& pool = words_[static_cast<int>(lang)];
  return pool[rng.next_below(pool.size())];
}

namespace {

TokenPair sample_pair(const SyntheticWorld& world, SynLang src, SynLang tgt,
                      Rng& rng) {
  const auto path = world.sample_cluster_path(rng);
  TokenPair pair;
  pair.src.reserve(path.size());
  pair.tgt.reserve(path.size());
  const int synonyms = world.cfg().synonyms;
  for (int cluster : path) {
    pair.src.push_back(
        world.word(src, cluster, static_cast<int>(rng.next_below(synonyms))));
    pair.tgt.push_back(world.canonical(tgt, cluster));
  }
  return pair;
}

// Noise runs as a separate pass on a forked stream, so the clean pairs
// underneath a noisy corpus are identical to a noise_rate=0 run.
std::vector<TokenPair> sample_pairs(const SyntheticWorld& world, SynLang src,
                                    SynLang tgt, int count, Rng& rng,
                                    double noise_rate) {
  std::vector<TokenPair> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    out.push_back(sample_pair(world, src, tgt, rng));
  }
  if (noise_rate > 0.0) {
    Rng noise_rng = rng.fork(0x5015eULL);
    for (auto& pair : out) {
      for (auto& token : pair.tgt) {
        if (noise_rng.next_double() < noise_rate) {
          token = world.random_word(tgt, noise_rng);
        }
      }
    }
  }
  return out;
}

std::vector<std::vector<std::string>> sample_mono(const SyntheticWorld& world,
                                                  SynLang lang, int count,
                                                  Rng& rng) {
  std::vector<std::vector<std::string>> out;
  out.reserve(count);
  const int synonyms = world.cfg().synonyms;
  for (int i = 0; i < count; ++i) {
    const auto path = world.sample_cluster_path(rng);
    std::vector<std::string> sent;
    sent.reserve(path.size());
    for (int cluster : path) {
      sent.push_back(world.word(
          lang, cluster, static_cast<int>(rng.next_below(synonyms))));
    }
    out.push_back(std::move(sent));
  }
  return out;
}

}  // namespace

SyntheticDirection make_direction(const SyntheticWorld& world, SynLang src,
                                  SynLang tgt, const SyntheticConfig& cfg,
                                  uint64_t salt) {
  if (src == tgt) fail(ErrorCode::config, "direction needs two languages");
  SyntheticDirection dir;
  dir.name = syn_lang_name(src) + "-" + syn_lang_name(tgt);
  dir.src_lang = src;
  dir.tgt_lang = tgt;

  Rng train_rng(cfg.seed * 1315423911ULL + salt * 2654435761ULL + 1);
  Rng clean_rng(cfg.seed * 97531ULL + salt * 86028121ULL + 2);
  Rng family_rng(cfg.seed * 40503ULL + salt * 29986577ULL + 3);
  Rng mono_rng(cfg.seed * 7919ULL + salt * 15485863ULL + 4);

  dir.train =
      sample_pairs(world, src, tgt, cfg.train_pairs, train_rng, cfg.noise_rate);
  dir.dev = sample_pairs(world, src, tgt, cfg.dev_pairs, clean_rng, 0.0);
  dir.test = sample_pairs(world, src, tgt, cfg.test_pairs, clean_rng, 0.0);

  // Related-language data: swap the sibling in for whichever side has one.
  const SynLang family_src = src == SynLang::core ? src : sibling(src);
  const SynLang family_tgt = tgt == SynLang::core ? tgt : sibling(tgt);
  dir.family = sample_pairs(world, family_src, family_tgt, cfg.family_pairs,
                            family_rng, 0.0);

  dir.mono_src = sample_mono(world, src, cfg.mono_sentences, mono_rng);
  dir.mono_tgt = sample_mono(world, tgt, cfg.mono_sentences / 4 + 1, mono_rng);
  return dir;
}

std::vector<SyntheticDirection> make_benchmark(const SyntheticConfig& cfg) {
  SyntheticWorld world(cfg);
  std::vector<SyntheticDirection> dirs;
  dirs.push_back(make_direction(world, SynLang::core, SynLang::nusa, cfg, 11));
  dirs.push_back(make_direction(world, SynLang::nusa, SynLang::core, cfg, 22));
  dirs.push_back(make_direction(world, SynLang::core, SynLang::melu, cfg, 33));
  dirs.push_back(make_direction(world, SynLang::melu, SynLang::core, cfg, 44));
  return dirs;
}

}  // namespace lrnmt
