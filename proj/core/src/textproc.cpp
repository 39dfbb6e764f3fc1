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

#include "lrnmt/textproc.hpp"

#include <algorithm>
#include <fstream>

#include "lrnmt/error.hpp"
#include "lrnmt/utf8.hpp"

namespace lrnmt {

namespace {

const char* kPadToken = "<pad>";
const char* kBosToken = "<bos>";
const char* kEosToken = "<eos>";
const char* kUnkToken = "<unk>";

bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\r':
    case 0x0B:
    case 0x0C:
    case 0x85:
    case 0xA0:
    case 0x2028:
    case 0x2029:
    case 0x3000:
      return true;
    default:
      return (cp >= 0x2000 && cp <= 0x200A);
  }
}

}  // namespace

std::string lang_name(Lang lang) {
  switch (lang) {
    case Lang::zh: return "zh";
    case Lang::ms: return "ms";
    case Lang::id: return "id";
    case Lang::synthetic: return "synthetic";
  }
  return "synthetic";
}

Lang lang_from_name(std::string_view name) {
  if (name == "zh") return Lang::zh;
  if (name == "ms") return Lang::ms;
  if (name == "id") return Lang::id;
  if (name == "synthetic") return Lang::synthetic;
  fail(ErrorCode::config, "unknown language tag: " + std::string(name));
}

std::string normalize_entities(std::string_view text, EntityDirection dir) {
  std::string out;
  out.reserve(text.size());
  if (dir == EntityDirection::decode) {
    size_t i = 0;
    while (i < text.size()) {
      // "&amp;" first so its trailing ';' is consumed; then the bare "&amp"
      // form that appears in the crawled data.
      if (text.compare(i, 5, "&amp;") == 0) {
        out.push_back('&');
        i += 5;
      } else if (text.compare(i, 4, "&amp") == 0) {
        out.push_back('&');
        i += 4;
      } else {
        out.push_back(text[i]);
        ++i;
      }
    }
  } else {
    for (char c : text) {
      if (c == '&') {
        out += "&amp;";
      } else {
        out.push_back(c);
      }
    }
  }
  return out;
}

std::string to_halfwidth(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    char32_t cp = utf8::decode_next(text, i);
    if (cp >= 0xFF01 && cp <= 0xFF5E) {
      cp -= 0xFEE0;
    } else if (cp == 0x3000) {
      cp = 0x20;
    }
    utf8::append_codepoint(out, cp);
  }
  return out;
}

SimplificationTable load_simplification_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::missing_table,
         "cannot open simplification table: " + path);
  }
  SimplificationTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      fail(ErrorCode::missing_table,
           path + ":" + std::to_string(line_no) + ": expected TRAD<TAB>SIMP");
    }
    const auto trad = utf8::to_codepoints(line.substr(0, tab));
    const auto simp = utf8::to_codepoints(line.substr(tab + 1));
    if (trad.size() != 1 || simp.size() != 1) {
      fail(ErrorCode::missing_table,
           path + ":" + std::to_string(line_no) +
               ": mapping must be single code points");
    }
    table[trad[0]] = simp[0];
  }
  if (table.empty()) {
    fail(ErrorCode::missing_table, "simplification table is empty: " + path);
  }
  return table;
}

std::string traditional_to_simplified(std::string_view text,
                                      const SimplificationTable& table) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    char32_t cp = utf8::decode_next(text, i);
    auto it = table.find(cp);
    utf8::append_codepoint(out, it == table.end() ? cp : it->second);
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text, TokenizerMode mode) {
  std::vector<std::string> tokens;
  if (mode == TokenizerMode::word) {
    std::string current;
    size_t i = 0;
    while (i < text.size()) {
      char32_t cp = utf8::decode_next(text, i);
      if (is_unicode_space(cp)) {
        if (!current.empty()) {
          tokens.push_back(std::move(current));
          current.clear();
        }
      } else {
        utf8::append_codepoint(current, cp);
      }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
  } else {
    size_t i = 0;
    while (i < text.size()) {
      char32_t cp = utf8::decode_next(text, i);
      if (is_unicode_space(cp)) continue;
      std::string tok;
      utf8::append_codepoint(tok, cp);
      tokens.push_back(std::move(tok));
    }
  }
  return tokens;
}

std::vector<std::string> prepare_for_scoring(const Sentence& s,
                                             TokenizerMode mode) {
  std::string text = normalize_entities(s.text, EntityDirection::decode);
  if (s.lang == Lang::zh) text = to_halfwidth(text);
  return tokenize(text, mode);
}

Vocabulary::Vocabulary() {
  tokens_ = {kPadToken, kBosToken, kEosToken, kUnkToken};
  for (int i = 0; i < num_specials; ++i) index_[tokens_[i]] = i;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  Vocabulary v;
  v.tokens_.reserve(tokens.size() + num_specials);
  for (const auto& t : tokens) {
    if (v.index_.count(t)) {
      fail(ErrorCode::config, "duplicate vocabulary token: " + t);
    }
    v.index_[t] = static_cast<int>(v.tokens_.size());
    v.tokens_.push_back(t);
  }
  return v;
}

int Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? unk_id : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return index_.count(std::string(token)) != 0;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) {
    fail(ErrorCode::invalid_id,
         "token id " + std::to_string(id) + " out of range [0, " +
             std::to_string(size()) + ")");
  }
  return tokens_[id];
}

uint64_t Vocabulary::content_hash() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : tokens_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0x1F;  // token boundary
    h *= 0x100000001b3ULL;
  }
  return h;
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpus,
                       int min_count, int max_size,
                       const std::vector<std::string>& extra_tokens) {
  if (min_count < 1) fail(ErrorCode::config, "min_count must be >= 1");
  if (max_size < Vocabulary::num_specials + 1) {
    fail(ErrorCode::config, "max_size must be >= 5");
  }
  std::unordered_map<std::string, long long> counts;
  for (const auto& sent : corpus) {
    for (const auto& tok : sent) ++counts[tok];
  }
  std::vector<std::pair<std::string, long long>> items;
  items.reserve(counts.size());
  for (auto& kv : counts) {
    if (kv.second >= min_count) items.emplace_back(kv.first, kv.second);
  }
  if (items.empty() && extra_tokens.empty()) {
    fail(ErrorCode::empty_corpus,
         "no token meets min_count=" + std::to_string(min_count));
  }
  // Lexicographic tie-break keeps the ordering reproducible across runs.
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  std::vector<std::string> ordered;
  std::unordered_map<std::string, bool> seen;
  for (const auto& t : extra_tokens) {
    if (!seen[t]) {
      ordered.push_back(t);
      seen[t] = true;
    }
  }
  const size_t budget =
      static_cast<size_t>(max_size) - Vocabulary::num_specials;
  for (const auto& [tok, cnt] : items) {
    if (ordered.size() >= budget) break;
    if (!seen[tok]) {
      ordered.push_back(tok);
      seen[tok] = true;
    }
  }
  return Vocabulary::from_tokens(ordered);
}

TokenIds encode(const std::vector<std::string>& tokens, const Vocabulary& v,
                bool add_bos_eos) {
  TokenIds ids;
  ids.reserve(tokens.size() + 2);
  if (add_bos_eos) ids.push_back(Vocabulary::bos_id);
  for (const auto& t : tokens) ids.push_back(v.id(t));
  if (add_bos_eos) ids.push_back(Vocabulary::eos_id);
  return ids;
}

std::vector<std::string> decode(const TokenIds& ids, const Vocabulary& v) {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (int id : ids) {
    if (id < 0 || id >= v.size()) {
      fail(ErrorCode::invalid_id,
           "cannot decode id " + std::to_string(id) + " with vocabulary of " +
               std::to_string(v.size()) + " entries");
    }
    if (Vocabulary::is_special(id)) continue;
    tokens.push_back(v.token(id));
  }
  return tokens;
}

std::string detokenize(const std::vector<std::string>& tokens,
                       TokenizerMode mode) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (mode == TokenizerMode::word && i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

}  // namespace lrnmt
