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
// Deterministic text normalization, tokenization and vocabulary
// construction. Everything in this header is a pure function over
// immutable inputs; a Vocabulary never changes after construction.

#ifndef LRNMT_TEXTPROC_HPP_
#define LRNMT_TEXTPROC_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lrnmt {

enum class Lang { zh, ms, id, synthetic };

std::string lang_name(Lang lang);
Lang lang_from_name(std::string_view name);

struct Sentence {
  std::string text;
  Lang lang = Lang::synthetic;
};

enum class TokenizerMode { word, charwise };

// Scoring convention: character tokens whenever the evaluated side is
// Chinese, whitespace words otherwise.
inline TokenizerMode mode_for_lang(Lang lang) {
  return lang == Lang::zh ? TokenizerMode::charwise : TokenizerMode::word;
}

enum class EntityDirection { decode, encode };

// decode: "&amp;" and the bare "&amp" both become "&".
// encode: "&" becomes "&amp;" (submission form).
std::string normalize_entities(std::string_view text, EntityDirection dir);

// Folds U+FF01..U+FF5E to ASCII (code point - 0xFEE0) and the ideographic
// space U+3000 to U+0020. All other code points pass through. Idempotent.
std::string to_halfwidth(std::string_view text);

using SimplificationTable = std::unordered_map<char32_t, char32_t>;

// Loads a "TRAD<TAB>SIMP" per line mapping file; '#' starts a comment.
// Throws Error(missing_table) when the file cannot be read or parsed.
SimplificationTable load_simplification_table(const std::string& path);

// Per-codepoint replacement; characters absent from the table pass through,
// so output length in code points equals input length.
std::string traditional_to_simplified(std::string_view text,
                                      const SimplificationTable& table);

// word: split on Unicode whitespace, case preserved.
// charwise: one token per Unicode scalar, whitespace dropped.
std::vector<std::string> tokenize(std::string_view text, TokenizerMode mode);

// Entity decode, half-width folding for Chinese, then tokenize. This is the
// exact preprocessing applied to both sides before scoring.
std::vector<std::string> prepare_for_scoring(const Sentence& s,
                                             TokenizerMode mode);

class Vocabulary {
 public:
  static constexpr int pad_id = 0;
  static constexpr int bos_id = 1;
  static constexpr int eos_id = 2;
  static constexpr int unk_id = 3;
  static constexpr int num_specials = 4;

  Vocabulary();

  // Builds a vocabulary whose non-special entries are exactly `tokens`,
  // in order. Duplicates are rejected.
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  int id(std::string_view token) const;        // unk_id when absent
  bool contains(std::string_view token) const;
  const std::string& token(int id) const;      // throws invalid_id
  int size() const { return static_cast<int>(tokens_.size()); }

  static bool is_special(int id) { return id >= 0 && id < num_specials; }

  const std::vector<std::string>& tokens() const { return tokens_; }

  // FNV-1a over the ordered token list; stored in checkpoints so a model is
  // never silently paired with the wrong vocabulary.
  uint64_t content_hash() const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// Frequency-sorted vocabulary: tokens with count >= min_count, ordered by
// (count desc, token asc), truncated to max_size including the specials.
// `extra_tokens` (e.g. a curriculum separator) are placed right after the
// specials and are exempt from the frequency filter.
// Throws Error(empty_corpus) when nothing qualifies.
Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpus,
                       int min_count, int max_size,
                       const std::vector<std::string>& extra_tokens = {});

using TokenIds = std::vector<int>;

// Unknown tokens map to unk_id.
TokenIds encode(const std::vector<std::string>& tokens, const Vocabulary& v,
                bool add_bos_eos);

// Strips all specials. Throws Error(invalid_id) on an id >= v.size().
std::vector<std::string> decode(const TokenIds& ids, const Vocabulary& v);

// Inverse of tokenize for display: words joined by spaces, characters
// concatenated.
std::string detokenize(const std::vector<std::string>& tokens,
                       TokenizerMode mode);

}  // namespace lrnmt

#endif  // LRNMT_TEXTPROC_HPP_
