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

#ifndef LRNMT_CORPUS_HPP_
#define LRNMT_CORPUS_HPP_

#include <string>
#include <vector>

#include "lrnmt/embeddings.hpp"
#include "lrnmt/textproc.hpp"

namespace lrnmt {

struct ParallelCorpus {
  std::vector<std::pair<Sentence, Sentence>> pairs;
  int skipped_lines = 0;
};

// UTF-8 TSV, "source<TAB>target" per line. Lines without exactly two
// fields are skipped and counted; CRLF endings are normalized; both sides
// are entity-decoded. Throws Error(io) when the file cannot be read.
ParallelCorpus load_parallel_tsv(const std::string& path, Lang src_lang,
                                 Lang tgt_lang);

// One sentence per line, entity-decoded; blank lines are dropped.
std::vector<std::string> load_monolingual(const std::string& path);

void save_parallel_tsv(const std::vector<std::pair<Sentence, Sentence>>& pairs,
                       const std::string& path);
void save_lines(const std::vector<std::string>& lines,
                const std::string& path);

// Vocabulary files: one non-special token per line, in id order.
void save_vocab(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocab(const std::string& path);

std::vector<TokenPair> tokenize_pairs(
    const std::vector<std::pair<Sentence, Sentence>>& pairs,
    TokenizerMode src_mode, TokenizerMode tgt_mode);

std::vector<std::vector<std::string>> tokenize_lines(
    const std::vector<std::string>& lines, TokenizerMode mode);

}  // namespace lrnmt

#endif  // LRNMT_CORPUS_HPP_
