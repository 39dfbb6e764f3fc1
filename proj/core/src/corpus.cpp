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

#include "lrnmt/corpus.hpp"

#include <fstream>

#include "lrnmt/error.hpp"

namespace lrnmt {

namespace {

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

ParallelCorpus load_parallel_tsv(const std::string& path, Lang src_lang,
                                 Lang tgt_lang) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open parallel corpus: " + path);
  ParallelCorpus corpus;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos ||
        line.find('\t', tab + 1) != std::string::npos) {
      ++corpus.skipped_lines;
      continue;
    }
    Sentence src{normalize_entities(line.substr(0, tab),
                                    EntityDirection::decode),
                 src_lang};
    Sentence tgt{normalize_entities(line.substr(tab + 1),
                                    EntityDirection::decode),
                 tgt_lang};
    if (src.text.empty() || tgt.text.empty()) {
      ++corpus.skipped_lines;
      continue;
    }
    corpus.pairs.emplace_back(std::move(src), std::move(tgt));
  }
  return corpus;
}

std::vector<std::string> load_monolingual(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open monolingual corpus: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    lines.push_back(normalize_entities(line, EntityDirection::decode));
  }
  return lines;
}

void save_parallel_tsv(const std::vector<std::pair<Sentence, Sentence>>& pairs,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write parallel corpus: " + path);
  for (const auto& [src, tgt] : pairs) {
    out << src.text << '\t' << tgt.text << '\n';
  }
  if (!out) fail(ErrorCode::io, "short write: " + path);
}

void save_lines(const std::vector<std::string>& lines,
                const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write: " + path);
  for (const auto& l : lines) out << l << '\n';
  if (!out) fail(ErrorCode::io, "short write: " + path);
}

void save_vocab(const Vocabulary& vocab, const std::string& path) {
  std::vector<std::string> lines;
  for (int id = Vocabulary::num_specials; id < vocab.size(); ++id) {
    lines.push_back(vocab.token(id));
  }
  save_lines(lines, path);
}

Vocabulary load_vocab(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open vocabulary: " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (!line.empty()) tokens.push_back(line);
  }
  return Vocabulary::from_tokens(tokens);
}

std::vector<TokenPair> tokenize_pairs(
    const std::vector<std::pair<Sentence, Sentence>>& pairs,
    TokenizerMode src_mode, TokenizerMode tgt_mode) {
  std::vector<TokenPair> out;
  out.reserve(pairs.size());
  for (const auto& [src, tgt] : pairs) {
    TokenPair p;
    p.src = prepare_for_scoring(src, src_mode);
    p.tgt = prepare_for_scoring(tgt, tgt_mode);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::vector<std::string>> tokenize_lines(
    const std::vector<std::string>& lines, TokenizerMode mode) {
  std::vector<std::vector<std::string>> out;
  out.reserve(lines.size());
  for (const auto& l : lines) out.push_back(tokenize(l, mode));
  return out;
}

}  // namespace lrnmt
