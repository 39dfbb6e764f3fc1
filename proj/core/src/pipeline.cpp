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

#include "lrnmt/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lrnmt/error.hpp"
#include "lrnmt/trainer.hpp"

namespace lrnmt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void expect_keys(const json& obj, const std::string& section,
                 const std::vector<std::string>& allowed) {
  if (!obj.is_object()) {
    fail(ErrorCode::config, "config section '" + section +
                                "' must be a JSON object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(ErrorCode::config,
           "unknown key '" + key + "' in config section '" + section + "'");
    }
  }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::config, "config key '" + key + "' has the wrong type");
  }
}

void parse_in_trust(const json& obj, InTrustParams& p) {
  expect_keys(obj, "in_trust", {"alpha", "beta", "delta"});
  p.alpha = get_or(obj, "alpha", p.alpha);
  p.beta = get_or(obj, "beta", p.beta);
  p.delta = get_or(obj, "delta", p.delta);
}

void parse_model(const json& obj, ModelConfig& m) {
  expect_keys(obj, "model",
              {"d_model", "heads", "d_ff", "enc_layers", "dec_layers",
               "max_len"});
  m.d_model = get_or(obj, "d_model", m.d_model);
  m.heads = get_or(obj, "heads", m.heads);
  m.d_ff = get_or(obj, "d_ff", m.d_ff);
  m.enc_layers = get_or(obj, "enc_layers", m.enc_layers);
  m.dec_layers = get_or(obj, "dec_layers", m.dec_layers);
  m.max_len = get_or(obj, "max_len", m.max_len);
}

void parse_train(const json& obj, TrainConfig& t) {
  expect_keys(obj, "train",
              {"batch_size", "epochs", "lr_init", "lr_min", "beta1", "beta2",
               "adam_eps", "weight_decay", "warmup_epochs"});
  t.batch_size = get_or(obj, "batch_size", t.batch_size);
  t.epochs = get_or(obj, "epochs", t.epochs);
  t.lr_init = get_or(obj, "lr_init", t.lr_init);
  t.lr_min = get_or(obj, "lr_min", t.lr_min);
  t.beta1 = get_or(obj, "beta1", t.beta1);
  t.beta2 = get_or(obj, "beta2", t.beta2);
  t.adam_eps = get_or(obj, "adam_eps", t.adam_eps);
  t.weight_decay = get_or(obj, "weight_decay", t.weight_decay);
  t.warmup_epochs = get_or(obj, "warmup_epochs", t.warmup_epochs);
}

void parse_skipgram(const json& obj, SkipgramConfig& s) {
  expect_keys(obj, "skipgram",
              {"dim", "window", "negatives", "epochs", "lr", "min_count"});
  s.dim = get_or(obj, "dim", s.dim);
  s.window = get_or(obj, "window", s.window);
  s.negatives = get_or(obj, "negatives", s.negatives);
  s.epochs = get_or(obj, "epochs", s.epochs);
  s.lr = get_or(obj, "lr", s.lr);
  s.min_count = get_or(obj, "min_count", s.min_count);
}

void parse_augment(const json& obj, AugmentSettings& a) {
  expect_keys(obj, "augment",
              {"enabled", "expansion_factor", "substitutions_per_sentence",
               "top_k", "min_similarity"});
  a.enabled = get_or(obj, "enabled", a.enabled);
  a.cfg.expansion_factor =
      get_or(obj, "expansion_factor", a.cfg.expansion_factor);
  a.cfg.substitutions_per_sentence = get_or(
      obj, "substitutions_per_sentence", a.cfg.substitutions_per_sentence);
  a.cfg.top_k = get_or(obj, "top_k", a.cfg.top_k);
  a.cfg.min_similarity = get_or(obj, "min_similarity", a.cfg.min_similarity);
}

void parse_curriculum(const json& obj, CurriculumSettings& c) {
  expect_keys(obj, "curriculum",
              {"enabled", "short_threshold", "concat_target_len",
               "family_epochs", "short_epochs", "long_epochs"});
  c.enabled = get_or(obj, "enabled", c.enabled);
  c.cfg.short_threshold = get_or(obj, "short_threshold", c.cfg.short_threshold);
  c.cfg.concat_target_len =
      get_or(obj, "concat_target_len", c.cfg.concat_target_len);
  c.cfg.family_epochs = get_or(obj, "family_epochs", c.cfg.family_epochs);
  c.cfg.short_epochs = get_or(obj, "short_epochs", c.cfg.short_epochs);
  c.cfg.long_epochs = get_or(obj, "long_epochs", c.cfg.long_epochs);
}

void parse_decode(const json& obj, DecodeConfig& d) {
  expect_keys(obj, "decode",
              {"beam", "groups", "beam_per_group", "lambda_div", "max_len",
               "length_norm"});
  d.beam = get_or(obj, "beam", d.beam);
  d.groups = get_or(obj, "groups", d.groups);
  d.beam_per_group = get_or(obj, "beam_per_group", d.beam_per_group);
  d.lambda_div = get_or(obj, "lambda_div", d.lambda_div);
  d.max_len = get_or(obj, "max_len", d.max_len);
  d.length_norm = get_or(obj, "length_norm", d.length_norm);
}

void parse_rerank(const json& obj, RerankSettings& r) {
  expect_keys(obj, "rerank",
              {"enabled", "epochs", "batch_size", "negatives", "tau",
               "lr_body", "lr_head", "lr_min", "d_proj", "layers",
               "train_subset"});
  r.enabled = get_or(obj, "enabled", r.enabled);
  r.cfg.epochs = get_or(obj, "epochs", r.cfg.epochs);
  r.cfg.batch_size = get_or(obj, "batch_size", r.cfg.batch_size);
  r.cfg.negatives = get_or(obj, "negatives", r.cfg.negatives);
  r.cfg.tau = get_or(obj, "tau", r.cfg.tau);
  r.cfg.lr_body = get_or(obj, "lr_body", r.cfg.lr_body);
  r.cfg.lr_head = get_or(obj, "lr_head", r.cfg.lr_head);
  r.cfg.lr_min = get_or(obj, "lr_min", r.cfg.lr_min);
  r.cfg.d_proj = get_or(obj, "d_proj", r.cfg.d_proj);
  r.cfg.layers = get_or(obj, "layers", r.cfg.layers);
  r.train_subset = get_or(obj, "train_subset", r.train_subset);
}

void parse_synthetic(const json& obj, SyntheticConfig& s) {
  expect_keys(obj, "synthetic",
              {"clusters", "synonyms", "min_len", "max_len", "train_pairs",
               "dev_pairs", "test_pairs", "family_pairs", "mono_sentences",
               "noise_rate", "sibling_overlap", "seed"});
  s.clusters = get_or(obj, "clusters", s.clusters);
  s.synonyms = get_or(obj, "synonyms", s.synonyms);
  s.min_len = get_or(obj, "min_len", s.min_len);
  s.max_len = get_or(obj, "max_len", s.max_len);
  s.train_pairs = get_or(obj, "train_pairs", s.train_pairs);
  s.dev_pairs = get_or(obj, "dev_pairs", s.dev_pairs);
  s.test_pairs = get_or(obj, "test_pairs", s.test_pairs);
  s.family_pairs = get_or(obj, "family_pairs", s.family_pairs);
  s.mono_sentences = get_or(obj, "mono_sentences", s.mono_sentences);
  s.noise_rate = get_or(obj, "noise_rate", s.noise_rate);
  s.sibling_overlap = get_or(obj, "sibling_overlap", s.sibling_overlap);
  s.seed = get_or(obj, "seed", s.seed);
}

std::string xml_escape(const std::string& text) {
  std::string amp = normalize_entities(text, EntityDirection::encode);
  std::string out;
  out.reserve(amp.size());
  for (char c : amp) {
    if (c == '<') {
      out += "&lt;";
    } else if (c == '>') {
      out += "&gt;";
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string xml_unescape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    if (text.compare(i, 4, "&lt;") == 0) {
      out.push_back('<');
      i += 4;
    } else if (text.compare(i, 4, "&gt;") == 0) {
      out.push_back('>');
      i += 4;
    } else if (text.compare(i, 5, "&amp;") == 0) {
      out.push_back('&');
      i += 5;
    } else {
      out.push_back(text[i]);
      ++i;
    }
  }
  return out;
}

std::vector<EncodedPair> encode_all(const std::vector<TokenPair>& pairs,
                                    const Vocabulary& src_vocab,
                                    const Vocabulary& tgt_vocab, int max_len) {
  std::vector<EncodedPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.push_back(encode_pair(p.src, p.tgt, src_vocab, tgt_vocab, max_len));
  }
  return out;
}

TokenIds encode_src(const std::vector<std::string>& tokens,
                    const Vocabulary& vocab, int max_len) {
  TokenIds ids = encode(tokens, vocab, /*add_bos_eos=*/false);
  if (static_cast<int>(ids.size()) > max_len - 1) ids.resize(max_len - 1);
  ids.push_back(Vocabulary::eos_id);
  return ids;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded()) {
    fail(ErrorCode::config, "config is not valid JSON");
  }
  expect_keys(root, "(top level)",
              {"seed", "out_dir", "loss", "label_smoothing", "in_trust",
               "vocab", "model", "train", "skipgram", "augment", "curriculum",
               "decode", "eval_beam", "rerank", "synthetic", "directions"});
  ExperimentConfig cfg;
  cfg.seed = get_or<uint64_t>(root, "seed", cfg.seed);
  cfg.out_dir = get_or<std::string>(root, "out_dir", cfg.out_dir);
  cfg.loss = get_or<std::string>(root, "loss", cfg.loss);
  if (cfg.loss != "ce" && cfg.loss != "in_trust") {
    fail(ErrorCode::config, "loss must be 'ce' or 'in_trust'");
  }
  cfg.label_smoothing = get_or(root, "label_smoothing", cfg.label_smoothing);
  if (root.contains("in_trust")) parse_in_trust(root["in_trust"], cfg.in_trust);
  if (root.contains("vocab")) {
    expect_keys(root["vocab"], "vocab", {"min_count", "max_size"});
    cfg.vocab.min_count =
        get_or(root["vocab"], "min_count", cfg.vocab.min_count);
    cfg.vocab.max_size = get_or(root["vocab"], "max_size", cfg.vocab.max_size);
  }
  if (root.contains("model")) parse_model(root["model"], cfg.model);
  if (root.contains("train")) parse_train(root["train"], cfg.train);
  if (root.contains("skipgram")) parse_skipgram(root["skipgram"], cfg.skipgram);
  if (root.contains("augment")) parse_augment(root["augment"], cfg.augment);
  if (root.contains("curriculum")) {
    parse_curriculum(root["curriculum"], cfg.curriculum);
  }
  if (root.contains("decode")) parse_decode(root["decode"], cfg.decode);
  cfg.eval_beam = get_or(root, "eval_beam", cfg.eval_beam);
  if (root.contains("rerank")) parse_rerank(root["rerank"], cfg.rerank);
  if (root.contains("synthetic")) {
    SyntheticConfig s;
    parse_synthetic(root["synthetic"], s);
    cfg.synthetic = s;
  }
  if (root.contains("directions")) {
    for (const auto& d : root["directions"]) {
      expect_keys(d, "directions[]",
                  {"name", "src_lang", "tgt_lang", "train", "dev", "test",
                   "family", "mono_src"});
      DirectionFiles f;
      f.name = get_or<std::string>(d, "name", "");
      f.src_lang = lang_from_name(get_or<std::string>(d, "src_lang", "synthetic"));
      f.tgt_lang = lang_from_name(get_or<std::string>(d, "tgt_lang", "synthetic"));
      f.train_tsv = get_or<std::string>(d, "train", "");
      f.dev_tsv = get_or<std::string>(d, "dev", "");
      f.test_tsv = get_or<std::string>(d, "test", "");
      f.family_tsv = get_or<std::string>(d, "family", "");
      f.mono_src = get_or<std::string>(d, "mono_src", "");
      if (f.name.empty() || f.train_tsv.empty() || f.dev_tsv.empty() ||
          f.test_tsv.empty()) {
        fail(ErrorCode::config,
             "each direction needs name, train, dev and test");
      }
      cfg.directions.push_back(std::move(f));
    }
  }
  if (!cfg.synthetic && cfg.directions.empty()) {
    fail(ErrorCode::config,
         "config needs either a 'synthetic' block or 'directions'");
  }
  // The seed fans out to every stochastic component.
  cfg.train.seed = cfg.seed;
  cfg.skipgram.seed = cfg.seed ^ 0xe621a1ULL;
  cfg.augment.cfg.seed = cfg.seed ^ 0x9c31bdULL;
  cfg.curriculum.cfg.seed = cfg.seed ^ 0x51f1dbULL;
  cfg.rerank.cfg.seed = cfg.seed ^ 0x2f6e2bULL;
  if (cfg.synthetic) cfg.synthetic->seed = cfg.seed ^ 0x77aa11ULL;
  return cfg;
}

ExperimentConfig load_experiment_config(
    const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config, "cannot open config: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();

  json root = json::parse(buffer.str(), nullptr, false);
  if (root.is_discarded()) {
    fail(ErrorCode::config, "config is not valid JSON: " + path);
  }
  for (const auto& assignment : overrides) {
    const size_t eq = assignment.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::config, "override must look like key.path=value: " +
                                  assignment);
    }
    const std::string key_path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;  // plain string

    json* node = &root;
    std::stringstream keys(key_path);
    std::string key;
    std::vector<std::string> parts;
    while (std::getline(keys, key, '.')) parts.push_back(key);
    if (parts.empty()) fail(ErrorCode::config, "empty override key");
    for (size_t i = 0; i + 1 < parts.size(); ++i) {
      node = &(*node)[parts[i]];
    }
    (*node)[parts.back()] = value;
  }
  return parse_experiment_config(root.dump());
}

std::vector<BuiltDirection> build_directions(const ExperimentConfig& cfg) {
  std::vector<BuiltDirection> out;
  if (cfg.synthetic) {
    for (auto& sd : make_benchmark(*cfg.synthetic)) {
      BuiltDirection d;
      d.name = sd.name;
      d.src_lang = Lang::synthetic;
      d.tgt_lang = Lang::synthetic;
      d.train = std::move(sd.train);
      d.dev = std::move(sd.dev);
      d.test = std::move(sd.test);
      d.family = std::move(sd.family);
      d.mono_src = std::move(sd.mono_src);
      out.push_back(std::move(d));
    }
    return out;
  }
  for (const auto& f : cfg.directions) {
    for (const std::string& p :
         {f.train_tsv, f.dev_tsv, f.test_tsv}) {
      if (!fs::exists(p)) {
        fail(ErrorCode::config, "direction '" + f.name +
                                    "': missing file " + p);
      }
    }
    BuiltDirection d;
    d.name = f.name;
    d.src_lang = f.src_lang;
    d.tgt_lang = f.tgt_lang;
    d.src_mode = mode_for_lang(f.src_lang);
    d.tgt_mode = mode_for_lang(f.tgt_lang);
    d.train = tokenize_pairs(
        load_parallel_tsv(f.train_tsv, f.src_lang, f.tgt_lang).pairs,
        d.src_mode, d.tgt_mode);
    d.dev = tokenize_pairs(
        load_parallel_tsv(f.dev_tsv, f.src_lang, f.tgt_lang).pairs,
        d.src_mode, d.tgt_mode);
    d.test = tokenize_pairs(
        load_parallel_tsv(f.test_tsv, f.src_lang, f.tgt_lang).pairs,
        d.src_mode, d.tgt_mode);
    if (!f.family_tsv.empty()) {
      if (!fs::exists(f.family_tsv)) {
        fail(ErrorCode::config, "direction '" + f.name +
                                    "': missing file " + f.family_tsv);
      }
      d.family = tokenize_pairs(
          load_parallel_tsv(f.family_tsv, f.src_lang, f.tgt_lang).pairs,
          d.src_mode, d.tgt_mode);
    }
    if (!f.mono_src.empty()) {
      if (!fs::exists(f.mono_src)) {
        fail(ErrorCode::config, "direction '" + f.name +
                                    "': missing file " + f.mono_src);
      }
      d.mono_src = tokenize_lines(load_monolingual(f.mono_src), d.src_mode);
    }
    out.push_back(std::move(d));
  }
  return out;
}

double corpus_bleu_beam_top1(const Seq2SeqModel& model,
                             const std::vector<TokenPair>& pairs,
                             const Vocabulary& src_vocab,
                             const Vocabulary& tgt_vocab,
                             const DecodeConfig& cfg) {
  ModelScorer scorer(model);
  std::vector<std::pair<Tokens, Tokens>> scored;
  scored.reserve(pairs.size());
  for (const auto& p : pairs) {
    const TokenIds src = encode_src(p.src, src_vocab, model.cfg.max_len);
    const auto hyps = beam_search(scorer, src, cfg);
    Tokens hyp_tokens;
    if (!hyps.empty()) hyp_tokens = decode(hyps.front().ids, tgt_vocab);
    scored.emplace_back(std::move(hyp_tokens), p.tgt);
  }
  BleuConfig bleu_cfg;
  return corpus_bleu_tokens(scored, bleu_cfg).bleu;
}

void write_submission(const std::vector<Sentence>& hyps,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write submission: " + path);
  out << "<translations>";
  for (size_t i = 0; i < hyps.size(); ++i) {
    out << "<seg id=\"" << (i + 1) << "\">" << xml_escape(hyps[i].text)
        << "</seg>";
  }
  out << "</translations>\n";
  if (!out) fail(ErrorCode::io, "short write: " + path);
}

std::vector<std::string> read_submission(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot read submission: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  std::vector<std::string> out;
  size_t pos = 0;
  while (true) {
    const size_t open = text.find("<seg ", pos);
    if (open == std::string::npos) break;
    const size_t start = text.find('>', open);
    const size_t end = text.find("</seg>", start);
    if (start == std::string::npos || end == std::string::npos) {
      fail(ErrorCode::io, "malformed submission file: " + path);
    }
    out.push_back(xml_unescape(text.substr(start + 1, end - start - 1)));
    pos = end + 6;
  }
  return out;
}

void write_candidates_jsonl(const std::vector<SentenceCandidates>& all,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write candidates: " + path);
  for (const auto& sc : all) {
    for (size_t i = 0; i < sc.hyps.size(); ++i) {
      const auto& h = sc.hyps[i];
      json j;
      j["sent"] = sc.sentence_index;
      j["ids"] = h.ids;
      j["logprob"] = h.logprob;
      j["group"] = h.group;
      if (h.score) j["score"] = *h.score;
      if (i < sc.texts.size()) j["text"] = sc.texts[i];
      out << j.dump() << '\n';
    }
  }
  if (!out) fail(ErrorCode::io, "short write: " + path);
}

std::vector<SentenceCandidates> read_candidates_jsonl(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot read candidates: " + path);
  std::vector<SentenceCandidates> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      fail(ErrorCode::io,
           path + ":" + std::to_string(line_no) + ": bad JSON line");
    }
    const int sent = j.value("sent", 0);
    if (out.empty() || out.back().sentence_index != sent) {
      SentenceCandidates sc;
      sc.sentence_index = sent;
      out.push_back(sc);
    }
    Hypothesis h;
    h.ids = j.value("ids", TokenIds{});
    h.logprob = j.value("logprob", 0.0);
    h.group = j.value("group", 0);
    if (j.contains("score")) h.score = j["score"].get<double>();
    out.back().hyps.push_back(std::move(h));
    out.back().texts.push_back(j.value("text", std::string{}));
  }
  return out;
}

uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot hash: " + path);
  uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  return h;
}

namespace {

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return std::string(buf);
}

struct ArtifactLog {
  fs::path root;
  std::vector<fs::path> files;

  void note(const fs::path& p) { files.push_back(p); }

  void write_manifest() const {
    json manifest = json::array();
    for (const auto& p : files) {
      if (!fs::exists(p)) continue;
      json entry;
      entry["path"] = fs::relative(p, root).generic_string();
      entry["bytes"] = static_cast<uint64_t>(fs::file_size(p));
      entry["fnv64"] = hex64(fnv1a_file(p.string()));
      manifest.push_back(entry);
    }
    std::ofstream out(root / "manifest.json");
    out << json{{"artifacts", manifest}}.dump(2) << '\n';
  }
};

std::vector<std::string> vocab_lines(const Vocabulary& v) {
  std::vector<std::string> lines;
  for (int id = Vocabulary::num_specials; id < v.size(); ++id) {
    lines.push_back(v.token(id));
  }
  return lines;
}

Sentence pair_sentence(const std::vector<std::string>& tokens,
                       TokenizerMode mode, Lang lang) {
  return Sentence{detokenize(tokens, mode), lang};
}

}  // namespace

RunReport run_pipeline(const ExperimentConfig& cfg) {
  const auto run_start = Clock::now();
  RunReport report;
  report.seed = cfg.seed;

  fs::create_directories(cfg.out_dir);
  ArtifactLog artifacts{fs::path(cfg.out_dir), {}};

  std::unique_ptr<SequenceLoss> loss;
  if (cfg.loss == "in_trust") {
    loss = std::make_unique<InTrustLoss>(cfg.in_trust);
  } else {
    loss = std::make_unique<CrossEntropyLoss>(cfg.label_smoothing);
  }

  auto directions = build_directions(cfg);
  for (auto& dir : directions) {
    DirectionOutcome outcome;
    outcome.name = dir.name;
    const fs::path dir_out = fs::path(cfg.out_dir) / dir.name;
    fs::create_directories(dir_out);
    auto component_start = Clock::now();
    auto lap = [&](const std::string& name) {
      outcome.timings.emplace_back(name, seconds_since(component_start));
      component_start = Clock::now();
    };

    // Preprocess: vocabularies over task + family text (plus source
    // monolingual data so augmentation substitutes stay in vocabulary).
    std::vector<std::vector<std::string>> src_corpus;
    std::vector<std::vector<std::string>> tgt_corpus;
    for (const auto& p : dir.train) {
      src_corpus.push_back(p.src);
      tgt_corpus.push_back(p.tgt);
    }
    for (const auto& p : dir.family) {
      src_corpus.push_back(p.src);
      tgt_corpus.push_back(p.tgt);
    }
    for (const auto& s : dir.mono_src) src_corpus.push_back(s);
    std::vector<std::string> extra;
    if (cfg.curriculum.enabled) extra.push_back(cfg.curriculum.cfg.separator);
    const Vocabulary src_vocab =
        build_vocab(src_corpus, cfg.vocab.min_count, cfg.vocab.max_size, extra);
    const Vocabulary tgt_vocab =
        build_vocab(tgt_corpus, cfg.vocab.min_count, cfg.vocab.max_size, extra);
    save_lines(vocab_lines(src_vocab), (dir_out / "vocab.src.txt").string());
    save_lines(vocab_lines(tgt_vocab), (dir_out / "vocab.tgt.txt").string());
    artifacts.note(dir_out / "vocab.src.txt");
    artifacts.note(dir_out / "vocab.tgt.txt");
    lap("preprocess");

    // Skip-gram word vectors from monolingual + training source text.
    std::vector<std::vector<std::string>> embed_corpus = dir.mono_src;
    for (const auto& p : dir.train) embed_corpus.push_back(p.src);
    const EmbeddingTable table = train_skipgram(embed_corpus, cfg.skipgram);
    save_embeddings(table, (dir_out / "embeddings.vec").string());
    artifacts.note(dir_out / "embeddings.vec");
    lap("skipgram");

    // Source-side substitution augmentation.
    std::vector<TokenPair> train_data = dir.train;
    if (cfg.augment.enabled) {
      train_data = augment_by_substitution(dir.train, table, cfg.augment.cfg);
      std::vector<std::pair<Sentence, Sentence>> rows;
      rows.reserve(train_data.size());
      for (const auto& p : train_data) {
        rows.emplace_back(pair_sentence(p.src, dir.src_mode, dir.src_lang),
                          pair_sentence(p.tgt, dir.tgt_mode, dir.tgt_lang));
      }
      save_parallel_tsv(rows, (dir_out / "augmented.tsv").string());
      artifacts.note(dir_out / "augmented.tsv");
    }
    lap("augment");

    // Training (curriculum or flat).
    ModelConfig model_cfg = cfg.model;
    model_cfg.src_vocab = src_vocab.size();
    model_cfg.tgt_vocab = tgt_vocab.size();
    Seq2SeqModel model = make_seq2seq(model_cfg, cfg.seed,
                                      src_vocab.content_hash(),
                                      tgt_vocab.content_hash());
    DecodeConfig eval_cfg = cfg.decode;
    eval_cfg.beam = cfg.eval_beam;
    const DevEvaluator evaluator = [&](const Seq2SeqModel& m) {
      return corpus_bleu_beam_top1(m, dir.dev, src_vocab, tgt_vocab, eval_cfg);
    };
    if (cfg.curriculum.enabled) {
      const Schedule schedule =
          build_schedule(dir.family, train_data, cfg.curriculum.cfg);
      outcome.stage_metrics = run_curriculum(
          model, schedule, src_vocab, tgt_vocab, cfg.train, *loss, evaluator,
          [&](const std::string& stage, const Seq2SeqModel& m) {
            const fs::path p = dir_out / ("stage_" + stage + ".ckpt");
            save_checkpoint(m, p.string());
            artifacts.note(p);
          });
    } else {
      std::vector<TokenPair> flat = dir.family;
      flat.insert(flat.end(), train_data.begin(), train_data.end());
      const auto encoded =
          encode_all(flat, src_vocab, tgt_vocab, model_cfg.max_len);
      const auto stats = train_epochs(model, encoded, cfg.train, *loss);
      for (const auto& es : stats) {
        StageMetrics row;
        row.stage = "flat";
        row.epoch = es.epoch;
        row.loss = es.mean_loss;
        outcome.stage_metrics.push_back(row);
      }
      if (!outcome.stage_metrics.empty()) {
        outcome.stage_metrics.back().dev_bleu = evaluator(model);
      }
    }
    {
      std::ofstream metrics_out(dir_out / "stage_metrics.jsonl");
      for (const auto& row : outcome.stage_metrics) {
        json j{{"stage", row.stage}, {"epoch", row.epoch}, {"loss", row.loss}};
        if (row.dev_bleu >= 0) {
          j["dev_bleu"] = row.dev_bleu;
        } else {
          j["dev_bleu"] = nullptr;
        }
        metrics_out << j.dump() << '\n';
      }
    }
    artifacts.note(dir_out / "stage_metrics.jsonl");
    save_checkpoint(model, (dir_out / "model.ckpt").string());
    artifacts.note(dir_out / "model.ckpt");
    lap("train");

    // Diverse-beam candidates for dev and test.
    ModelScorer scorer(model);
    auto decode_set = [&](const std::vector<TokenPair>& pairs) {
      std::vector<SentenceCandidates> all;
      all.reserve(pairs.size());
      for (size_t i = 0; i < pairs.size(); ++i) {
        const TokenIds src =
            encode_src(pairs[i].src, src_vocab, model.cfg.max_len);
        SentenceCandidates sc;
        sc.sentence_index = static_cast<int>(i);
        sc.hyps = dedup_candidates(diverse_beam_search(scorer, src, cfg.decode));
        for (const auto& h : sc.hyps) {
          sc.texts.push_back(
              detokenize(decode(h.ids, tgt_vocab), dir.tgt_mode));
        }
        all.push_back(std::move(sc));
      }
      return all;
    };
    const auto dev_candidates = decode_set(dir.dev);
    const auto test_candidates = decode_set(dir.test);
    write_candidates_jsonl(dev_candidates,
                           (dir_out / "candidates.dev.jsonl").string());
    write_candidates_jsonl(test_candidates,
                           (dir_out / "candidates.test.jsonl").string());
    artifacts.note(dir_out / "candidates.dev.jsonl");
    artifacts.note(dir_out / "candidates.test.jsonl");
    lap("decode");

    // Contrastive re-ranker.
    std::optional<RerankEncoder> reranker;
    if (cfg.rerank.enabled) {
      std::vector<std::pair<Sentence, Sentence>> rr_pairs;
      const size_t take = std::min<size_t>(
          dir.train.size(), static_cast<size_t>(cfg.rerank.train_subset));
      for (size_t i = 0; i < take; ++i) {
        rr_pairs.emplace_back(
            pair_sentence(dir.train[i].src, dir.src_mode, dir.src_lang),
            pair_sentence(dir.train[i].tgt, dir.tgt_mode, dir.tgt_lang));
      }
      RerankConfig rr_cfg = cfg.rerank.cfg;
      rr_cfg.d_model = cfg.model.d_model;
      rr_cfg.heads = cfg.model.heads;
      rr_cfg.d_ff = cfg.model.d_ff;
      rr_cfg.max_len = cfg.model.max_len;
      reranker = train_reranker(rr_pairs, model, src_vocab, tgt_vocab,
                                dir.src_mode, dir.tgt_mode, rr_cfg,
                                cfg.decode);
      save_reranker(*reranker, (dir_out / "reranker.ckpt").string());
      artifacts.note(dir_out / "reranker.ckpt");
    }
    lap("rerank_train");

    // Final selection: re-ranked top-1 (or beam top-1 without a re-ranker).
    std::vector<std::pair<Tokens, Tokens>> final_pairs;
    std::vector<Sentence> final_sentences;
    for (size_t i = 0; i < dir.test.size(); ++i) {
      const auto& cands = test_candidates[i].hyps;
      Tokens hyp_tokens;
      if (!cands.empty()) {
        if (reranker) {
          const Sentence src_sentence =
              pair_sentence(dir.test[i].src, dir.src_mode, dir.src_lang);
          const auto ranked = rerank(*reranker, src_sentence, cands);
          hyp_tokens = decode(ranked.front().ids, tgt_vocab);
        } else {
          hyp_tokens = decode(cands.front().ids, tgt_vocab);
        }
      }
      final_sentences.push_back(
          pair_sentence(hyp_tokens, dir.tgt_mode, dir.tgt_lang));
      final_pairs.emplace_back(std::move(hyp_tokens), dir.test[i].tgt);
    }
    lap("rerank_apply");

    // Scores: plain beam top-1 baseline and the re-ranked system.
    outcome.beam_top1_bleu =
        corpus_bleu_beam_top1(model, dir.test, src_vocab, tgt_vocab, eval_cfg);
    BleuConfig bleu_cfg;
    outcome.report = corpus_bleu_tokens(final_pairs, bleu_cfg);
    outcome.reranked_bleu = outcome.report.bleu;
    {
      json j{{"bleu", outcome.report.bleu},
             {"precisions", outcome.report.precisions},
             {"brevity_penalty", outcome.report.brevity_penalty},
             {"hyp_len", outcome.report.hyp_len},
             {"ref_len", outcome.report.ref_len},
             {"beam_top1_bleu", outcome.beam_top1_bleu}};
      std::ofstream out(dir_out / "bleu.json");
      out << j.dump(2) << '\n';
    }
    artifacts.note(dir_out / "bleu.json");

    std::vector<std::string> hyp_lines;
    for (const auto& s : final_sentences) hyp_lines.push_back(s.text);
    save_lines(hyp_lines, (dir_out / "hyps.test.txt").string());
    artifacts.note(dir_out / "hyps.test.txt");
    write_submission(final_sentences, (dir_out / "submission.xml").string());
    artifacts.note(dir_out / "submission.xml");
    lap("score");

    report.directions.push_back(std::move(outcome));
  }

  if (report.directions.size() == 4) {
    std::vector<double> values;
    for (const auto& d : report.directions) values.push_back(d.reranked_bleu);
    report.leaderboard_average = leaderboard_average(values);
  }
  report.total_seconds = seconds_since(run_start);

  {
    std::ofstream out(fs::path(cfg.out_dir) / "report.json");
    out << run_report_to_json(report) << '\n';
  }
  artifacts.write_manifest();
  return report;
}

std::string run_report_to_json(const RunReport& report) {
  json j;
  j["seed"] = report.seed;
  j["total_seconds"] = report.total_seconds;
  if (report.leaderboard_average) {
    j["leaderboard_average"] = *report.leaderboard_average;
  }
  j["directions"] = json::array();
  for (const auto& d : report.directions) {
    json dj;
    dj["name"] = d.name;
    dj["beam_top1_bleu"] = d.beam_top1_bleu;
    dj["reranked_bleu"] = d.reranked_bleu;
    dj["bleu"] = {{"bleu", d.report.bleu},
                  {"precisions", d.report.precisions},
                  {"brevity_penalty", d.report.brevity_penalty},
                  {"hyp_len", d.report.hyp_len},
                  {"ref_len", d.report.ref_len}};
    dj["stages"] = json::array();
    for (const auto& row : d.stage_metrics) {
      json sj{{"stage", row.stage}, {"epoch", row.epoch}, {"loss", row.loss}};
      if (row.dev_bleu >= 0) sj["dev_bleu"] = row.dev_bleu;
      dj["stages"].push_back(sj);
    }
    dj["timings"] = json::array();
    for (const auto& [name, seconds] : d.timings) {
      dj["timings"].push_back({{"component", name}, {"seconds", seconds}});
    }
    j["directions"].push_back(dj);
  }
  return j.dump(2);
}

}  // namespace lrnmt
