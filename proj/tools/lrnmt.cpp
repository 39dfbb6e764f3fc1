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
// Command-line driver. Exit codes: 0 success, 2 configuration error,
// 3 data error, 4 numeric failure.

#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lrnmt/corpus.hpp"
#include "lrnmt/curriculum.hpp"
#include "lrnmt/decoding.hpp"
#include "lrnmt/embeddings.hpp"
#include "lrnmt/error.hpp"
#include "lrnmt/metrics.hpp"
#include "lrnmt/pipeline.hpp"
#include "lrnmt/reranker.hpp"
#include "lrnmt/synthetic.hpp"
#include "lrnmt/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lrnmt;

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::config:
      return 2;
    case ErrorCode::non_finite_loss:
    case ErrorCode::zero_vector:
    case ErrorCode::invalid_distribution:
    case ErrorCode::degenerate_input:
    case ErrorCode::shape_mismatch:
    case ErrorCode::id_out_of_range:
      return 4;
    default:
      return 3;
  }
}

TokenizerMode parse_mode(const std::string& mode) {
  if (mode == "word") return TokenizerMode::word;
  if (mode == "char") return TokenizerMode::charwise;
  fail(ErrorCode::config, "mode must be word or char");
}

std::vector<std::string> read_lines_checked(const std::string& path) {
  return load_monolingual(path);
}

json bleu_report_json(const BleuReport& r) {
  return json{{"bleu", r.bleu},
              {"precisions", r.precisions},
              {"brevity_penalty", r.brevity_penalty},
              {"hyp_len", r.hyp_len},
              {"ref_len", r.ref_len}};
}

void write_toy_corpus(const std::string& out_dir, uint64_t seed) {
  SyntheticConfig cfg;
  cfg.seed = seed;
  fs::create_directories(out_dir);
  for (const auto& dir : make_benchmark(cfg)) {
    const fs::path base = fs::path(out_dir) / dir.name;
    fs::create_directories(base);
    auto dump_pairs = [&](const std::vector<TokenPair>& pairs,
                          const std::string& name) {
      std::vector<std::pair<Sentence, Sentence>> rows;
      for (const auto& p : pairs) {
        rows.emplace_back(
            Sentence{detokenize(p.src, TokenizerMode::word), Lang::synthetic},
            Sentence{detokenize(p.tgt, TokenizerMode::word), Lang::synthetic});
      }
      save_parallel_tsv(rows, (base / name).string());
    };
    dump_pairs(dir.train, "train.tsv");
    dump_pairs(dir.dev, "dev.tsv");
    dump_pairs(dir.test, "test.tsv");
    dump_pairs(dir.family, "family.tsv");
    std::vector<std::string> mono;
    for (const auto& s : dir.mono_src) {
      mono.push_back(detokenize(s, TokenizerMode::word));
    }
    save_lines(mono, (base / "mono.src.txt").string());
    std::cout << dir.name << ": " << dir.train.size() << " train, "
              << dir.dev.size() << " dev, " << dir.test.size() << " test, "
              << dir.family.size() << " family pairs\n";
  }
}

struct TrainArgs {
  std::string train_tsv, family_tsv, dev_tsv;
  std::string src_lang = "synthetic", tgt_lang = "synthetic";
  std::string out_ckpt;
  std::string loss = "in_trust";
  InTrustParams in_trust;
  TrainConfig train;
  ModelConfig model;
  CurriculumConfig curriculum;
  bool use_curriculum = false;
  int vocab_min_count = 1;
  int vocab_max_size = 20000;
  uint64_t seed = 7;
};

void run_train(const TrainArgs& args) {
  const Lang src_lang = lang_from_name(args.src_lang);
  const Lang tgt_lang = lang_from_name(args.tgt_lang);
  const TokenizerMode src_mode = mode_for_lang(src_lang);
  const TokenizerMode tgt_mode = mode_for_lang(tgt_lang);

  const auto train_pairs = tokenize_pairs(
      load_parallel_tsv(args.train_tsv, src_lang, tgt_lang).pairs, src_mode,
      tgt_mode);
  std::vector<TokenPair> family_pairs;
  if (!args.family_tsv.empty()) {
    family_pairs = tokenize_pairs(
        load_parallel_tsv(args.family_tsv, src_lang, tgt_lang).pairs,
        src_mode, tgt_mode);
  }

  std::vector<std::vector<std::string>> src_corpus, tgt_corpus;
  for (const auto& p : train_pairs) {
    src_corpus.push_back(p.src);
    tgt_corpus.push_back(p.tgt);
  }
  for (const auto& p : family_pairs) {
    src_corpus.push_back(p.src);
    tgt_corpus.push_back(p.tgt);
  }
  std::vector<std::string> extra;
  if (args.use_curriculum) extra.push_back(args.curriculum.separator);
  const Vocabulary src_vocab =
      build_vocab(src_corpus, args.vocab_min_count, args.vocab_max_size, extra);
  const Vocabulary tgt_vocab =
      build_vocab(tgt_corpus, args.vocab_min_count, args.vocab_max_size, extra);

  ModelConfig model_cfg = args.model;
  model_cfg.src_vocab = src_vocab.size();
  model_cfg.tgt_vocab = tgt_vocab.size();
  Seq2SeqModel model = make_seq2seq(model_cfg, args.seed,
                                    src_vocab.content_hash(),
                                    tgt_vocab.content_hash());

  std::unique_ptr<SequenceLoss> loss;
  if (args.loss == "in_trust") {
    loss = std::make_unique<InTrustLoss>(args.in_trust);
  } else if (args.loss == "ce") {
    loss = std::make_unique<CrossEntropyLoss>();
  } else {
    fail(ErrorCode::config, "loss must be ce or in_trust");
  }

  TrainConfig train_cfg = args.train;
  train_cfg.seed = args.seed;

  if (args.use_curriculum) {
    const Schedule schedule =
        build_schedule(family_pairs, train_pairs, args.curriculum);
    const auto metrics = run_curriculum(model, schedule, src_vocab, tgt_vocab,
                                        train_cfg, *loss);
    for (const auto& row : metrics) {
      std::cout << row.stage << " epoch " << row.epoch << " loss " << row.loss
                << '\n';
    }
  } else {
    std::vector<TokenPair> flat = family_pairs;
    flat.insert(flat.end(), train_pairs.begin(), train_pairs.end());
    std::vector<EncodedPair> encoded;
    for (const auto& p : flat) {
      encoded.push_back(
          encode_pair(p.src, p.tgt, src_vocab, tgt_vocab, model_cfg.max_len));
    }
    const auto stats = train_epochs(model, encoded, train_cfg, *loss);
    for (const auto& es : stats) {
      std::cout << "epoch " << es.epoch << " loss " << es.mean_loss << '\n';
    }
  }

  save_checkpoint(model, args.out_ckpt);
  save_vocab(src_vocab, args.out_ckpt + ".src.vocab");
  save_vocab(tgt_vocab, args.out_ckpt + ".tgt.vocab");
  std::cout << "saved " << args.out_ckpt << '\n';

  if (!args.dev_tsv.empty()) {
    const auto dev_pairs = tokenize_pairs(
        load_parallel_tsv(args.dev_tsv, src_lang, tgt_lang).pairs, src_mode,
        tgt_mode);
    DecodeConfig dc;
    dc.beam = 4;
    dc.max_len = model_cfg.max_len;
    std::cout << "dev bleu "
              << corpus_bleu_beam_top1(model, dev_pairs, src_vocab, tgt_vocab,
                                       dc)
              << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"low-resource NMT laboratory"};
  app.require_subcommand(1);

  // ---- prep ----
  auto* prep = app.add_subcommand(
      "prep", "normalize a parallel TSV or generate the toy corpus");
  std::string prep_in, prep_out, prep_t2s, prep_gen_dir;
  std::string prep_src_lang = "synthetic", prep_tgt_lang = "synthetic";
  uint64_t prep_seed = 1;
  prep->add_option("--in", prep_in, "raw parallel TSV");
  prep->add_option("--out", prep_out, "normalized TSV to write");
  prep->add_option("--t2s", prep_t2s,
                   "traditional->simplified table for Chinese targets");
  prep->add_option("--src-lang", prep_src_lang, "zh|ms|id|synthetic");
  prep->add_option("--tgt-lang", prep_tgt_lang, "zh|ms|id|synthetic");
  prep->add_option("--gen-toy", prep_gen_dir,
                   "write the synthetic benchmark corpora into this directory");
  prep->add_option("--seed", prep_seed, "toy corpus seed");

  // ---- embed ----
  auto* embed = app.add_subcommand("embed", "skip-gram word vectors");
  auto* embed_train = embed->add_subcommand("train", "train embeddings");
  std::string et_mono, et_out, et_lang = "synthetic";
  SkipgramConfig et_cfg;
  embed_train->add_option("--mono", et_mono, "monolingual corpus")->required();
  embed_train->add_option("--out", et_out, "embedding file")->required();
  embed_train->add_option("--lang", et_lang, "zh|ms|id|synthetic");
  embed_train->add_option("--dim", et_cfg.dim);
  embed_train->add_option("--window", et_cfg.window);
  embed_train->add_option("--negatives", et_cfg.negatives);
  embed_train->add_option("--epochs", et_cfg.epochs);
  embed_train->add_option("--lr", et_cfg.lr);
  embed_train->add_option("--min-count", et_cfg.min_count);
  embed_train->add_option("--seed", et_cfg.seed);
  auto* embed_nn = embed->add_subcommand("nn", "nearest neighbors");
  std::string en_table, en_word;
  int en_k = 5;
  embed_nn->add_option("--table", en_table)->required();
  embed_nn->add_option("--word", en_word)->required();
  embed_nn->add_option("--k", en_k);

  // ---- augment ----
  auto* augment = app.add_subcommand(
      "augment", "embedding-substitution data augmentation");
  std::string ag_pairs, ag_table, ag_out;
  std::string ag_src_lang = "synthetic", ag_tgt_lang = "synthetic";
  AugmentConfig ag_cfg;
  augment->add_option("--pairs", ag_pairs)->required();
  augment->add_option("--table", ag_table)->required();
  augment->add_option("--out", ag_out)->required();
  augment->add_option("--src-lang", ag_src_lang);
  augment->add_option("--tgt-lang", ag_tgt_lang);
  augment->add_option("--factor", ag_cfg.expansion_factor);
  augment->add_option("--substitutions", ag_cfg.substitutions_per_sentence);
  augment->add_option("--top-k", ag_cfg.top_k);
  augment->add_option("--min-similarity", ag_cfg.min_similarity);
  augment->add_option("--seed", ag_cfg.seed);

  // ---- train ----
  auto* train = app.add_subcommand("train", "train a translation model");
  TrainArgs ta;
  train->add_option("--train", ta.train_tsv)->required();
  train->add_option("--family", ta.family_tsv);
  train->add_option("--dev", ta.dev_tsv);
  train->add_option("--src-lang", ta.src_lang);
  train->add_option("--tgt-lang", ta.tgt_lang);
  train->add_option("--out", ta.out_ckpt)->required();
  train->add_option("--loss", ta.loss, "ce|in_trust");
  train->add_option("--alpha", ta.in_trust.alpha);
  train->add_option("--beta", ta.in_trust.beta);
  train->add_option("--delta", ta.in_trust.delta);
  train->add_option("--batch-size", ta.train.batch_size);
  train->add_option("--epochs", ta.train.epochs);
  train->add_option("--lr-init", ta.train.lr_init);
  train->add_option("--lr-min", ta.train.lr_min);
  train->add_option("--d-model", ta.model.d_model);
  train->add_option("--heads", ta.model.heads);
  train->add_option("--d-ff", ta.model.d_ff);
  train->add_option("--enc-layers", ta.model.enc_layers);
  train->add_option("--dec-layers", ta.model.dec_layers);
  train->add_option("--max-len", ta.model.max_len);
  train->add_flag("--curriculum", ta.use_curriculum);
  train->add_option("--short-threshold", ta.curriculum.short_threshold);
  train->add_option("--concat-target-len", ta.curriculum.concat_target_len);
  train->add_option("--seed", ta.seed);

  // ---- decode ----
  auto* dec = app.add_subcommand("decode", "beam / diverse beam decoding");
  std::string dc_model, dc_input, dc_out, dc_mode = "beam";
  std::string dc_src_vocab, dc_tgt_vocab;
  std::string dc_src_lang = "synthetic", dc_tgt_lang = "synthetic";
  int dc_nbest = 1;
  DecodeConfig dc_cfg;
  dec->add_option("--model", dc_model)->required();
  dec->add_option("--input", dc_input, "one source sentence per line")
      ->required();
  dec->add_option("--mode", dc_mode, "beam|diverse");
  dec->add_option("--nbest", dc_nbest);
  dec->add_option("--out", dc_out)->required();
  dec->add_option("--src-vocab", dc_src_vocab);
  dec->add_option("--tgt-vocab", dc_tgt_vocab);
  dec->add_option("--src-lang", dc_src_lang);
  dec->add_option("--tgt-lang", dc_tgt_lang);
  dec->add_option("--beam", dc_cfg.beam);
  dec->add_option("--groups", dc_cfg.groups);
  dec->add_option("--beam-per-group", dc_cfg.beam_per_group);
  dec->add_option("--lambda-div", dc_cfg.lambda_div);
  dec->add_option("--max-len", dc_cfg.max_len);
  dec->add_option("--length-norm", dc_cfg.length_norm);

  // ---- rerank ----
  auto* rerank_cmd = app.add_subcommand("rerank", "contrastive re-ranking");
  auto* rr_train = rerank_cmd->add_subcommand("train", "train the re-ranker");
  std::string rt_pairs, rt_translator, rt_out;
  std::string rt_src_lang = "synthetic", rt_tgt_lang = "synthetic";
  RerankConfig rt_cfg;
  DecodeConfig rt_decode;
  rr_train->add_option("--pairs", rt_pairs)->required();
  rr_train->add_option("--translator", rt_translator)->required();
  rr_train->add_option("--out", rt_out)->required();
  rr_train->add_option("--src-lang", rt_src_lang);
  rr_train->add_option("--tgt-lang", rt_tgt_lang);
  rr_train->add_option("--epochs", rt_cfg.epochs);
  rr_train->add_option("--batch-size", rt_cfg.batch_size);
  rr_train->add_option("--negatives", rt_cfg.negatives);
  rr_train->add_option("--tau", rt_cfg.tau);
  rr_train->add_option("--seed", rt_cfg.seed);
  auto* rr_apply = rerank_cmd->add_subcommand("apply", "re-rank candidates");
  std::string ra_encoder, ra_candidates, ra_src, ra_out;
  std::string ra_src_lang = "synthetic";
  rr_apply->add_option("--encoder", ra_encoder)->required();
  rr_apply->add_option("--candidates", ra_candidates)->required();
  rr_apply->add_option("--src", ra_src, "source sentences, one per line")
      ->required();
  rr_apply->add_option("--src-lang", ra_src_lang);
  rr_apply->add_option("--out", ra_out)->required();

  // ---- bleu ----
  auto* bleu_cmd = app.add_subcommand("bleu", "competition BLEU");
  std::string bl_hyp, bl_ref, bl_mode = "word";
  std::string bl_lang = "synthetic";
  double bl_scale = 100.0;
  bleu_cmd->add_option("--hyp", bl_hyp)->required();
  bleu_cmd->add_option("--ref", bl_ref)->required();
  bleu_cmd->add_option("--mode", bl_mode, "word|char");
  bleu_cmd->add_option("--lang", bl_lang, "language tag of both sides");
  bleu_cmd->add_option("--scale", bl_scale);

  // ---- pipeline ----
  auto* pipe = app.add_subcommand("pipeline", "full experiment pipeline");
  std::string pl_config;
  std::vector<std::string> pl_sets;
  pipe->add_option("--config", pl_config)->required();
  pipe->add_option("--set", pl_sets, "override, e.g. --set train.epochs=2");

  // ---- submit ----
  auto* submit = app.add_subcommand("submit", "write the submission XML");
  std::string sb_hyp, sb_out;
  std::string sb_lang = "synthetic";
  submit->add_option("--hyp", sb_hyp, "hypotheses, one per line")->required();
  submit->add_option("--out", sb_out)->required();
  submit->add_option("--lang", sb_lang);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (prep->parsed()) {
      if (!prep_gen_dir.empty()) {
        write_toy_corpus(prep_gen_dir, prep_seed);
      } else {
        if (prep_in.empty() || prep_out.empty()) {
          fail(ErrorCode::config, "prep needs --in/--out or --gen-toy");
        }
        const Lang src_lang = lang_from_name(prep_src_lang);
        const Lang tgt_lang = lang_from_name(prep_tgt_lang);
        auto corpus = load_parallel_tsv(prep_in, src_lang, tgt_lang);
        if (!prep_t2s.empty() && tgt_lang == Lang::zh) {
          const auto table = load_simplification_table(prep_t2s);
          for (auto& [src, tgt] : corpus.pairs) {
            tgt.text = traditional_to_simplified(tgt.text, table);
          }
        }
        save_parallel_tsv(corpus.pairs, prep_out);
        std::cout << corpus.pairs.size() << " pairs, "
                  << corpus.skipped_lines << " lines skipped\n";
      }
    } else if (embed_train->parsed()) {
      const auto lines = read_lines_checked(et_mono);
      const auto corpus =
          tokenize_lines(lines, mode_for_lang(lang_from_name(et_lang)));
      SkipgramStats stats;
      const auto table = train_skipgram(corpus, et_cfg, &stats);
      save_embeddings(table, et_out);
      for (size_t e = 0; e < stats.epoch_loss.size(); ++e) {
        std::cout << "epoch " << e << " loss " << stats.epoch_loss[e] << '\n';
      }
      std::cout << "saved " << et_out << " ("
                << table.vocab.size() - Vocabulary::num_specials
                << " words)\n";
    } else if (embed_nn->parsed()) {
      const auto table = load_embeddings(en_table);
      for (const auto& n : nearest_neighbors(table, en_word, en_k)) {
        std::cout << n.token << '\t' << n.similarity << '\n';
      }
    } else if (augment->parsed()) {
      const Lang src_lang = lang_from_name(ag_src_lang);
      const Lang tgt_lang = lang_from_name(ag_tgt_lang);
      const auto pairs = tokenize_pairs(
          load_parallel_tsv(ag_pairs, src_lang, tgt_lang).pairs,
          mode_for_lang(src_lang), mode_for_lang(tgt_lang));
      const auto table = load_embeddings(ag_table);
      const auto augmented = augment_by_substitution(pairs, table, ag_cfg);
      std::vector<std::pair<Sentence, Sentence>> rows;
      for (const auto& p : augmented) {
        rows.emplace_back(
            Sentence{detokenize(p.src, mode_for_lang(src_lang)), src_lang},
            Sentence{detokenize(p.tgt, mode_for_lang(tgt_lang)), tgt_lang});
      }
      save_parallel_tsv(rows, ag_out);
      std::cout << pairs.size() << " -> " << augmented.size() << " pairs\n";
    } else if (train->parsed()) {
      run_train(ta);
    } else if (dec->parsed()) {
      if (dc_src_vocab.empty()) dc_src_vocab = dc_model + ".src.vocab";
      if (dc_tgt_vocab.empty()) dc_tgt_vocab = dc_model + ".tgt.vocab";
      const Vocabulary src_vocab = load_vocab(dc_src_vocab);
      const Vocabulary tgt_vocab = load_vocab(dc_tgt_vocab);
      const Seq2SeqModel model = load_checkpoint(
          dc_model, src_vocab.content_hash(), tgt_vocab.content_hash());
      const Lang src_lang = lang_from_name(dc_src_lang);
      const Lang tgt_lang = lang_from_name(dc_tgt_lang);
      const TokenizerMode src_mode = mode_for_lang(src_lang);
      const TokenizerMode tgt_mode = mode_for_lang(tgt_lang);

      ModelScorer scorer(model);
      std::vector<SentenceCandidates> all;
      const auto lines = read_lines_checked(dc_input);
      for (size_t i = 0; i < lines.size(); ++i) {
        auto tokens =
            prepare_for_scoring(Sentence{lines[i], src_lang}, src_mode);
        TokenIds src = encode(tokens, src_vocab, false);
        if (static_cast<int>(src.size()) > model.cfg.max_len - 1) {
          src.resize(model.cfg.max_len - 1);
        }
        src.push_back(Vocabulary::eos_id);
        std::vector<Hypothesis> hyps =
            dc_mode == "diverse"
                ? dedup_candidates(diverse_beam_search(scorer, src, dc_cfg))
                : beam_search(scorer, src, dc_cfg);
        if (static_cast<int>(hyps.size()) > dc_nbest) hyps.resize(dc_nbest);
        SentenceCandidates sc;
        sc.sentence_index = static_cast<int>(i);
        sc.hyps = std::move(hyps);
        for (const auto& h : sc.hyps) {
          sc.texts.push_back(detokenize(decode(h.ids, tgt_vocab), tgt_mode));
        }
        all.push_back(std::move(sc));
      }
      write_candidates_jsonl(all, dc_out);
      std::cout << "decoded " << lines.size() << " sentences -> " << dc_out
                << '\n';
    } else if (rr_train->parsed()) {
      const Vocabulary src_vocab = load_vocab(rt_translator + ".src.vocab");
      const Vocabulary tgt_vocab = load_vocab(rt_translator + ".tgt.vocab");
      const Seq2SeqModel translator = load_checkpoint(
          rt_translator, src_vocab.content_hash(), tgt_vocab.content_hash());
      const Lang src_lang = lang_from_name(rt_src_lang);
      const Lang tgt_lang = lang_from_name(rt_tgt_lang);
      const auto pairs =
          load_parallel_tsv(rt_pairs, src_lang, tgt_lang).pairs;
      rt_cfg.d_model = translator.cfg.d_model;
      rt_cfg.heads = translator.cfg.heads;
      rt_cfg.d_ff = translator.cfg.d_ff;
      rt_cfg.max_len = translator.cfg.max_len;
      rt_decode.max_len = translator.cfg.max_len;
      RerankTrainStats stats;
      const RerankEncoder enc = train_reranker(
          pairs, translator, src_vocab, tgt_vocab, mode_for_lang(src_lang),
          mode_for_lang(tgt_lang), rt_cfg, rt_decode, &stats);
      save_reranker(enc, rt_out);
      for (size_t e = 0; e < stats.epoch_loss.size(); ++e) {
        std::cout << "epoch " << e << " loss " << stats.epoch_loss[e] << '\n';
      }
      std::cout << "saved " << rt_out << '\n';
    } else if (rr_apply->parsed()) {
      const RerankEncoder enc = load_reranker(ra_encoder);
      const auto sources = read_lines_checked(ra_src);
      auto candidates = read_candidates_jsonl(ra_candidates);
      const Lang src_lang = lang_from_name(ra_src_lang);
      for (auto& sc : candidates) {
        if (sc.sentence_index < 0 ||
            sc.sentence_index >= static_cast<int>(sources.size())) {
          fail(ErrorCode::config, "candidate refers to missing source line " +
                                      std::to_string(sc.sentence_index));
        }
        const Sentence src{sources[sc.sentence_index], src_lang};
        sc.hyps = rerank(enc, src, sc.hyps);
        sc.texts.clear();
        for (const auto& h : sc.hyps) {
          sc.texts.push_back(
              detokenize(decode(h.ids, enc.tgt_vocab), enc.tgt_mode));
        }
      }
      write_candidates_jsonl(candidates, ra_out);
      std::cout << "re-ranked " << candidates.size() << " sentences -> "
                << ra_out << '\n';
    } else if (bleu_cmd->parsed()) {
      const Lang lang = lang_from_name(bl_lang);
      const auto hyp_lines = read_lines_checked(bl_hyp);
      const auto ref_lines = read_lines_checked(bl_ref);
      if (hyp_lines.size() != ref_lines.size()) {
        fail(ErrorCode::wrong_arity,
             "hypothesis and reference files differ in length");
      }
      BleuConfig cfg;
      cfg.tokenizer_mode = parse_mode(bl_mode);
      cfg.scale = bl_scale;
      std::vector<std::pair<Sentence, Sentence>> pairs;
      for (size_t i = 0; i < hyp_lines.size(); ++i) {
        pairs.emplace_back(Sentence{hyp_lines[i], lang},
                           Sentence{ref_lines[i], lang});
      }
      std::cout << bleu_report_json(corpus_bleu(pairs, cfg)).dump(2) << '\n';
    } else if (pipe->parsed()) {
      const ExperimentConfig cfg = load_experiment_config(pl_config, pl_sets);
      const RunReport report = run_pipeline(cfg);
      std::cout << run_report_to_json(report) << '\n';
    } else if (submit->parsed()) {
      const Lang lang = lang_from_name(sb_lang);
      std::vector<Sentence> hyps;
      for (const auto& line : read_lines_checked(sb_hyp)) {
        hyps.push_back(Sentence{line, lang});
      }
      write_submission(hyps, sb_out);
      std::cout << "wrote " << hyps.size() << " segments -> " << sb_out
                << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
