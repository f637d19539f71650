// Copyright 2026 The ovlm Authors
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

#include "ovlm/cli.hpp"

#include <deque>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "ovlm/bpe.hpp"
#include "ovlm/completion.hpp"
#include "ovlm/corpus.hpp"
#include "ovlm/error.hpp"
#include "ovlm/eval.hpp"
#include "ovlm/lexer.hpp"
#include "ovlm/manifest.hpp"
#include "ovlm/nlm.hpp"
#include "ovlm/textio.hpp"
#include "ovlm/vocab.hpp"

namespace fs = std::filesystem;

namespace ovlm {
namespace {

// Prep options shared by every subcommand that prepares token streams.
struct PrepFlags {
  bool no_whitespace = false;
  bool non_english = false;
  std::string comments = "keep";
  std::string strings = "keep";
  bool split_compound = false;
  bool case_markers = false;
  bool digit_split = false;

  PrepConfig to_config() const {
    PrepConfig cfg;
    cfg.keep_whitespace = !no_whitespace;
    cfg.non_english_filter = non_english;
    if (comments == "keep") cfg.comment_handling = CommentHandling::Keep;
    if (comments == "placeholder")
      cfg.comment_handling = CommentHandling::Placeholder;
    if (comments == "remove") cfg.comment_handling = CommentHandling::Remove;
    if (strings == "keep") cfg.string_handling = StringHandling::Keep;
    if (strings == "placeholder")
      cfg.string_handling = StringHandling::Placeholder;
    if (strings == "truncate15")
      cfg.string_handling = StringHandling::KeepTruncated15;
    cfg.convention_split = split_compound;
    cfg.case_markers = case_markers;
    cfg.digit_split = digit_split;
    cfg.validate();
    return cfg;
  }
};

void add_prep_flags(CLI::App* cmd, PrepFlags& p) {
  cmd->add_flag("--no-whitespace", p.no_whitespace,
                "Drop whitespace tokens");
  cmd->add_flag("--non-english-filter", p.non_english,
                "Replace tokens with non-ASCII bytes by <non-en>");
  cmd->add_option("--comments", p.comments,
                  "Comment handling: keep, placeholder or remove")
      ->check(CLI::IsMember({"keep", "placeholder", "remove"}));
  cmd->add_option("--strings", p.strings,
                  "String handling: keep, placeholder or truncate15")
      ->check(CLI::IsMember({"keep", "placeholder", "truncate15"}));
  cmd->add_flag("--split-compound", p.split_compound,
                "Split identifiers at underscores and camelCase boundaries");
  cmd->add_flag("--case-markers", p.case_markers,
                "Lowercase subtokens behind <Upper>/<UPPER> markers");
  cmd->add_flag("--digit-split", p.digit_split,
                "Each digit becomes its own subtoken");
}

// Writes to the path, or to stdout when the path is empty.
void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    write_file(out_path, content);
}

std::string prep_to_toks(const std::vector<PrepToken>& tokens) {
  std::string out;
  for (const PrepToken& tok : tokens) {
    out += to_string(tok.category);
    out += '\t';
    out += escape_field(tok.text);
    out += '\n';
  }
  return out;
}

std::vector<std::string> stream_texts(const TokenStream& stream) {
  std::vector<std::string> texts;
  texts.reserve(stream.tokens.size());
  for (const Token& tok : stream.tokens) texts.push_back(tok.text);
  return texts;
}

void require_split(const Split& split, const char* name) {
  if (split.empty())
    throw Error("empty-split", std::string(name) + " has no projects");
}

// Model + unit vocabulary loaded together; the checkpoint hash must match
// the vocabulary derived from the merge file.
struct LoadedModel {
  GruLm lm;
  BpeModel bpe;
};

LoadedModel load_model(const std::string& model_path,
                       const std::string& bpe_path) {
  LoadedModel out;
  out.bpe = read_bpe(bpe_path);
  UnitVocab uv = unit_vocab(out.bpe);
  Checkpoint ck = load_checkpoint(model_path, vocab_sha256(uv));
  out.lm = GruLm{ck.config, std::move(ck.params), std::move(uv)};
  return out;
}

// Per-file unit id streams for a list of source files.
std::vector<std::vector<int>> file_streams(
    const std::vector<std::string>& files, Language language,
    const PrepConfig& prep, const BpeModel& bpe, const UnitVocab& uv) {
  Split split;
  split.push_back({"", files});
  Corpus corpus = load_split(split, language, prep);
  std::vector<std::vector<int>> streams;
  for (const CorpusFile& file : corpus[0].files) {
    SegmentedFile seg = segment_file(file, bpe, uv);
    streams.push_back(std::move(seg.units));
  }
  return streams;
}

// ---- subcommand handlers ----

struct LexOpts {
  std::string input;
  std::string language = "java";
  std::string out;
};

int cmd_lex(const LexOpts& o) {
  const LanguageProfile& profile =
      profile_for(language_from_string(o.language));
  emit(o.out, to_toks(lex(read_file(o.input), profile)));
  return 0;
}

struct PrepOpts {
  std::string input;
  std::string out;
  PrepFlags prep;
};

int cmd_prep(const PrepOpts& o) {
  TokenStream stream = from_toks(read_file(o.input));
  emit(o.out, prep_to_toks(apply_prep_tagged(stream, o.prep.to_config())));
  return 0;
}

struct VocabStatsOpts {
  std::vector<std::string> train;
  std::vector<std::string> test;
  std::vector<std::uint64_t> cutoffs = {200000, 100000, 75000, 50000, 25000};
  std::string out;
};

int cmd_vocab_stats(const VocabStatsOpts& o) {
  std::vector<std::vector<std::string>> corpus;
  for (const std::string& path : o.train)
    corpus.push_back(stream_texts(from_toks(read_file(path))));
  std::vector<std::string> test_tokens;
  for (const std::string& path : o.test) {
    for (std::string& text : stream_texts(from_toks(read_file(path))))
      test_tokens.push_back(std::move(text));
  }
  VocabReport rep =
      vocab_report(build_vocabulary(corpus), test_tokens, o.cutoffs);
  emit(o.out, to_report_file(rep));
  return 0;
}

struct BpeLearnOpts {
  int merges = 0;
  std::string out;
  std::string manifest;
  std::vector<std::string> inputs;
  PrepFlags prep;
};

int cmd_bpe_learn(const BpeLearnOpts& o) {
  std::vector<std::string> tokens;
  if (!o.manifest.empty()) {
    Manifest m = load_manifest(o.manifest);
    require_split(m.bpe, "bpe");
    tokens = corpus_texts(load_split(m.bpe, m.language, o.prep.to_config()));
  } else {
    for (const std::string& path : o.inputs) {
      for (std::string& text : stream_texts(from_toks(read_file(path))))
        tokens.push_back(std::move(text));
    }
  }
  BpeModel model = learn_bpe(tokens, o.merges);
  write_bpe(o.out, model);
  std::cout << "merges=" << model.num_merges()
            << " symbols=" << model.initial_symbols.size() << "\n";
  return 0;
}

struct BpeApplyOpts {
  std::string bpe;
  std::string input;
  std::string out;
};

int cmd_bpe_apply(const BpeApplyOpts& o) {
  BpeModel model = read_bpe(o.bpe);
  std::vector<std::string> texts = stream_texts(from_toks(read_file(o.input)));
  SegmentStats stats;
  std::vector<std::string> units = segment_stream(texts, model, &stats);
  std::string content;
  for (const std::string& unit : units) {
    content += escape_field(unit);
    content += '\n';
  }
  emit(o.out, content);
  if (!o.out.empty())
    std::cout << "units=" << units.size()
              << " unknown_chars=" << stats.unknown_chars << "\n";
  return 0;
}

struct TrainOpts {
  std::string bpe;
  std::string out;
  std::string manifest;
  std::string split = "train";
  std::string train_units;
  std::string valid_units;
  PrepFlags prep;
  int embed_dim = 512;
  int hidden_dim = 0;  // 0: same as embed_dim
  double dropout = 0.5;
  double lr = 0.1;
  int batch = 32;
  int unroll = 200;
  int epochs = 50;
  int halvings = 4;
  unsigned long long seed = 1;
};

std::vector<int> read_units_file(const std::string& path,
                                 const UnitVocab& uv) {
  std::vector<int> ids;
  for (const std::string& unit : read_token_lines(path))
    ids.push_back(uv.id_of(unit));
  return ids;
}

int cmd_train(const TrainOpts& o) {
  BpeModel bpe = read_bpe(o.bpe);
  UnitVocab uv = unit_vocab(bpe);

  std::vector<int> train_ids, valid_ids;
  if (!o.manifest.empty()) {
    Manifest m = load_manifest(o.manifest);
    const PrepConfig prep = o.prep.to_config();
    const Split& tr = o.split == "small_train" ? m.small_train : m.train;
    require_split(tr, o.split.c_str());
    require_split(m.valid, "valid");
    train_ids = corpus_unit_ids(load_split(tr, m.language, prep), bpe, uv);
    valid_ids =
        corpus_unit_ids(load_split(m.valid, m.language, prep), bpe, uv);
  } else {
    train_ids = read_units_file(o.train_units, uv);
    valid_ids = read_units_file(o.valid_units, uv);
  }

  NlmConfig config;
  config.vocab_size = uv.size();
  config.embed_dim = o.embed_dim;
  config.hidden_dim = o.hidden_dim > 0 ? o.hidden_dim : o.embed_dim;
  config.dropout_rate = o.dropout;
  config.learning_rate = o.lr;
  config.batch_size = o.batch;
  config.unroll_len = o.unroll;
  config.max_epochs = o.epochs;
  config.max_lr_halvings = o.halvings;
  config.seed = o.seed;
  config.validate();

  TrainResult res = train(init_model(config), config, train_ids, valid_ids);
  save_checkpoint(o.out, res.params, config, vocab_sha256(uv));
  for (std::size_t i = 0; i < res.val_entropy_bits.size(); ++i) {
    std::cout << "epoch=" << i + 1
              << " val_entropy_bits=" << format_double(res.val_entropy_bits[i])
              << " lr=" << format_double(res.lr_used[i]) << "\n";
  }
  std::cout << "best_epoch=" << res.best_epoch + 1 << " model=" << o.out
            << "\n";
  return 0;
}

struct EvalOpts {
  std::string manifest;
  std::string bpe;
  std::string model;
  std::string scenario = "static";
  std::string out;
  int k = 10;
  int beam = 0;  // 0: 5 * k
  std::size_t mrr_max_tokens = 1000000;
  int adapt_unroll = 20;
  double adapt_lr = 0.0;
  PrepFlags prep;
};

int cmd_eval(const EvalOpts& o) {
  LoadedModel loaded = load_model(o.model, o.bpe);
  Manifest m = load_manifest(o.manifest);
  require_split(m.test, "test");
  Corpus test = load_split(m.test, m.language, o.prep.to_config());

  ScenarioOptions opts;
  opts.k = o.k;
  opts.beam_size = o.beam > 0 ? o.beam : 5 * o.k;
  opts.mrr_max_tokens = o.mrr_max_tokens;
  opts.adapt_unroll = o.adapt_unroll;
  opts.adapt_lr = o.adapt_lr;

  EvalReport rep = run_scenario(scenario_from_string(o.scenario), loaded.lm,
                                test, loaded.bpe, opts);
  const std::string text = to_report_file(rep, o.model, loaded.bpe.num_merges(),
                                          o.manifest);
  std::cout << text;
  if (!o.out.empty()) write_file(o.out, text);
  return 0;
}

struct CompleteOpts {
  std::string model;
  std::string bpe;
  std::string context_file;
  std::string language = "java";
  int k = 10;
  int beam = 0;  // 0: 5 * k
  double cache_weight = 0.3;
  PrepFlags prep;
};

int cmd_complete(const CompleteOpts& o) {
  LoadedModel loaded = load_model(o.model, o.bpe);
  const LanguageProfile& profile =
      profile_for(language_from_string(o.language));
  std::vector<PrepToken> tokens = apply_prep_tagged(
      lex(read_file(o.context_file), profile), o.prep.to_config());

  // Walk the context: populate the identifier cache and carry the state.
  IdentifierCache cache;
  std::deque<std::string> history;
  HiddenState h(loaded.lm.config.hidden_dim, 0.0);
  for (const PrepToken& tok : tokens) {
    if (tok.category == TokenCategory::Identifier && history.size() == 5)
      cache.observe({history.begin(), history.end()}, tok.text);
    if (tok.category != TokenCategory::Whitespace) {
      history.push_back(tok.text);
      if (history.size() > 5) history.pop_front();
    }
    for (const std::string& unit : segment(tok.text, loaded.bpe))
      advance_state(loaded.lm.params, loaded.lm.config,
                    loaded.lm.vocab.id_of(unit), h);
  }

  const int beam = o.beam > 0 ? o.beam : 5 * o.k;
  CompletionList preds = predict_with_cache(
      loaded.lm, loaded.bpe, cache, {history.begin(), history.end()}, h, o.k,
      beam, o.cache_weight);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    std::cout << i + 1 << '\t' << escape_field(preds[i].token) << '\t'
              << format_double(preds[i].probability) << "\n";
  }
  return 0;
}

struct AdaptOpts {
  std::string model;
  std::string bpe;
  std::string out;
  std::string project;
  std::vector<std::string> files;
  std::string language = "java";
  int adapt_unroll = 20;
  double lr = 0.0;  // 0: checkpoint's configured rate
  long long seed = -1;  // -1: keep the checkpoint's seed
  PrepFlags prep;
};

int cmd_adapt(const AdaptOpts& o) {
  LoadedModel loaded = load_model(o.model, o.bpe);
  if (o.seed >= 0)
    loaded.lm.config.seed = static_cast<unsigned long long>(o.seed);
  std::vector<std::string> files = o.files;
  if (!o.project.empty()) files = list_source_files(o.project);
  std::vector<std::vector<int>> streams =
      file_streams(files, language_from_string(o.language),
                   o.prep.to_config(), loaded.bpe, loaded.lm.vocab);
  const double lr = o.lr > 0.0 ? o.lr : loaded.lm.config.learning_rate;
  GruLm adapted = adapt(loaded.lm, streams, o.adapt_unroll, lr);
  save_checkpoint(o.out, adapted.params, adapted.config,
                  vocab_sha256(adapted.vocab));
  std::cout << "adapted_files=" << streams.size() << " model=" << o.out
            << "\n";
  return 0;
}

struct BugDeltaOpts {
  std::string model;
  std::string bpe;
  std::string pairs_dir;
  std::string out;
  std::string language = "java";
  PrepFlags prep;
};

int cmd_bug_delta(const BugDeltaOpts& o) {
  LoadedModel loaded = load_model(o.model, o.bpe);
  const LanguageProfile& profile =
      profile_for(language_from_string(o.language));
  const PrepConfig prep = o.prep.to_config();

  std::error_code ec;
  if (!fs::is_directory(o.pairs_dir, ec))
    throw Error("missing-path", "not a directory: " + o.pairs_dir);
  std::map<std::string, int> ids;  // sorted; value unused
  for (const auto& entry : fs::directory_iterator(o.pairs_dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path p = entry.path();
    if (p.extension() == ".buggy") ids[p.stem().string()] = 0;
  }

  std::string csv = "id,delta_bits\n";
  for (const auto& [id, unused] : ids) {
    (void)unused;
    const fs::path base = fs::path(o.pairs_dir) / id;
    BugPair pair;
    pair.id = id;
    pair.buggy = lex(read_file(base.string() + ".buggy"), profile);
    pair.fixed = lex(read_file(base.string() + ".fixed"), profile);
    const double delta = bug_entropy_delta(loaded.lm, loaded.bpe, prep, pair);
    csv += id + "," + format_double(delta) + "\n";
  }
  emit(o.out, csv);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Open-vocabulary language modeling toolkit for source code"};
  app.require_subcommand(1);

  LexOpts lex_opts;
  CLI::App* lex_cmd = app.add_subcommand("lex", "Tokenize a source file");
  lex_cmd->add_option("input", lex_opts.input, "Source file")->required();
  lex_cmd->add_option("--language", lex_opts.language,
                      "java, c or python (default java)");
  lex_cmd->add_option("--out", lex_opts.out, ".toks output (default stdout)");

  PrepOpts prep_opts;
  CLI::App* prep_cmd =
      app.add_subcommand("prep", "Apply vocabulary choices to a .toks file");
  prep_cmd->add_option("input", prep_opts.input, ".toks file")->required();
  prep_cmd->add_option("--out", prep_opts.out,
                       ".toks output (default stdout)");
  add_prep_flags(prep_cmd, prep_opts.prep);

  VocabStatsOpts vs_opts;
  CLI::App* vs_cmd = app.add_subcommand(
      "vocab-stats", "Vocabulary report: size, OOV rates, frequency buckets");
  vs_cmd->add_option("--train", vs_opts.train, "Training .toks files")
      ->required();
  vs_cmd->add_option("--test", vs_opts.test, "Test .toks files")->required();
  vs_cmd->add_option("--cutoffs", vs_opts.cutoffs,
                     "Vocabulary size cutoffs for OOV rates")
      ->delimiter(',');
  vs_cmd->add_option("--out", vs_opts.out, "Report output (default stdout)");

  BpeLearnOpts bl_opts;
  CLI::App* bl_cmd =
      app.add_subcommand("bpe-learn", "Learn a subword merge list");
  bl_cmd->add_option("--merges", bl_opts.merges, "Number of merges")
      ->required()
      ->check(CLI::NonNegativeNumber);
  bl_cmd->add_option("--out", bl_opts.out, ".bpe output path")->required();
  bl_cmd->add_option("--manifest", bl_opts.manifest,
                     "Corpus manifest (uses its [bpe] split)");
  bl_cmd->add_option("--input", bl_opts.inputs, ".toks input files");
  add_prep_flags(bl_cmd, bl_opts.prep);

  BpeApplyOpts ba_opts;
  CLI::App* ba_cmd =
      app.add_subcommand("bpe-apply", "Segment a .toks file into units");
  ba_cmd->add_option("--bpe", ba_opts.bpe, ".bpe model")->required();
  ba_cmd->add_option("--input", ba_opts.input, ".toks file")->required();
  ba_cmd->add_option("--out", ba_opts.out,
                     ".units output (default stdout)");

  TrainOpts tr_opts;
  CLI::App* tr_cmd = app.add_subcommand("train", "Train a subword GRU model");
  tr_cmd->add_option("--bpe", tr_opts.bpe, ".bpe model")->required();
  tr_cmd->add_option("--out", tr_opts.out, ".nlm checkpoint path")
      ->required();
  tr_cmd->add_option("--manifest", tr_opts.manifest, "Corpus manifest");
  tr_cmd->add_option("--split", tr_opts.split,
                     "Manifest training split: train or small_train")
      ->check(CLI::IsMember({"train", "small_train"}));
  tr_cmd->add_option("--train-units", tr_opts.train_units,
                     ".units training stream (alternative to --manifest)");
  tr_cmd->add_option("--valid-units", tr_opts.valid_units,
                     ".units validation stream");
  tr_cmd->add_option("--embed-dim", tr_opts.embed_dim, "Embedding size");
  tr_cmd->add_option("--hidden-dim", tr_opts.hidden_dim,
                     "GRU state size (default: embed dim)");
  tr_cmd->add_option("--dropout", tr_opts.dropout, "Dropout rate");
  tr_cmd->add_option("--lr", tr_opts.lr, "Initial learning rate");
  tr_cmd->add_option("--batch", tr_opts.batch, "Batch lanes");
  tr_cmd->add_option("--unroll", tr_opts.unroll, "BPTT window length");
  tr_cmd->add_option("--epochs", tr_opts.epochs, "Epoch cap");
  tr_cmd->add_option("--halvings", tr_opts.halvings,
                     "Learning-rate halvings before stopping");
  tr_cmd->add_option("--seed", tr_opts.seed, "Random seed");
  add_prep_flags(tr_cmd, tr_opts.prep);

  EvalOpts ev_opts;
  CLI::App* ev_cmd =
      app.add_subcommand("eval", "Evaluate a model on a test corpus");
  ev_cmd->add_option("--manifest", ev_opts.manifest, "Corpus manifest")
      ->required();
  ev_cmd->add_option("--bpe", ev_opts.bpe, ".bpe model")->required();
  ev_cmd->add_option("--model", ev_opts.model, ".nlm checkpoint")->required();
  ev_cmd->add_option("--scenario", ev_opts.scenario,
                     "static, dynamic or maintenance")
      ->check(CLI::IsMember({"static", "dynamic", "maintenance"}));
  ev_cmd->add_option("--out", ev_opts.out, "Report file (also on stdout)");
  ev_cmd->add_option("--k", ev_opts.k, "Completions per position");
  ev_cmd->add_option("--beam", ev_opts.beam, "Beam size (default 5k)");
  ev_cmd->add_option("--mrr-max-tokens", ev_opts.mrr_max_tokens,
                     "Ranking-metric token cap");
  ev_cmd->add_option("--adapt-unroll", ev_opts.adapt_unroll,
                     "Adaptation window length");
  ev_cmd->add_option("--adapt-lr", ev_opts.adapt_lr,
                     "Adaptation learning rate (default: model's)");
  add_prep_flags(ev_cmd, ev_opts.prep);

  CompleteOpts co_opts;
  CLI::App* co_cmd = app.add_subcommand(
      "complete", "Predict the next complete tokens after a context file");
  co_cmd->add_option("--model", co_opts.model, ".nlm checkpoint")->required();
  co_cmd->add_option("--bpe", co_opts.bpe, ".bpe model")->required();
  co_cmd->add_option("--context-file", co_opts.context_file, "Source file")
      ->required();
  co_cmd->add_option("--language", co_opts.language, "Source language");
  co_cmd->add_option("--k", co_opts.k, "Completions to return");
  co_cmd->add_option("--beam", co_opts.beam, "Beam size (default 5k)");
  co_cmd->add_option("--cache-weight", co_opts.cache_weight,
                     "Identifier-cache weight in [0,1]");
  add_prep_flags(co_cmd, co_opts.prep);

  AdaptOpts ad_opts;
  CLI::App* ad_cmd =
      app.add_subcommand("adapt", "Adapt a model to project files");
  ad_cmd->add_option("--model", ad_opts.model, ".nlm checkpoint")->required();
  ad_cmd->add_option("--bpe", ad_opts.bpe, ".bpe model")->required();
  ad_cmd->add_option("--out", ad_opts.out, "Adapted checkpoint path")
      ->required();
  ad_cmd->add_option("--project", ad_opts.project,
                     "Project directory (all files)");
  ad_cmd->add_option("--files", ad_opts.files, "Explicit source files");
  ad_cmd->add_option("--language", ad_opts.language, "Source language");
  ad_cmd->add_option("--adapt-unroll", ad_opts.adapt_unroll,
                     "Adaptation window length");
  ad_cmd->add_option("--lr", ad_opts.lr,
                     "Learning rate (default: checkpoint's)");
  ad_cmd->add_option("--seed", ad_opts.seed, "Dropout seed override");
  add_prep_flags(ad_cmd, ad_opts.prep);

  BugDeltaOpts bd_opts;
  CLI::App* bd_cmd = app.add_subcommand(
      "bug-delta", "Entropy deltas for buggy/fixed snippet pairs");
  bd_cmd->add_option("--model", bd_opts.model, ".nlm checkpoint")->required();
  bd_cmd->add_option("--bpe", bd_opts.bpe, ".bpe model")->required();
  bd_cmd->add_option("--pairs-dir", bd_opts.pairs_dir,
                     "Directory of <id>.buggy/<id>.fixed files")
      ->required();
  bd_cmd->add_option("--out", bd_opts.out, "CSV output (default stdout)");
  bd_cmd->add_option("--language", bd_opts.language, "Source language");
  add_prep_flags(bd_cmd, bd_opts.prep);

  std::vector<const char*> argv;
  argv.push_back("ovlm");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (lex_cmd->parsed()) return cmd_lex(lex_opts);
    if (prep_cmd->parsed()) return cmd_prep(prep_opts);
    if (vs_cmd->parsed()) return cmd_vocab_stats(vs_opts);
    if (bl_cmd->parsed()) {
      if (bl_opts.manifest.empty() && bl_opts.inputs.empty()) {
        std::cerr << "ovlm bpe-learn: need --manifest or --input\n";
        return 1;
      }
      return cmd_bpe_learn(bl_opts);
    }
    if (ba_cmd->parsed()) return cmd_bpe_apply(ba_opts);
    if (tr_cmd->parsed()) {
      if (tr_opts.manifest.empty() &&
          (tr_opts.train_units.empty() || tr_opts.valid_units.empty())) {
        std::cerr
            << "ovlm train: need --manifest or --train-units/--valid-units\n";
        return 1;
      }
      return cmd_train(tr_opts);
    }
    if (ev_cmd->parsed()) return cmd_eval(ev_opts);
    if (co_cmd->parsed()) return cmd_complete(co_opts);
    if (ad_cmd->parsed()) {
      if (ad_opts.project.empty() && ad_opts.files.empty()) {
        std::cerr << "ovlm adapt: need --project or --files\n";
        return 1;
      }
      return cmd_adapt(ad_opts);
    }
    if (bd_cmd->parsed()) return cmd_bug_delta(bd_opts);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace ovlm
