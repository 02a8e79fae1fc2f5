#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>
#include <ostream>

#include "authentext/config.hpp"
#include "authentext/corpus.hpp"
#include "authentext/ensemble.hpp"
#include "authentext/error.hpp"
#include "authentext/io.hpp"
#include "authentext/metrics.hpp"
#include "authentext/pipeline.hpp"

namespace authentext::cli {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string format;
};

class Context {
 public:
  Context(const Globals& g, std::ostream& out, std::ostream& err) : g_(g), out_(out), err_(err) {}

  RunConfig config() const {
    RunConfig c = g_.config_path.empty() ? RunConfig{} : load_run_config(g_.config_path);
    if (g_.seed) {
      c.seed = *g_.seed;
      c.sgd_linear.seed = *g_.seed;
    }
    return c;
  }

  CorpusFormat format_for(const fs::path& path) const {
    if (!g_.format.empty()) return corpus_format_from_name(g_.format);
    return corpus_format_from_path(path).value_or(CorpusFormat::jsonl);
  }

  unsigned threads() const { return g_.threads; }
  std::ostream& out() { return out_; }
  std::ostream& log() { return err_; }

 private:
  const Globals& g_;
  std::ostream& out_;
  std::ostream& err_;
};

void emit(Context& ctx, const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    ctx.out() << bytes;
  } else {
    write_file(path, bytes);
  }
}

struct SynthArgs {
  std::size_t n = 0;
  double divergence = 0.0;
  std::string out;
};

void cmd_synth(Context& ctx, const SynthArgs& a) {
  if (!(a.divergence >= 0.0 && a.divergence <= 1.0)) {
    throw Error(ErrorCode::usage, "--divergence must lie in [0, 1]");
  }
  if (a.n < 1) throw Error(ErrorCode::usage, "--n must be at least 1");
  const RunConfig c = ctx.config();
  const auto corpus = synth_corpus(a.n, c.seed, a.divergence);
  emit(ctx, a.out, serialize_corpus(corpus, ctx.format_for(a.out)));
  ctx.log() << "synth: " << corpus.size() << " documents, divergence " << a.divergence << ", seed "
            << c.seed << "\n";
}

struct TokenizeArgs {
  std::string corpus;
  std::string out;
  std::optional<std::size_t> vocab_size;
  std::optional<std::size_t> max_merges;
  std::string unit;
  bool train_split = false;
};

void cmd_tokenize_train(Context& ctx, const TokenizeArgs& a) {
  RunConfig c = ctx.config();
  if (a.vocab_size) c.tokenizer.vocab_size = *a.vocab_size;
  if (a.max_merges) c.tokenizer.max_merges = *a.max_merges;
  if (!a.unit.empty()) c.tokenizer.unit = token_unit_from_name(a.unit);
  validate(c);
  LabeledCorpus corpus = load_corpus(a.corpus, ctx.format_for(a.corpus));
  if (a.train_split) corpus = split_corpus(corpus, {c.split.test_fraction, c.seed}).train;
  const Tokenizer tok = train_tokenizer(corpus.texts(), c.tokenizer);
  write_file(a.out, tok.serialize());
  if (const BpeVocab* bpe = tok.bpe()) {
    ctx.out() << "merges " << bpe->merges().size() << "\n";
  }
  ctx.out() << "vocab_size " << tok.size() << "\n";
}

struct TrainArgs {
  std::string corpus;
  std::string vocab;
  std::string kind;
  std::string out;
  std::string variant;
  std::optional<std::size_t> n_trees;
  std::string holdout_out;
};

void cmd_train(Context& ctx, const TrainArgs& a) {
  const ModelKind kind = model_kind_from_name(a.kind);
  RunConfig c = ctx.config();
  if (!a.variant.empty()) {
    try {
      c.gbdt.variant = tree_growth_from_name(a.variant);
    } catch (const Error& e) {
      throw Error(ErrorCode::usage, e.what());
    }
  }
  if (a.n_trees) c.gbdt.n_trees = *a.n_trees;
  validate(c);
  const CorpusFormat fmt = ctx.format_for(a.corpus);
  const LabeledCorpus corpus = load_corpus(a.corpus, fmt);
  const LoadedTokenizer tok = load_tokenizer(a.vocab);
  const CorpusSplit split = split_corpus(corpus, {c.split.test_fraction, c.seed});
  ctx.log() << "train: " << model_kind_name(kind) << " on " << split.train.size() << " documents ("
            << split.test.size() << " held out), seed " << c.seed << ", config " << config_hash(c)
            << "\n";
  const ModelBundle bundle = train_bundle(tok, split.train, kind, c, ctx.threads());
  write_file(a.out, save_bundle(bundle));
  if (!a.holdout_out.empty()) save_corpus(split.test, a.holdout_out, ctx.format_for(a.holdout_out));
  ctx.log() << "train: " << bundle.tfidf.n_features() << " features\n";
}

struct PredictArgs {
  std::string model;
  std::string ensemble;
  std::string vocab;
  std::string input;
  std::string out;
};

void cmd_predict(Context& ctx, const PredictArgs& a) {
  if (a.model.empty() == a.ensemble.empty()) {
    throw Error(ErrorCode::usage, "predict needs exactly one of --model or --ensemble");
  }
  const auto docs = load_documents(a.input, ctx.format_for(a.input));
  std::vector<double> scores;
  if (!a.model.empty()) {
    if (a.vocab.empty()) throw Error(ErrorCode::usage, "--model requires --vocab");
    const ModelBundle bundle = load_bundle(a.model);
    const LoadedTokenizer tok = load_tokenizer(a.vocab);
    check_vocab_ref(bundle, tok);
    std::vector<std::string> texts;
    texts.reserve(docs.size());
    for (const auto& d : docs) texts.push_back(d.text);
    scores = score_texts(bundle, tok, texts, ctx.threads());
  } else {
    scores = run_ensemble(load_ensemble_spec(a.ensemble), docs, ctx.threads());
  }
  emit(ctx, a.out, format_scores(docs, scores));
  ctx.log() << "predict: scored " << docs.size() << " documents\n";
}

struct EvaluateArgs {
  std::string scores;
  std::string corpus;
  std::string report;
};

void cmd_evaluate(Context& ctx, const EvaluateArgs& a) {
  const LabeledCorpus corpus = load_corpus(a.corpus, ctx.format_for(a.corpus));
  const auto scores = align_scores(load_external_scores(a.scores), corpus.documents());
  const EvaluationReport report = evaluate_scores(scores, corpus.labels());
  ctx.out() << report_text(report);
  if (!a.report.empty()) write_file(a.report, report_json(report));
}

struct EnsembleArgs {
  std::string spec;
  std::string input;
  std::string out;
  std::string tune_on;
  std::string spec_out;
};

void cmd_ensemble(Context& ctx, const EnsembleArgs& a) {
  EnsembleSpec spec = load_ensemble_spec(a.spec);
  if (!a.tune_on.empty()) {
    const RunConfig c = ctx.config();
    const LabeledCorpus tune = load_corpus(a.tune_on, ctx.format_for(a.tune_on));
    const auto probas = score_voters(spec, tune.documents(), ctx.threads());
    const WeightSearch best =
        grid_search_weights(probas, tune.labels(), spec.combine, c.ensemble.grid_step);
    for (std::size_t v = 0; v < spec.voters.size(); ++v) spec.voters[v].weight = best.weights[v];
    ctx.log() << "ensemble: tuned weights";
    for (double w : best.weights) ctx.log() << ' ' << w;
    ctx.log() << " (AUC " << best.auc << " on " << tune.size() << " documents)\n";
    if (!a.spec_out.empty()) {
      write_file(a.spec_out, dump_ensemble_spec(spec, fs::path(a.spec_out).parent_path()));
    }
  } else if (!a.spec_out.empty()) {
    throw Error(ErrorCode::usage, "--spec-out requires --tune-on");
  }
  if (a.input.empty()) {
    if (a.tune_on.empty()) throw Error(ErrorCode::usage, "ensemble needs --input or --tune-on");
    return;
  }
  const auto docs = load_documents(a.input, ctx.format_for(a.input));
  emit(ctx, a.out, format_scores(docs, run_ensemble(spec, docs, ctx.threads())));
  ctx.log() << "ensemble: scored " << docs.size() << " documents with " << spec.voters.size()
            << " voters\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"AI-generated text detection toolkit", "authentext"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "run configuration (JSON)");
  app.add_option("--seed", g.seed, "master seed; overrides the config");
  app.add_option("--threads", g.threads, "worker threads, 0 = machine parallelism");
  app.add_option("--format", g.format, "corpus format, default from the file extension")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "generate a synthetic labeled corpus");
  s->add_option("--n", synth.n, "documents per class")->required();
  s->add_option("--divergence", synth.divergence, "separation in [0, 1]")->required();
  s->add_option("--out", synth.out, "output corpus (stdout when omitted)");

  TokenizeArgs tok;
  auto* t = app.add_subcommand("tokenize-train", "learn a tokenizer vocabulary");
  t->add_option("--corpus", tok.corpus, "labeled corpus")->required();
  t->add_option("--out", tok.out, "vocabulary file")->required();
  t->add_option("--vocab-size", tok.vocab_size, "target vocabulary size");
  t->add_option("--max-merges", tok.max_merges, "merge cap, 0 = none");
  t->add_option("--unit", tok.unit, "bpe or word");
  t->add_flag("--train-split", tok.train_split, "learn only from the training side of the split");

  TrainArgs train;
  auto* tr = app.add_subcommand("train", "train one classifier into a model bundle");
  tr->add_option("--corpus", train.corpus, "labeled corpus")->required();
  tr->add_option("--vocab", train.vocab, "vocabulary file")->required();
  tr->add_option("--kind", train.kind, "naive_bayes, sgd_linear or gbdt")->required();
  tr->add_option("--out", train.out, "model bundle")->required();
  tr->add_option("--variant", train.variant, "gbdt growth: leaf_wise or symmetric");
  tr->add_option("--n-trees", train.n_trees, "gbdt boosting rounds");
  tr->add_option("--holdout-out", train.holdout_out, "write the held-out split here");

  PredictArgs predict;
  auto* p = app.add_subcommand("predict", "score documents");
  p->add_option("--model", predict.model, "model bundle");
  p->add_option("--ensemble", predict.ensemble, "ensemble spec");
  p->add_option("--vocab", predict.vocab, "vocabulary file (with --model)");
  p->add_option("--input", predict.input, "documents to score")->required();
  p->add_option("--out", predict.out, "score file (stdout when omitted)");

  EvaluateArgs evaluate;
  auto* e = app.add_subcommand("evaluate", "ROC analysis of a score file");
  e->add_option("--scores", evaluate.scores, "score file")->required();
  e->add_option("--corpus", evaluate.corpus, "labeled corpus")->required();
  e->add_option("--report", evaluate.report, "JSON report output");

  EnsembleArgs ens;
  auto* en = app.add_subcommand("ensemble", "blend voters from an ensemble spec");
  en->add_option("--spec", ens.spec, "ensemble spec")->required();
  en->add_option("--input", ens.input, "documents to score");
  en->add_option("--out", ens.out, "score file (stdout when omitted)");
  en->add_option("--tune-on", ens.tune_on, "labeled corpus for the weight grid search");
  en->add_option("--spec-out", ens.spec_out, "write the tuned spec here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& ex) {
    err << "error[" << error_code_name(ErrorCode::usage) << "]: " << ex.what() << "\n";
    return 2;
  }

  Context ctx(g, out, err);
  try {
    if (s->parsed()) cmd_synth(ctx, synth);
    if (t->parsed()) cmd_tokenize_train(ctx, tok);
    if (tr->parsed()) cmd_train(ctx, train);
    if (p->parsed()) cmd_predict(ctx, predict);
    if (e->parsed()) cmd_evaluate(ctx, evaluate);
    if (en->parsed()) cmd_ensemble(ctx, ens);
  } catch (const Error& ex) {
    err << "error[" << error_code_name(ex.code()) << "]: " << ex.what() << "\n";
    return ex.code() == ErrorCode::usage ? 2 : 1;
  } catch (const std::exception& ex) {
    err << "error[" << error_code_name(ErrorCode::io) << "]: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace authentext::cli
