#include "authentext/pipeline.hpp"

#include "authentext/error.hpp"
#include "authentext/hash.hpp"
#include "authentext/io.hpp"
#include "codec.hpp"

namespace authentext {

using detail::json;

LoadedTokenizer tokenizer_from_bytes(std::string_view bytes) {
  return {Tokenizer::parse(bytes), sha256_hex(bytes)};
}

LoadedTokenizer load_tokenizer(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return tokenizer_from_bytes(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

Tokenizer train_tokenizer(std::span<const std::string> texts, const TokenizerSettings& settings) {
  if (settings.unit == TokenUnit::word) return Tokenizer(train_word_vocab(texts, settings.vocab_size));
  return Tokenizer(train_bpe(texts, {settings.vocab_size, settings.max_merges}));
}

std::string save_bundle(const ModelBundle& b) {
  const json doc = {{"format_version", kBundleFormatVersion},
                    {"kind", model_kind_name(b.kind())},
                    {"tfidf", detail::tfidf_to_json(b.tfidf)},
                    {"vocab_ref", b.vocab_ref},
                    {"parameters", detail::model_parameters(b.model)},
                    {"seed", b.seed},
                    {"config_hash", b.config_hash}};
  return detail::canonical(doc);
}

ModelBundle parse_bundle(std::string_view bytes, std::optional<ModelKind> expected) {
  const json doc = detail::parse_json(bytes, "model bundle");
  detail::check_format_version(doc, kBundleFormatVersion, "model bundle");
  detail::Reader r(doc, "", ErrorCode::parse);
  r.raw("format_version");
  const std::string kind_name = r.string("kind");
  ModelKind kind;
  try {
    kind = model_kind_from_name(kind_name);
  } catch (const Error&) {
    throw Error(ErrorCode::version, "unsupported model kind '" + kind_name + "'");
  }
  if (expected && *expected != kind) {
    throw Error(ErrorCode::version, "bundle holds a " + kind_name + " model, expected " +
                                        std::string(model_kind_name(*expected)));
  }
  ModelBundle b{detail::tfidf_from_json(r.raw("tfidf"), "tfidf"), r.string("vocab_ref"),
                detail::model_from_parameters(kind, r.raw("parameters")), r.unsigned_integer("seed"),
                r.string("config_hash")};
  r.finish();
  if (feature_count(b.model) != b.tfidf.n_features()) {
    throw Error(ErrorCode::parse, "bundle model has " + std::to_string(feature_count(b.model)) +
                                      " features but its TF-IDF model has " +
                                      std::to_string(b.tfidf.n_features()));
  }
  return b;
}

ModelBundle load_bundle(const std::filesystem::path& path, std::optional<ModelKind> expected) {
  const std::string bytes = read_file(path);
  try {
    return parse_bundle(bytes, expected);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

TrainedClassifier train_classifier(ModelKind kind, const SparseMatrix& X, std::span<const Label> y,
                                   const RunConfig& config) {
  switch (kind) {
    case ModelKind::naive_bayes:
      return train_nb(X, y, config.naive_bayes.alpha);
    case ModelKind::sgd_linear: {
      SgdConfig sgd = config.sgd_linear;
      sgd.seed = config.seed;
      return train_sgd(X, y, sgd);
    }
    case ModelKind::gbdt:
      return train_gbdt(X, y, config.gbdt);
  }
  throw Error(ErrorCode::usage, "unknown model kind");
}

ModelBundle train_bundle(const LoadedTokenizer& tokenizer, const LabeledCorpus& train, ModelKind kind,
                         const RunConfig& config, unsigned threads) {
  const auto texts = train.texts();
  const auto tokens = tokenizer.tokenizer.encode_all(texts, threads);
  TfidfModel tfidf = fit_tfidf(tokens, config.features);
  const SparseMatrix X = transform_corpus(tfidf, tokens, threads);
  TrainedClassifier model = train_classifier(kind, X, train.labels(), config);
  return {std::move(tfidf), tokenizer.sha256, std::move(model), config.seed, config_hash(config)};
}

void check_vocab_ref(const ModelBundle& bundle, const LoadedTokenizer& tokenizer) {
  if (bundle.vocab_ref != tokenizer.sha256) {
    throw Error(ErrorCode::mismatch, "vocabulary hash mismatch: bundle expects " + bundle.vocab_ref +
                                         ", tokenizer file is " + tokenizer.sha256);
  }
}

std::vector<double> score_tokens(const ModelBundle& bundle, std::span<const TokenSequence> tokens,
                                 unsigned threads) {
  if (tokens.empty()) return {};
  return predict_proba(bundle.model, transform_corpus(bundle.tfidf, tokens, threads));
}

std::vector<double> score_texts(const ModelBundle& bundle, const LoadedTokenizer& tokenizer,
                                std::span<const std::string> texts, unsigned threads) {
  check_vocab_ref(bundle, tokenizer);
  const auto tokens = tokenizer.tokenizer.encode_all(texts, threads);
  return score_tokens(bundle, tokens, threads);
}

}  // namespace authentext
