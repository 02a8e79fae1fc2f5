#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "authentext/classifier.hpp"
#include "authentext/config.hpp"
#include "authentext/corpus.hpp"
#include "authentext/features.hpp"
#include "authentext/tokenizer.hpp"

namespace authentext {

/// A tokenizer together with the SHA-256 of the file it came from; bundles
/// refer to their tokenizer by that hash.
struct LoadedTokenizer {
  Tokenizer tokenizer;
  std::string sha256;
};

LoadedTokenizer tokenizer_from_bytes(std::string_view bytes);
LoadedTokenizer load_tokenizer(const std::filesystem::path& path);

/// BPE or word vocabulary per `settings.unit`.
Tokenizer train_tokenizer(std::span<const std::string> texts, const TokenizerSettings& settings);

inline constexpr int kBundleFormatVersion = 1;

struct ModelBundle {
  TfidfModel tfidf;
  std::string vocab_ref;
  TrainedClassifier model;
  std::uint64_t seed = 0;
  std::string config_hash;

  ModelKind kind() const noexcept { return kind_of(model); }
};

/// {format_version, kind, tfidf, vocab_ref, parameters, seed, config_hash}
/// as canonical JSON.
std::string save_bundle(const ModelBundle& bundle);
ModelBundle parse_bundle(std::string_view bytes, std::optional<ModelKind> expected = std::nullopt);
ModelBundle load_bundle(const std::filesystem::path& path,
                        std::optional<ModelKind> expected = std::nullopt);

TrainedClassifier train_classifier(ModelKind kind, const SparseMatrix& X, std::span<const Label> y,
                                   const RunConfig& config);

/// Tokenize, fit TF-IDF on `train`, train one classifier.
ModelBundle train_bundle(const LoadedTokenizer& tokenizer, const LabeledCorpus& train, ModelKind kind,
                         const RunConfig& config, unsigned threads = 1);

/// Error(mismatch) printing both hashes when the bundle was trained against
/// another tokenizer file.
void check_vocab_ref(const ModelBundle& bundle, const LoadedTokenizer& tokenizer);

/// P(AI) per already tokenized document.
std::vector<double> score_tokens(const ModelBundle& bundle, std::span<const TokenSequence> tokens,
                                 unsigned threads = 1);

/// check_vocab_ref, tokenize, score.
std::vector<double> score_texts(const ModelBundle& bundle, const LoadedTokenizer& tokenizer,
                                std::span<const std::string> texts, unsigned threads = 1);

}  // namespace authentext
