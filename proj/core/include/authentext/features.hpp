#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "authentext/sparse.hpp"
#include "authentext/tokenizer.hpp"

namespace authentext {

using Ngram = std::vector<TokenId>;

/// All contiguous subsequences with length in [ngram_min, ngram_max], with
/// multiplicity, ordered by start position then length.
std::vector<Ngram> extract_ngrams(std::span<const TokenId> ids, std::size_t ngram_min,
                                  std::size_t ngram_max);

struct TfidfConfig {
  std::size_t ngram_min = 1;
  std::size_t ngram_max = 3;
  std::size_t min_df = 2;
  bool sublinear_tf = false;
  bool l2_normalize = true;

  friend bool operator==(const TfidfConfig&, const TfidfConfig&) = default;
};

/// n-gram -> column map. Columns follow lexicographic order of the id tuples.
class NgramVocabulary {
 public:
  NgramVocabulary() = default;
  /// `ngrams` must be strictly increasing; `df[i]` belongs to `ngrams[i]`.
  NgramVocabulary(std::vector<Ngram> ngrams, std::vector<std::size_t> df,
                  std::size_t document_count);

  std::size_t size() const noexcept { return ngrams_.size(); }
  std::size_t document_count() const noexcept { return document_count_; }
  std::span<const Ngram> ngrams() const noexcept { return ngrams_; }
  std::span<const std::size_t> df() const noexcept { return df_; }
  std::optional<Column> column(const Ngram& ngram) const;

 private:
  struct NgramHash {
    std::size_t operator()(const Ngram& g) const noexcept;
  };

  std::vector<Ngram> ngrams_;
  std::vector<std::size_t> df_;
  std::size_t document_count_ = 0;
  std::unordered_map<Ngram, Column, NgramHash> columns_;
};

/// ln((1 + N) / (1 + df)) + 1.
double smoothed_idf(std::size_t document_count, std::size_t df) noexcept;

class TfidfModel {
 public:
  TfidfModel() = default;
  TfidfModel(TfidfConfig config, NgramVocabulary vocabulary);

  const TfidfConfig& config() const noexcept { return config_; }
  const NgramVocabulary& vocabulary() const noexcept { return vocabulary_; }
  std::span<const double> idf() const noexcept { return idf_; }
  std::size_t n_features() const noexcept { return vocabulary_.size(); }

 private:
  TfidfConfig config_;
  NgramVocabulary vocabulary_;
  std::vector<double> idf_;
};

/// Keeps every n-gram with document frequency >= min_df. Error(training) on
/// an empty corpus or when no document yields an n-gram.
TfidfModel fit_tfidf(std::span<const TokenSequence> corpus_tokens, const TfidfConfig& config);

/// tf(t, d) * idf(t); tf is the raw count or 1 + ln(count). Out-of-vocabulary
/// n-grams are dropped; optional unit L2 norm (zero vectors stay zero).
SparseVector transform(const TfidfModel& model, const TokenSequence& seq);

/// Row i = transform(model, corpus_tokens[i]); identical for any `threads`.
SparseMatrix transform_corpus(const TfidfModel& model, std::span<const TokenSequence> corpus_tokens,
                              unsigned threads = 1);

}  // namespace authentext
