#include "authentext/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "authentext/error.hpp"
#include "authentext/parallel.hpp"

namespace authentext {

std::vector<Ngram> extract_ngrams(std::span<const TokenId> ids, std::size_t ngram_min,
                                  std::size_t ngram_max) {
  if (ngram_min < 1 || ngram_min > ngram_max) {
    throw Error(ErrorCode::input, "n-gram range must satisfy 1 <= ngram_min <= ngram_max");
  }
  std::vector<Ngram> out;
  for (std::size_t start = 0; start < ids.size(); ++start) {
    for (std::size_t n = ngram_min; n <= ngram_max && start + n <= ids.size(); ++n) {
      out.emplace_back(ids.begin() + static_cast<std::ptrdiff_t>(start),
                       ids.begin() + static_cast<std::ptrdiff_t>(start + n));
    }
  }
  return out;
}

std::size_t NgramVocabulary::NgramHash::operator()(const Ngram& g) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (TokenId id : g) {
    h ^= id + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h ^ g.size();
}

NgramVocabulary::NgramVocabulary(std::vector<Ngram> ngrams, std::vector<std::size_t> df,
                                 std::size_t document_count)
    : ngrams_(std::move(ngrams)), df_(std::move(df)), document_count_(document_count) {
  if (ngrams_.size() != df_.size()) {
    throw Error(ErrorCode::input, "n-gram vocabulary has mismatched ngram/df lengths");
  }
  columns_.reserve(ngrams_.size());
  for (std::size_t i = 0; i < ngrams_.size(); ++i) {
    if (ngrams_[i].empty()) throw Error(ErrorCode::input, "empty n-gram at column " + std::to_string(i));
    if (i > 0 && !(ngrams_[i - 1] < ngrams_[i])) {
      throw Error(ErrorCode::input, "n-gram vocabulary is not strictly sorted at column " +
                                        std::to_string(i));
    }
    if (df_[i] < 1 || df_[i] > document_count_) {
      throw Error(ErrorCode::input, "document frequency out of range at column " + std::to_string(i));
    }
    columns_.emplace(ngrams_[i], static_cast<Column>(i));
  }
}

std::optional<Column> NgramVocabulary::column(const Ngram& ngram) const {
  auto it = columns_.find(ngram);
  if (it == columns_.end()) return std::nullopt;
  return it->second;
}

double smoothed_idf(std::size_t document_count, std::size_t df) noexcept {
  return std::log((1.0 + static_cast<double>(document_count)) / (1.0 + static_cast<double>(df))) + 1.0;
}

TfidfModel::TfidfModel(TfidfConfig config, NgramVocabulary vocabulary)
    : config_(config), vocabulary_(std::move(vocabulary)) {
  idf_.reserve(vocabulary_.size());
  for (std::size_t df : vocabulary_.df()) idf_.push_back(smoothed_idf(vocabulary_.document_count(), df));
}

TfidfModel fit_tfidf(std::span<const TokenSequence> corpus_tokens, const TfidfConfig& config) {
  if (corpus_tokens.empty()) throw Error(ErrorCode::training, "cannot fit TF-IDF on an empty corpus");
  if (config.ngram_min < 1 || config.ngram_min > config.ngram_max) {
    throw Error(ErrorCode::config, "n-gram range must satisfy 1 <= ngram_min <= ngram_max");
  }
  std::map<Ngram, std::size_t> df;
  bool any = false;
  for (const auto& seq : corpus_tokens) {
    auto grams = extract_ngrams(seq.ids, config.ngram_min, config.ngram_max);
    any = any || !grams.empty();
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    for (auto& g : grams) ++df[std::move(g)];
  }
  if (!any) throw Error(ErrorCode::training, "all documents are empty (no n-grams to fit)");

  std::vector<Ngram> kept;
  std::vector<std::size_t> kept_df;
  for (auto& [g, count] : df) {
    if (count >= config.min_df) {
      kept.push_back(g);
      kept_df.push_back(count);
    }
  }
  return TfidfModel(config, NgramVocabulary(std::move(kept), std::move(kept_df), corpus_tokens.size()));
}

SparseVector transform(const TfidfModel& model, const TokenSequence& seq) {
  const auto& cfg = model.config();
  std::vector<Column> columns;
  for (const auto& g : extract_ngrams(seq.ids, cfg.ngram_min, cfg.ngram_max)) {
    if (auto c = model.vocabulary().column(g)) columns.push_back(*c);
  }
  std::sort(columns.begin(), columns.end());

  SparseVector out;
  const auto idf = model.idf();
  for (std::size_t i = 0; i < columns.size();) {
    std::size_t j = i;
    while (j < columns.size() && columns[j] == columns[i]) ++j;
    const double count = static_cast<double>(j - i);
    const double tf = cfg.sublinear_tf ? 1.0 + std::log(count) : count;
    out.indices.push_back(columns[i]);
    out.values.push_back(tf * idf[columns[i]]);
    i = j;
  }
  if (cfg.l2_normalize && !out.empty()) {
    double sq = 0.0;
    for (double v : out.values) sq += v * v;
    const double norm = std::sqrt(sq);
    for (double& v : out.values) v /= norm;
  }
  return out;
}

SparseMatrix transform_corpus(const TfidfModel& model, std::span<const TokenSequence> corpus_tokens,
                              unsigned threads) {
  std::vector<SparseVector> rows(corpus_tokens.size());
  parallel_blocks(corpus_tokens.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) rows[i] = transform(model, corpus_tokens[i]);
  });
  SparseMatrix m(model.n_features());
  for (const auto& r : rows) m.push_row(r);
  return m;
}

}  // namespace authentext
