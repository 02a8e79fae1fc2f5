#pragma once

#include <array>
#include <span>
#include <vector>

#include "authentext/corpus.hpp"
#include "authentext/sparse.hpp"

namespace authentext {

/// Multinomial naive Bayes over (possibly fractional) term weights.
struct NaiveBayesModel {
  double alpha = 1.0;
  std::array<double, 2> log_prior{};                    // ln P(C_k)
  std::array<std::vector<double>, 2> log_likelihood{};  // ln P(term | C_k)

  std::size_t n_features() const noexcept { return log_likelihood[0].size(); }

  friend bool operator==(const NaiveBayesModel&, const NaiveBayesModel&) = default;
};

/// Laplace-smoothed estimates from X (rows = documents). Error(training) when
/// a class is absent, alpha <= 0, or X is empty.
NaiveBayesModel train_nb(const SparseMatrix& X, std::span<const Label> y, double alpha = 1.0);

/// Per-row posterior (P(C_0 | x), P(C_1 | x)) by log-sum-exp normalization.
std::vector<std::array<double, 2>> nb_posteriors(const NaiveBayesModel& model, const SparseMatrix& X);

}  // namespace authentext
