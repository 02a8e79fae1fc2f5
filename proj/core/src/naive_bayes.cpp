#include "authentext/naive_bayes.hpp"

#include <cmath>
#include <string>

#include "authentext/error.hpp"

namespace authentext {

NaiveBayesModel train_nb(const SparseMatrix& X, std::span<const Label> y, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::training, "naive Bayes alpha must be > 0");
  if (X.n_rows() == 0) throw Error(ErrorCode::training, "cannot train naive Bayes on no rows");
  if (X.n_rows() != y.size()) throw Error(ErrorCode::mismatch, "feature rows and labels differ in length");

  const std::size_t v = X.n_cols();
  std::array<std::vector<double>, 2> sums{std::vector<double>(v, 0.0), std::vector<double>(v, 0.0)};
  std::array<std::size_t, 2> docs{0, 0};
  for (std::size_t i = 0; i < X.n_rows(); ++i) {
    const Label c = y[i];
    ++docs[c];
    const auto row = X.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) sums[c][row.indices[k]] += row.values[k];
  }
  if (docs[0] == 0 || docs[1] == 0) {
    throw Error(ErrorCode::training, "naive Bayes needs both classes present");
  }

  NaiveBayesModel model;
  model.alpha = alpha;
  const double n = static_cast<double>(X.n_rows());
  for (int c = 0; c < 2; ++c) {
    model.log_prior[c] = std::log(static_cast<double>(docs[c]) / n);
    double total = 0.0;
    for (double s : sums[c]) total += s;
    const double denom = std::log(alpha * static_cast<double>(v) + total);
    auto& ll = model.log_likelihood[c];
    ll.resize(v);
    for (std::size_t t = 0; t < v; ++t) ll[t] = std::log(alpha + sums[c][t]) - denom;
  }
  return model;
}

std::vector<std::array<double, 2>> nb_posteriors(const NaiveBayesModel& model, const SparseMatrix& X) {
  if (X.n_cols() != model.n_features()) {
    throw Error(ErrorCode::mismatch, "naive Bayes model expects " + std::to_string(model.n_features()) +
                                         " features, matrix has " + std::to_string(X.n_cols()));
  }
  std::vector<std::array<double, 2>> out(X.n_rows());
  for (std::size_t i = 0; i < X.n_rows(); ++i) {
    const auto row = X.row(i);
    std::array<double, 2> score = model.log_prior;
    for (int c = 0; c < 2; ++c) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        score[c] += row.values[k] * model.log_likelihood[c][row.indices[k]];
      }
    }
    // P(x) is the log-sum-exp normalizer.
    const double top = std::max(score[0], score[1]);
    const double log_evidence = top + std::log(std::exp(score[0] - top) + std::exp(score[1] - top));
    out[i] = {std::exp(score[0] - log_evidence), std::exp(score[1] - log_evidence)};
  }
  return out;
}

}  // namespace authentext
