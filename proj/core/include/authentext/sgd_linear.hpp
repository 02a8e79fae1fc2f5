#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "authentext/corpus.hpp"
#include "authentext/sparse.hpp"

namespace authentext {

struct SgdConfig {
  double eta0 = 0.5;    // initial learning rate
  double l2 = 1e-5;     // L2 strength on weights (bias excluded)
  std::size_t epochs = 20;
  std::uint64_t seed = 0;  // shuffles come from the "sgd_shuffle" sub-stream

  friend bool operator==(const SgdConfig&, const SgdConfig&) = default;
};

/// Logistic-loss linear model. theta = weights followed by the bias.
struct SgdLinearModel {
  SgdConfig config;
  std::vector<double> theta;

  std::size_t n_features() const noexcept { return theta.empty() ? 0 : theta.size() - 1; }
  double bias() const noexcept { return theta.back(); }
  double margin(SparseRow row) const noexcept;

  friend bool operator==(const SgdLinearModel&, const SgdLinearModel&) = default;
};

/// theta - alpha * gradient, elementwise.
std::vector<double> sgd_step(std::span<const double> theta, std::span<const double> gradient,
                             double alpha);

/// Learning rate at global step t: eta0 / (1 + eta0 * l2 * t).
double sgd_learning_rate(const SgdConfig& config, std::size_t t) noexcept;

/// Per-sample objective ln(1 + exp(-y~ theta.x)) + (l2/2)||w||^2 with
/// y~ in {-1, +1}; the bias is the last element of theta.
double logistic_loss(std::span<const double> theta, SparseRow x, Label y, double l2);

/// Analytic gradient of logistic_loss with respect to theta (dense).
std::vector<double> logistic_loss_gradient(std::span<const double> theta, SparseRow x, Label y,
                                           double l2);

/// Mean per-sample objective over a dataset.
double training_loss(const SgdLinearModel& model, const SparseMatrix& X, std::span<const Label> y);

/// `epochs` passes over shuffled samples, one logistic-loss step per sample,
/// starting from theta = 0. Weights are stored as scale * v so that the L2
/// shrink costs O(1) per step on sparse rows.
SgdLinearModel train_sgd(const SparseMatrix& X, std::span<const Label> y, const SgdConfig& config);

/// Same objective and visiting order, applying sgd_step to the full dense
/// gradient. Slow; kept as the reference the sparse trainer is checked against.
SgdLinearModel train_sgd_dense_reference(const SparseMatrix& X, std::span<const Label> y,
                                         const SgdConfig& config);

std::vector<double> sgd_predict_proba(const SgdLinearModel& model, const SparseMatrix& X);

}  // namespace authentext
