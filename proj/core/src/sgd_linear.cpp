#include "authentext/sgd_linear.hpp"

#include <numeric>
#include <string>

#include "authentext/error.hpp"
#include "authentext/rng.hpp"
#include "numeric.hpp"

namespace authentext {

namespace {

void check_training_data(const SparseMatrix& X, std::span<const Label> y) {
  if (X.n_rows() != y.size()) throw Error(ErrorCode::mismatch, "feature rows and labels differ in length");
  std::size_t positives = 0;
  for (Label l : y) positives += l;
  if (positives == 0 || positives == y.size()) {
    throw Error(ErrorCode::training, "SGD training needs both classes present");
  }
  if (X.n_rows() == 0) throw Error(ErrorCode::training, "cannot train SGD on no rows");
}

void check_config(const SgdConfig& config) {
  if (!(config.eta0 > 0.0)) throw Error(ErrorCode::config, "sgd_linear.eta0 must be > 0");
  if (!(config.l2 >= 0.0)) throw Error(ErrorCode::config, "sgd_linear.l2 must be >= 0");
}

double signed_label(Label y) noexcept { return y == 1 ? 1.0 : -1.0; }

double dot(std::span<const double> w, SparseRow x) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += w[x.indices[k]] * x.values[k];
  return s;
}

std::vector<std::size_t> epoch_order(Rng& rng, std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  return order;
}

}  // namespace

double SgdLinearModel::margin(SparseRow row) const noexcept {
  return dot(std::span(theta).first(n_features()), row) + bias();
}

std::vector<double> sgd_step(std::span<const double> theta, std::span<const double> gradient,
                             double alpha) {
  if (theta.size() != gradient.size()) {
    throw Error(ErrorCode::mismatch, "sgd_step: parameter and gradient shapes differ");
  }
  if (!(alpha > 0.0)) throw Error(ErrorCode::input, "sgd_step: learning rate must be > 0");
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) out[i] = theta[i] - alpha * gradient[i];
  return out;
}

double sgd_learning_rate(const SgdConfig& config, std::size_t t) noexcept {
  return config.eta0 / (1.0 + config.eta0 * config.l2 * static_cast<double>(t));
}

double logistic_loss(std::span<const double> theta, SparseRow x, Label y, double l2) {
  const std::size_t v = theta.size() - 1;
  const double m = signed_label(y) * (dot(theta.first(v), x) + theta[v]);
  double sq = 0.0;
  for (std::size_t j = 0; j < v; ++j) sq += theta[j] * theta[j];
  return detail::log1p_exp_neg(m) + 0.5 * l2 * sq;
}

std::vector<double> logistic_loss_gradient(std::span<const double> theta, SparseRow x, Label y,
                                           double l2) {
  const std::size_t v = theta.size() - 1;
  const double ys = signed_label(y);
  const double m = ys * (dot(theta.first(v), x) + theta[v]);
  const double coef = -ys * detail::sigmoid(-m);
  std::vector<double> g(theta.size());
  for (std::size_t j = 0; j < v; ++j) g[j] = l2 * theta[j];
  for (std::size_t k = 0; k < x.size(); ++k) g[x.indices[k]] += coef * x.values[k];
  g[v] = coef;
  return g;
}

double training_loss(const SgdLinearModel& model, const SparseMatrix& X, std::span<const Label> y) {
  const std::size_t v = model.n_features();
  double sq = 0.0;
  for (std::size_t j = 0; j < v; ++j) sq += model.theta[j] * model.theta[j];
  double total = 0.0;
  for (std::size_t i = 0; i < X.n_rows(); ++i) {
    total += detail::log1p_exp_neg(signed_label(y[i]) * model.margin(X.row(i)));
  }
  return total / static_cast<double>(X.n_rows()) + 0.5 * model.config.l2 * sq;
}

SgdLinearModel train_sgd(const SparseMatrix& X, std::span<const Label> y, const SgdConfig& config) {
  check_config(config);
  check_training_data(X, y);
  const std::size_t v = X.n_cols();
  std::vector<double> direction(v, 0.0);  // weights = scale * direction
  double scale = 1.0;
  double bias = 0.0;

  Rng rng(config.seed, "sgd_shuffle");
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i : epoch_order(rng, X.n_rows())) {
      const auto x = X.row(i);
      const double ys = signed_label(y[i]);
      const double alpha = sgd_learning_rate(config, t++);
      const double m = ys * (scale * dot(direction, x) + bias);
      const double coef = -ys * detail::sigmoid(-m);

      // w <- (1 - alpha*l2) w - alpha*coef*x
      const double shrink = 1.0 - alpha * config.l2;
      if (shrink == 0.0) {
        std::fill(direction.begin(), direction.end(), 0.0);
        scale = 1.0;
      } else {
        scale *= shrink;
      }
      const double step = alpha * coef / scale;
      for (std::size_t k = 0; k < x.size(); ++k) direction[x.indices[k]] -= step * x.values[k];
      bias -= alpha * coef;

      if (std::abs(scale) < 1e-9) {
        for (double& d : direction) d *= scale;
        scale = 1.0;
      }
    }
  }

  SgdLinearModel model;
  model.config = config;
  model.theta.resize(v + 1);
  for (std::size_t j = 0; j < v; ++j) model.theta[j] = scale * direction[j];
  model.theta[v] = bias;
  return model;
}

SgdLinearModel train_sgd_dense_reference(const SparseMatrix& X, std::span<const Label> y,
                                         const SgdConfig& config) {
  check_config(config);
  check_training_data(X, y);
  std::vector<double> theta(X.n_cols() + 1, 0.0);
  Rng rng(config.seed, "sgd_shuffle");
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i : epoch_order(rng, X.n_rows())) {
      const auto g = logistic_loss_gradient(theta, X.row(i), y[i], config.l2);
      theta = sgd_step(theta, g, sgd_learning_rate(config, t++));
    }
  }
  return SgdLinearModel{config, std::move(theta)};
}

std::vector<double> sgd_predict_proba(const SgdLinearModel& model, const SparseMatrix& X) {
  if (X.n_cols() != model.n_features()) {
    throw Error(ErrorCode::mismatch, "SGD model expects " + std::to_string(model.n_features()) +
                                         " features, matrix has " + std::to_string(X.n_cols()));
  }
  std::vector<double> out(X.n_rows());
  for (std::size_t i = 0; i < X.n_rows(); ++i) out[i] = detail::sigmoid(model.margin(X.row(i)));
  return out;
}

}  // namespace authentext
