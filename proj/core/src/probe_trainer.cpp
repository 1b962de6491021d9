#include "neurovote/probe_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "neurovote/error.hpp"
#include "neurovote/rng.hpp"

namespace neurovote {

namespace {

double softplus(double x) noexcept { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) noexcept {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(std::span<const double> theta, double bias, std::span<const double> x) noexcept {
  double z = bias;
  for (std::size_t j = 0; j < theta.size(); ++j) z += theta[j] * x[j];
  return z;
}

double squared_norm(std::span<const double> v) noexcept {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// NLL for one sample with logit z: softplus(-z) if y = 1, softplus(z) if y = 0.
double sample_nll(double z, int y) noexcept { return y == 1 ? softplus(-z) : softplus(z); }

// Accumulates mean NLL + lambda2 ||theta||^2 and its gradient over `indices`.
double accumulate(std::span<const double> theta, double bias, const FeatureMatrix& features,
                  std::span<const int> labels, std::span<const std::size_t> indices,
                  double lambda2, std::vector<double>& grad_theta, double& grad_bias) {
  std::fill(grad_theta.begin(), grad_theta.end(), 0.0);
  grad_bias = 0.0;
  double nll = 0.0;
  for (std::size_t i : indices) {
    const auto x = features.row(i);
    const double z = logit(theta, bias, x);
    nll += sample_nll(z, labels[i]);
    const double residual = sigmoid(z) - static_cast<double>(labels[i]);
    for (std::size_t j = 0; j < theta.size(); ++j) grad_theta[j] += residual * x[j];
    grad_bias += residual;
  }
  const double inv_n = 1.0 / static_cast<double>(indices.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    grad_theta[j] = grad_theta[j] * inv_n + 2.0 * lambda2 * theta[j];
  }
  grad_bias *= inv_n;
  return nll * inv_n + lambda2 * squared_norm(theta);
}

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

void validate_config(const TrainConfig& config) {
  if (!(config.lambda1 >= 0) || !(config.lambda2 >= 0) || !(config.learning_rate > 0) ||
      config.epochs == 0 || config.batch_size == 0) {
    throw Error(ErrorCode::InvalidConfig,
                "train config needs lambda1, lambda2 >= 0, learning_rate > 0, epochs > 0, "
                "batch_size > 0");
  }
}

}  // namespace

LossGradient loss_and_gradient(std::span<const double> theta, double bias,
                               const FeatureMatrix& batch, std::span<const int> labels,
                               double lambda2) {
  LossGradient out;
  out.grad_theta.assign(theta.size(), 0.0);
  const auto indices = iota_indices(batch.rows);
  out.loss = accumulate(theta, bias, batch, labels, indices, lambda2, out.grad_theta, out.grad_bias);
  return out;
}

double probe_objective(std::span<const double> theta, double bias, const FeatureMatrix& features,
                       std::span<const int> labels, double lambda1, double lambda2) {
  double nll = 0.0;
  for (std::size_t i = 0; i < features.rows; ++i) {
    nll += sample_nll(logit(theta, bias, features.row(i)), labels[i]);
  }
  double l1 = 0.0;
  for (double t : theta) l1 += std::abs(t);
  return nll / static_cast<double>(features.rows) + lambda1 * l1 + lambda2 * squared_norm(theta);
}

ProbeModel train_probe(const FeatureMatrix& train, std::span<const int> train_labels,
                       const FeatureMatrix* dev, std::span<const int> dev_labels,
                       const TrainConfig& config) {
  validate_config(config);
  if (train.rows == 0) throw Error(ErrorCode::EmptyTrainSplit, "probe training needs train rows");

  ProbeModel model;
  model.config = config;
  model.theta.assign(train.cols, 0.0);

  SplitMix64 rng(config.seed);
  std::vector<std::size_t> order = iota_indices(train.rows);
  std::vector<double> grad(train.cols, 0.0);
  double grad_bias = 0.0;
  const double lr = config.learning_rate;
  const double threshold = lr * config.lambda1;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const std::span<const std::size_t> batch(order.data() + begin, end - begin);
      const double loss =
          accumulate(model.theta, model.bias, train, train_labels, batch, config.lambda2, grad, grad_bias);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::Diverged, "non-finite loss at epoch " + std::to_string(epoch) +
                                             ", batch " + std::to_string(batch_index));
      }
      for (std::size_t j = 0; j < model.theta.size(); ++j) {
        const double stepped = model.theta[j] - lr * grad[j];
        // Soft-thresholding is the proximal map of lr * lambda1 * |.|.
        model.theta[j] = std::copysign(std::max(std::abs(stepped) - threshold, 0.0), stepped);
      }
      model.bias -= lr * grad_bias;
    }
    const double epoch_loss = probe_objective(model.theta, model.bias, train, train_labels,
                                              config.lambda1, config.lambda2);
    if (!std::isfinite(epoch_loss)) {
      throw Error(ErrorCode::Diverged, "non-finite loss at end of epoch " + std::to_string(epoch));
    }
    model.epoch_losses.push_back(epoch_loss);
  }
  model.final_train_loss = model.epoch_losses.back();
  model.dev_accuracy = (dev != nullptr && dev->rows > 0)
                           ? evaluate_probe(model, *dev, dev_labels)
                           : std::numeric_limits<double>::quiet_NaN();
  return model;
}

ProbeModel train_probe(const ActivationMatrix& matrix, const ConceptDataset& dataset,
                       const TrainConfig& config, std::span<const std::size_t> columns) {
  const LabeledRows train_rows = dataset.select(Split::Train);
  const LabeledRows dev_rows = dataset.select(Split::Dev);
  if (train_rows.size() == 0) throw Error(ErrorCode::EmptyTrainSplit, "dataset has no train rows");

  FeatureMatrix train = gather(matrix, train_rows.rows, columns);
  FeatureMatrix dev = gather(matrix, dev_rows.rows, columns);
  Standardizer standardizer = Standardizer::fit(train);
  standardizer.apply(train);
  standardizer.apply(dev);

  ProbeModel model = train_probe(train, train_rows.labels, &dev, dev_rows.labels, config);
  model.feature_columns.assign(columns.begin(), columns.end());
  model.standardizer = std::move(standardizer);
  return model;
}

double evaluate_probe(const ProbeModel& model, const FeatureMatrix& transformed,
                      std::span<const int> labels) {
  if (transformed.rows == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < transformed.rows; ++i) {
    const int predicted = logit(model.theta, model.bias, transformed.row(i)) > 0.0 ? 1 : 0;
    if (predicted == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(transformed.rows);
}

double evaluate_probe(const ProbeModel& model, const ActivationMatrix& matrix,
                      std::span<const std::size_t> rows, std::span<const int> labels) {
  FeatureMatrix features = gather(matrix, rows, model.feature_columns);
  if (!model.standardizer.mean().empty()) model.standardizer.apply(features);
  return evaluate_probe(model, features, labels);
}

double train_eval_classifier(const ActivationMatrix& matrix, const ConceptDataset& dataset,
                             std::span<const std::size_t> selected_neurons) {
  if (selected_neurons.empty()) {
    throw Error(ErrorCode::SOutOfRange, "evaluation classifier needs at least one neuron");
  }
  for (std::size_t id : selected_neurons) {
    if (id >= matrix.cols()) {
      throw Error(ErrorCode::SOutOfRange, "neuron id " + std::to_string(id) + " out of range");
    }
  }
  // Feature order must not depend on rank order: same set, same classifier.
  std::vector<std::size_t> columns(selected_neurons.begin(), selected_neurons.end());
  std::sort(columns.begin(), columns.end());
  TrainConfig config = TrainConfig::unregularized();
  config.seed = dataset.seed;
  const ProbeModel model = train_probe(matrix, dataset, config, columns);
  const LabeledRows test = dataset.select(Split::Test);
  return evaluate_probe(model, matrix, test.rows, test.labels);
}

}  // namespace neurovote
