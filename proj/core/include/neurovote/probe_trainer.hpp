#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "neurovote/activation_store.hpp"
#include "neurovote/concept_dataset.hpp"
#include "neurovote/features.hpp"

namespace neurovote {

/// Hyper-parameters of the logistic probe. lambda1 scales ||theta||_1 and
/// lambda2 scales ||theta||_2^2; the default is the elastic-net setting.
struct TrainConfig {
  double lambda1 = 0.01;
  double lambda2 = 0.01;
  double learning_rate = 0.01;
  std::size_t epochs = 10;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;

  static TrainConfig lasso() { return {0.01, 0.0}; }
  static TrainConfig ridge() { return {0.0, 0.01}; }
  static TrainConfig elastic_net() { return {0.01, 0.01}; }
  static TrainConfig unregularized() { return {0.0, 0.0}; }

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct ProbeModel {
  std::vector<double> theta;
  double bias = 0.0;
  TrainConfig config;
  double final_train_loss = 0.0;
  /// NaN when trained without a dev split.
  double dev_accuracy = 0.0;
  /// Full-train-set objective after each epoch.
  std::vector<double> epoch_losses;
  /// Activation columns the weights refer to; empty means all neurons.
  std::vector<std::size_t> feature_columns;
  /// Transform applied to raw activations before the linear model.
  Standardizer standardizer;
};

struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad_theta;
  double grad_bias = 0.0;
};

/// Smooth part of the probe objective on one batch:
/// mean negative log-likelihood + lambda2 * ||theta||^2 and its exact gradient.
LossGradient loss_and_gradient(std::span<const double> theta, double bias,
                               const FeatureMatrix& batch, std::span<const int> labels,
                               double lambda2);

/// Full objective including the L1 term, averaged over all rows.
double probe_objective(std::span<const double> theta, double bias, const FeatureMatrix& features,
                       std::span<const int> labels, double lambda1, double lambda2);

/// Mini-batch proximal SGD on already-transformed features: a gradient step on
/// the smooth part followed by soft-thresholding with lr * lambda1.
/// `dev` may be null. Throws Error{Diverged} on a non-finite loss.
ProbeModel train_probe(const FeatureMatrix& train, std::span<const int> train_labels,
                       const FeatureMatrix* dev, std::span<const int> dev_labels,
                       const TrainConfig& config);

/// Trains on the dataset's train split after z-scoring fitted on that split,
/// optionally restricted to `columns`. Dev accuracy uses the dev split.
ProbeModel train_probe(const ActivationMatrix& matrix, const ConceptDataset& dataset,
                       const TrainConfig& config, std::span<const std::size_t> columns = {});

/// Fraction of rows where 1{theta.x + b > 0} matches the label. A logit of
/// exactly 0 predicts class 0.
double evaluate_probe(const ProbeModel& model, const FeatureMatrix& transformed,
                      std::span<const int> labels);

/// Applies the model's column selection and standardizer to raw rows first.
double evaluate_probe(const ProbeModel& model, const ActivationMatrix& matrix,
                      std::span<const std::size_t> rows, std::span<const int> labels);

/// Unregularized classifier on the selected neurons; returns test-split accuracy.
/// Throws SOutOfRange on an empty selection or an id >= neuron count.
double train_eval_classifier(const ActivationMatrix& matrix, const ConceptDataset& dataset,
                             std::span<const std::size_t> selected_neurons);

}  // namespace neurovote
