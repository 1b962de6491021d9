#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "neurovote/activation_store.hpp"
#include "neurovote/concept_dataset.hpp"
#include "neurovote/features.hpp"
#include "neurovote/ranking.hpp"

namespace neurovote {

struct GaussianOptions {
  /// Diagonal loading as a fraction of the class's mean covariance diagonal.
  double relative_loading = 1e-3;
  /// Overrides the relative rule with a fixed amount added to the diagonal.
  std::optional<double> absolute_loading;
  /// Share one (count-weighted) covariance between both classes.
  bool pooled_covariance = false;
  /// Stop the greedy sweep after this many neurons; 0 selects all.
  std::size_t max_selected = 0;
};

struct ClassGaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  double log_prior = 0.0;
  std::size_t count = 0;
  /// Amount added to every diagonal entry of `covariance`.
  double loading = 0.0;
};

/// Class-conditional Gaussians; classes[1] is the concept, classes[0] the rest.
struct GaussianModel {
  std::array<ClassGaussian, 2> classes;

  std::size_t dims() const noexcept { return static_cast<std::size_t>(classes[0].mean.size()); }
};

/// Selected neuron ids in selection order and the train log-likelihood
/// reached after each addition.
struct GreedyState {
  std::vector<std::size_t> selected;
  std::vector<double> loglik_trace;
};

/// MAP fit: per-class mean, population covariance plus diagonal loading,
/// empirical log-priors. Throws ClassTooSmall when a class has < 2 rows.
GaussianModel fit_gaussian(const FeatureMatrix& features, std::span<const int> labels,
                           const GaussianOptions& options = {});

/// Fits on the train split using raw activations.
GaussianModel fit_gaussian(const ActivationMatrix& matrix, const ConceptDataset& dataset,
                           const GaussianOptions& options = {});

/// Sum over rows of log p(label | x restricted to `subset`), using the
/// marginal Gaussians over `subset` and Bayes' rule with the class priors.
/// Throws SingularSubCovariance if a sub-covariance is not positive definite.
double subset_label_loglik(const GaussianModel& model, std::span<const std::size_t> subset,
                           const FeatureMatrix& features, std::span<const int> labels);

double subset_label_loglik(const GaussianModel& model, std::span<const std::size_t> subset,
                           const ActivationMatrix& matrix, std::span<const std::size_t> rows,
                           std::span<const int> labels);

/// Forward selection maximizing subset_label_loglik; ties go to the lower id.
/// Extends per-class Cholesky factors one row at a time so each candidate
/// costs O(k^2 + rows * k) at subset size k.
GreedyState greedy_select(const GaussianModel& model, const FeatureMatrix& features,
                          std::span<const int> labels, std::size_t max_selected = 0);

/// Greedy ranking on the train split: score N - position for selected neurons,
/// -1 for neurons left out by `max_selected` (ordered by id).
NeuronRanking gaussian_greedy_rank(const GaussianModel& model, const ActivationMatrix& matrix,
                                   const ConceptDataset& dataset, const GaussianOptions& options = {});

}  // namespace neurovote
