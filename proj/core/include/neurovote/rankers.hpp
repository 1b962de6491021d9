#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "neurovote/activation_store.hpp"
#include "neurovote/concept_dataset.hpp"
#include "neurovote/probe_trainer.hpp"
#include "neurovote/ranking.hpp"

namespace neurovote {

inline constexpr double kDefaultIouPercentile = 95.0;

// Corpus statistics are taken over the dataset's train split, raw activations.

/// score(n) = mean over concept rows - mean over non-concept rows.
NeuronRanking probeless_rank(const ActivationMatrix& matrix, const ConceptDataset& dataset);

/// score(n) = |fires and concept| / |fires or concept| where "fires" means
/// the activation exceeds the neuron's own `percentile` over the train rows.
/// Neurons whose union is empty score 0.
NeuronRanking iou_rank(const ActivationMatrix& matrix, const ConceptDataset& dataset,
                       double percentile = kDefaultIouPercentile);

/// Probeless difference divided by the neuron's range over concept rows; a
/// neuron constant over the concept scores 0.
NeuronRanking mean_select_rank(const ActivationMatrix& matrix, const ConceptDataset& dataset);

/// score(n) = |theta(n)|. Method id: lasso (lambda2 = 0), ridge (lambda1 = 0),
/// lca otherwise. `concept_name`/`layer` label the result.
NeuronRanking rank_from_probe(const ProbeModel& model, std::string concept_name = {}, int layer = 0);

/// Uniform permutation from SplitMix64(seed); score N - position.
NeuronRanking random_rank(std::size_t neurons, std::uint64_t seed);

/// Linear-interpolation percentile (the "linear" definition: position
/// p/100 * (n-1) in the sorted sample). `values` must be nonempty.
double percentile_linear(std::vector<double> values, double percentile);

/// Method id implied by a probe's penalty configuration.
std::string probe_method_id(const TrainConfig& config);

}  // namespace neurovote
