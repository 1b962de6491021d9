#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "neurovote/activation_store.hpp"
#include "neurovote/concept_dataset.hpp"
#include "neurovote/ranking.hpp"

namespace neurovote {

inline constexpr const char* kSynthConceptLabel = "CONCEPT";
inline constexpr const char* kSynthOtherLabel = "OTHER";

/// Planted-neuron generator settings. Neurons 0..planted-1 are shifted by
/// delta * noise_std on concept tokens; every other value is N(0, noise_std^2).
struct SynthConfig {
  std::size_t neurons = 100;
  std::size_t tokens = 5000;
  std::size_t planted = 10;
  double delta = 2.0;
  double concept_fraction = 0.2;
  double noise_std = 1.0;
  std::uint64_t seed = 0;
  /// Planted neurons share a per-token latent factor with this correlation.
  bool correlated = false;
  double correlation = 0.5;
  int layer = 0;
  std::string model = "synthetic";
};

struct SynthDataset {
  ActivationMatrix matrix;
  TokenTable tokens;
  std::vector<std::size_t> planted;
};

/// Throws InvalidConfig when planted > neurons, the concept would have fewer
/// than kMinConceptExamples tokens, or a parameter is out of range.
SynthDataset synth_generate(const SynthConfig& config);

struct RecoveryScore {
  std::string method;
  std::size_t s = 0;
  std::size_t hits = 0;
  double precision_at_s = 0.0;
};

RecoveryScore recovery_score(const NeuronRanking& ranking, std::span<const std::size_t> planted,
                             std::size_t s);

/// Method x s grid of held-out accuracies.
struct AccuracyTable {
  std::vector<std::size_t> s_values;
  std::vector<std::string> methods;
  std::vector<std::vector<double>> accuracy;  // [method][s]
};

/// Trains the unregularized evaluation classifier on each ranking's top-s
/// neurons and records its test accuracy.
AccuracyTable accuracy_sweep(const ActivationMatrix& matrix, const ConceptDataset& dataset,
                             std::span<const NeuronRanking> rankings,
                             std::span<const std::size_t> s_values);

}  // namespace neurovote
