#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "neurovote/activation_store.hpp"
#include "neurovote/concept_dataset.hpp"
#include "neurovote/gaussian_probe.hpp"
#include "neurovote/probe_trainer.hpp"
#include "neurovote/ranking.hpp"
#include "neurovote/serialization.hpp"
#include "neurovote/voting.hpp"

namespace neurovote {

/// Settings shared by every ranking method.
struct MethodSettings {
  double iou_percentile = 95.0;
  /// learning_rate/epochs/batch_size apply to all probes; lambda1 is the L1
  /// strength of lasso and lca, lambda2 the L2 strength of ridge and lca.
  TrainConfig train;
  std::size_t gaussian_max_selected = 0;
};

/// Runs one method on one concept dataset. Probe and random seeds are derived
/// from the dataset seed and the method id. Throws InvalidConfig for an
/// unknown method id.
NeuronRanking run_method(std::string_view method, const ActivationMatrix& matrix,
                         const ConceptDataset& dataset, const MethodSettings& settings);

struct ExperimentConfig {
  std::vector<std::filesystem::path> datasets;
  /// Empty means every label with at least kMinConceptExamples tokens.
  std::vector<std::string> concepts;
  std::vector<std::string> methods{std::begin(methods::kAll), std::end(methods::kAll)};
  std::vector<std::size_t> s_values{10, 30, 50};
  MethodSettings settings;
  BordaOrder borda_order = BordaOrder::Descending;
  std::uint64_t seed = 0;
  std::filesystem::path output = "out";
};

/// Parses the JSON config; missing keys keep the defaults of `base`.
ExperimentConfig experiment_config_from_json(const Json& j, ExperimentConfig base = {});
Json to_json(const ExperimentConfig& config);

/// Throws InvalidConfig if no method, no s value, an unknown method id, s = 0
/// or a missing dataset directory.
void validate_config(const ExperimentConfig& config);

struct RunOptions {
  /// Worker threads evaluating (layer, concept) cells. Never affects output.
  std::size_t workers = 1;
};

struct ExperimentSummary {
  std::size_t cells_succeeded = 0;
  std::size_t cells_failed = 0;
  std::vector<std::filesystem::path> files;  // relative to the output dir

  bool partial_failure() const noexcept { return cells_failed > 0; }
};

/// Builds every (layer, concept) dataset, ranks it with every method, scores
/// each s with leave-one-out voting and writes:
///   manifest.json, tables/avg_overlap.csv, tables/neuron_vote.csv,
///   heatmaps/layer{L}_s{S}.csv, heatmaps/colour_scale.json, cells/*.json
/// Cell-level failures are recorded in the manifest and do not abort the run.
/// Dataset load errors and invalid configs throw.
ExperimentSummary run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// File-system-safe rendering of a concept label.
std::string sanitize_component(std::string_view text);

}  // namespace neurovote
