#pragma once

#include <optional>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "neurovote/concept_dataset.hpp"
#include "neurovote/evaluator.hpp"
#include "neurovote/probe_trainer.hpp"
#include "neurovote/ranking.hpp"
#include "neurovote/voting.hpp"

namespace neurovote {

using Json = nlohmann::ordered_json;

Json to_json(const ConceptDataset& dataset);
ConceptDataset concept_dataset_from_json(const Json& j);

Json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const Json& j, TrainConfig defaults = {});

Json to_json(const ProbeModel& model);
ProbeModel probe_model_from_json(const Json& j);

/// {method, concept, layer, s?, ordered: [[id, score], ...]}; with `s` set
/// only the first s entries are written.
Json to_json(const NeuronRanking& ranking, std::optional<std::size_t> s = std::nullopt);
NeuronRanking ranking_from_json(const Json& j);

Json to_json(const PairwiseMatrix& matrix);
Json to_json(const CompatibilityReport& report);
Json to_json(const RecoveryScore& score);
Json to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const Json& j, SynthConfig defaults = {});

/// Shortest decimal text that round-trips the double ("nan" for NaN).
std::string format_number(double value);

/// method,<s1>,<s2>,...
void write_accuracy_csv(std::ostream& out, const AccuracyTable& table);

enum class Metric { AvgOverlap, NeuronVote };

/// method,all,layer_<L>,... with one row per method.
void write_scores_csv(std::ostream& out, const AggregateReport& report, Metric metric);

/// Square matrix with a header row and a leading method column.
void write_pairwise_csv(std::ostream& out, const PairwiseMatrix& matrix);

}  // namespace neurovote
