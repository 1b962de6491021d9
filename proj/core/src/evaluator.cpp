#include "neurovote/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "neurovote/error.hpp"
#include "neurovote/probe_trainer.hpp"
#include "neurovote/rng.hpp"

namespace neurovote {

namespace {
constexpr std::size_t kTokensPerSentence = 25;
}

SynthDataset synth_generate(const SynthConfig& config) {
  if (config.neurons == 0 || config.tokens == 0) {
    throw Error(ErrorCode::InvalidConfig, "synthetic data needs neurons > 0 and tokens > 0");
  }
  if (config.planted > config.neurons) {
    throw Error(ErrorCode::InvalidConfig, "planted neuron count exceeds neuron count");
  }
  if (!(config.concept_fraction > 0.0 && config.concept_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "concept_fraction must lie in (0, 1)");
  }
  if (!(config.noise_std > 0.0) || !std::isfinite(config.delta)) {
    throw Error(ErrorCode::InvalidConfig, "noise_std must be positive and delta finite");
  }
  if (config.correlated && !(config.correlation >= 0.0 && config.correlation <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "correlation must lie in [0, 1]");
  }
  const auto concept_count =
      static_cast<std::size_t>(std::llround(config.concept_fraction * static_cast<double>(config.tokens)));
  if (concept_count < kMinConceptExamples) {
    throw Error(ErrorCode::InvalidConfig, "concept_fraction * tokens = " + std::to_string(concept_count) +
                                              " is below " + std::to_string(kMinConceptExamples));
  }

  SplitMix64 rng(config.seed);
  std::vector<std::size_t> order(config.tokens);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<bool> is_concept(config.tokens, false);
  for (std::size_t i = 0; i < concept_count; ++i) is_concept[order[i]] = true;

  const double shift = config.delta * config.noise_std;
  const double shared = std::sqrt(config.correlation);
  const double own = std::sqrt(1.0 - config.correlation);
  std::vector<float> values(config.tokens * config.neurons);
  for (std::size_t r = 0; r < config.tokens; ++r) {
    const double latent = config.correlated ? rng.normal() : 0.0;
    for (std::size_t n = 0; n < config.neurons; ++n) {
      const bool planted = n < config.planted;
      double v = rng.normal();
      if (planted && config.correlated) v = shared * latent + own * v;
      v *= config.noise_std;
      if (planted && is_concept[r]) v += shift;
      values[r * config.neurons + n] = static_cast<float>(v);
    }
  }

  SynthDataset out{ActivationMatrix(config.tokens, config.neurons, std::move(values), config.layer,
                                    config.model),
                   {},
                   {}};
  out.tokens.reserve(config.tokens);
  for (std::size_t r = 0; r < config.tokens; ++r) {
    out.tokens.push_back({static_cast<std::int64_t>(r / kTokensPerSentence),
                          static_cast<std::int64_t>(r % kTokensPerSentence), "w" + std::to_string(r),
                          is_concept[r] ? kSynthConceptLabel : kSynthOtherLabel});
  }
  out.planted.resize(config.planted);
  std::iota(out.planted.begin(), out.planted.end(), std::size_t{0});
  return out;
}

RecoveryScore recovery_score(const NeuronRanking& ranking, std::span<const std::size_t> planted,
                             std::size_t s) {
  const NeuronSet top = top_s(ranking, s);
  const std::set<std::size_t> truth(planted.begin(), planted.end());
  std::size_t hits = 0;
  for (std::size_t id : top.ids) hits += truth.count(id);
  return {ranking.method, s, hits, static_cast<double>(hits) / static_cast<double>(s)};
}

AccuracyTable accuracy_sweep(const ActivationMatrix& matrix, const ConceptDataset& dataset,
                             std::span<const NeuronRanking> rankings,
                             std::span<const std::size_t> s_values) {
  AccuracyTable table;
  table.s_values.assign(s_values.begin(), s_values.end());
  for (const auto& ranking : rankings) {
    table.methods.push_back(ranking.method);
    std::vector<double> row;
    for (std::size_t s : s_values) {
      const NeuronSet top = top_s(ranking, s);
      row.push_back(train_eval_classifier(matrix, dataset, top.ids));
    }
    table.accuracy.push_back(std::move(row));
  }
  return table;
}

}  // namespace neurovote
