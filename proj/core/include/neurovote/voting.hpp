#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "neurovote/ranking.hpp"

namespace neurovote {

/// |a ∩ b| / |a ∪ b| over neuron ids. Two empty sets give 0.
double overlap(std::span<const std::size_t> a, std::span<const std::size_t> b);
double overlap(const NeuronSet& a, const NeuronSet& b);

/// Mean overlap of `test` with every member of `pool`. Throws EmptyPool.
double avg_overlap(const NeuronSet& test, std::span<const NeuronSet> pool);

/// Borda weight of every neuron: sum over voters of (s - position) for
/// neurons in the voter's top-s list, 0 otherwise.
std::vector<std::int64_t> borda_weights(std::span<const NeuronSet> pool, std::size_t s,
                                        std::size_t neurons);

/// Which way the aggregated Borda weights are sorted. Descending puts the
/// most endorsed neurons first; Ascending is the literal reading of the
/// formula and exists for auditing only.
enum class BordaOrder { Descending, Ascending };

/// All `neurons` ids ordered by aggregated weight (ties by ascending id).
std::vector<std::size_t> borda_aggregate(std::span<const NeuronSet> pool, std::size_t s,
                                         std::size_t neurons,
                                         BordaOrder order = BordaOrder::Descending);

/// Overlap of `test` with the first s ids of the pool's Borda consensus.
/// Throws EmptyPool.
double neuron_vote(const NeuronSet& test, std::span<const NeuronSet> pool, std::size_t neurons,
                   BordaOrder order = BordaOrder::Descending);

/// Rankings of several methods for one (concept, layer), in insertion order.
class MethodPool {
 public:
  MethodPool() = default;
  MethodPool(std::string concept_name, int layer)
      : concept_name_(std::move(concept_name)), layer_(layer) {}

  /// Throws InvalidConfig on a duplicate method id or a mismatched N.
  void add(NeuronRanking ranking);

  const std::vector<NeuronRanking>& rankings() const noexcept { return rankings_; }
  std::size_t size() const noexcept { return rankings_.size(); }
  std::size_t neurons() const noexcept { return rankings_.empty() ? 0 : rankings_.front().size(); }
  const std::string& concept_name() const noexcept { return concept_name_; }
  int layer() const noexcept { return layer_; }

 private:
  std::string concept_name_;
  int layer_ = 0;
  std::vector<NeuronRanking> rankings_;
};

/// Symmetric method x method overlap table with unit diagonal.
struct PairwiseMatrix {
  std::vector<std::string> methods;
  std::vector<double> values;  // row-major, methods.size()^2

  double at(std::size_t i, std::size_t j) const noexcept { return values[i * methods.size() + j]; }
};

/// Pairwise top-s overlaps of the given rankings. Throws EmptyPool for fewer
/// than two rankings.
PairwiseMatrix pairwise_matrix(std::span<const NeuronRanking> rankings, std::size_t s);
PairwiseMatrix pairwise_matrix(const MethodPool& pool, std::size_t s);

struct MethodScore {
  std::string method;
  double avg_overlap = 0.0;
  double neuron_vote = 0.0;
  /// True for pool members (scored leave-one-out), false for external tests.
  bool voter = true;
};

struct CompatibilityReport {
  std::string concept_name;
  int layer = 0;
  std::size_t s = 0;
  std::vector<std::string> pool_methods;
  std::vector<std::string> extra_methods;
  std::vector<MethodScore> scores;  // pool members first, then extras
  PairwiseMatrix pairwise;          // over pool followed by extras
};

/// Scores each pool member against the rest of the pool and every extra test
/// against the full pool. Throws EmptyPool when the pool has < 2 members.
CompatibilityReport leave_one_out_report(const MethodPool& pool,
                                         std::span<const NeuronRanking> extra_tests,
                                         std::size_t s,
                                         BordaOrder order = BordaOrder::Descending);

struct MethodAggregate {
  double avg_overlap = 0.0;
  double neuron_vote = 0.0;
  std::size_t cells = 0;
};

/// Unweighted means over cells. Method keys follow the canonical method order.
struct AggregateReport {
  std::vector<std::string> methods;
  std::map<std::string, MethodAggregate> overall;
  std::map<int, std::map<std::string, MethodAggregate>> per_layer;
  /// Pairwise matrices averaged over concepts for each (layer, s).
  std::map<std::pair<int, std::size_t>, PairwiseMatrix> heatmaps;
};

AggregateReport aggregate_cells(std::span<const CompatibilityReport> reports);

/// Canonical report order: known ids in toolkit order, then others sorted.
std::vector<std::string> order_methods(std::vector<std::string> ids);

}  // namespace neurovote
