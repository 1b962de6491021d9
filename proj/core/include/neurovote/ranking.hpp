#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace neurovote {

namespace methods {
inline constexpr std::string_view kProbeless = "probeless";
inline constexpr std::string_view kIou = "iou";
inline constexpr std::string_view kLasso = "lasso";
inline constexpr std::string_view kRidge = "ridge";
inline constexpr std::string_view kLca = "lca";
inline constexpr std::string_view kGaussian = "gaussian";
inline constexpr std::string_view kMeanSelect = "meanselect";
inline constexpr std::string_view kRandom = "random";

/// The six methods that vote for each other under leave-one-out.
inline constexpr std::string_view kPool[] = {kProbeless, kIou, kLasso, kRidge, kLca, kGaussian};
/// Every method id the toolkit can produce, in report order.
inline constexpr std::string_view kAll[] = {kProbeless, kIou,      kLasso,      kRidge,
                                            kLca,       kGaussian, kMeanSelect, kRandom};

bool is_known(std::string_view id) noexcept;
bool is_pool_member(std::string_view id) noexcept;
}  // namespace methods

struct ScoredNeuron {
  std::size_t id = 0;
  double score = 0.0;

  friend bool operator==(const ScoredNeuron&, const ScoredNeuron&) = default;
};

/// Full ordering of a layer's neurons for one concept. `ordered` is a
/// permutation of 0..N-1, scores non-increasing, equal scores by ascending id.
struct NeuronRanking {
  std::string method;
  std::string concept_name;
  int layer = 0;
  std::vector<ScoredNeuron> ordered;

  std::size_t size() const noexcept { return ordered.size(); }
  std::vector<std::size_t> ids() const;

  friend bool operator==(const NeuronRanking&, const NeuronRanking&) = default;
};

/// Sorts per-neuron scores (index = neuron id) into a ranking.
NeuronRanking make_ranking(std::string method, std::string concept_name, int layer,
                           std::span<const double> scores);

/// True when `ranking` satisfies the permutation / ordering / tie invariants.
bool is_valid_ranking(const NeuronRanking& ranking) noexcept;

/// The first `s` ids of a ranking, kept in rank order (the order matters for
/// Borda weighting; set semantics everywhere else).
struct NeuronSet {
  std::size_t s = 0;
  std::vector<std::size_t> ids;
  std::string source_method;
};

/// Errors: SOutOfRange unless 1 <= s <= N.
NeuronSet top_s(const NeuronRanking& ranking, std::size_t s);

}  // namespace neurovote
