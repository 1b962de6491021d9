#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "neurovote/activation_store.hpp"
#include "neurovote/features.hpp"

namespace neurovote {

/// Concepts with fewer positive tokens than this are never turned into datasets.
inline constexpr std::size_t kMinConceptExamples = 200;

enum class Split : std::uint8_t { Train, Dev, Test };

std::string_view to_string(Split split) noexcept;

struct LabeledRows {
  std::vector<std::size_t> rows;
  std::vector<int> labels;  // 1 = concept, 0 = sampled non-concept

  std::size_t size() const noexcept { return rows.size(); }
};

/// Binary dataset for one concept: every concept token as a positive and an
/// equally sized uniform sample of the remaining tokens as negatives.
///
/// Examples are indexed 0..size()-1 with positives first, then negatives;
/// `split[i]` is the split of example i.
struct ConceptDataset {
  std::string concept_name;
  std::vector<std::size_t> positive_rows;  // ascending
  std::vector<std::size_t> negative_rows;  // ascending
  std::vector<Split> split;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return positive_rows.size() + negative_rows.size(); }
  std::size_t row_of(std::size_t example) const noexcept {
    return example < positive_rows.size() ? positive_rows[example]
                                          : negative_rows[example - positive_rows.size()];
  }
  int label_of(std::size_t example) const noexcept {
    return example < positive_rows.size() ? 1 : 0;
  }
  /// Rows and labels of one split, in example order.
  LabeledRows select(Split which) const;
  std::size_t count(Split which) const noexcept;

  friend bool operator==(const ConceptDataset&, const ConceptDataset&) = default;
};

/// Errors: ConceptTooRare (< kMinConceptExamples positives),
/// ComplementTooSmall (fewer non-concept tokens than positives).
ConceptDataset build_concept_dataset(const TokenTable& tokens, std::string_view concept_name,
                                     std::uint64_t seed);

/// Labels occurring at least `min_count` times, sorted.
std::vector<std::string> frequent_concepts(const TokenTable& tokens,
                                           std::size_t min_count = kMinConceptExamples);

/// Per-neuron z-scoring fitted on training rows. Columns whose training
/// stddev falls below kStdFloor pass through with divisor 1.
class Standardizer {
 public:
  static constexpr double kStdFloor = 1e-8;

  Standardizer() = default;
  Standardizer(std::vector<double> mean, std::vector<double> stddev)
      : mean_(std::move(mean)), stddev_(std::move(stddev)) {}

  /// Population mean/stddev of each column. Throws EmptyTrainSplit on 0 rows.
  static Standardizer fit(const FeatureMatrix& train);

  void apply(FeatureMatrix& features) const;
  void invert(FeatureMatrix& features) const;

  const std::vector<double>& mean() const noexcept { return mean_; }
  const std::vector<double>& stddev() const noexcept { return stddev_; }

 private:
  std::vector<double> mean_;
  std::vector<double> stddev_;
};

/// Fits on the dataset's train split over all neurons of `matrix`.
Standardizer fit_standardizer(const ActivationMatrix& matrix, const ConceptDataset& dataset);

/// Standardized copy of the given rows.
FeatureMatrix apply_standardizer(const Standardizer& standardizer, const ActivationMatrix& matrix,
                                 std::span<const std::size_t> rows);

}  // namespace neurovote
