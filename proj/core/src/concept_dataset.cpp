#include "neurovote/concept_dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "neurovote/error.hpp"
#include "neurovote/rng.hpp"

namespace neurovote {

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "train";
}

LabeledRows ConceptDataset::select(Split which) const {
  LabeledRows out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (split[i] != which) continue;
    out.rows.push_back(row_of(i));
    out.labels.push_back(label_of(i));
  }
  return out;
}

std::size_t ConceptDataset::count(Split which) const noexcept {
  return static_cast<std::size_t>(std::count(split.begin(), split.end(), which));
}

ConceptDataset build_concept_dataset(const TokenTable& tokens, std::string_view concept_name,
                                     std::uint64_t seed) {
  ConceptDataset ds;
  ds.concept_name = std::string(concept_name);
  ds.seed = seed;

  std::vector<std::size_t> complement;
  for (std::size_t r = 0; r < tokens.size(); ++r) {
    (tokens[r].label == concept_name ? ds.positive_rows : complement).push_back(r);
  }
  const std::size_t positives = ds.positive_rows.size();
  if (positives < kMinConceptExamples) {
    throw Error(ErrorCode::ConceptTooRare,
                "concept '" + ds.concept_name + "' has " + std::to_string(positives) +
                    " examples, need at least " + std::to_string(kMinConceptExamples));
  }
  if (complement.size() < positives) {
    throw Error(ErrorCode::ComplementTooSmall,
                "concept '" + ds.concept_name + "' has " + std::to_string(positives) +
                    " examples but only " + std::to_string(complement.size()) +
                    " non-concept tokens");
  }

  SplitMix64 rng(seed);
  // Partial Fisher-Yates: the first `positives` slots become a uniform sample.
  for (std::size_t i = 0; i < positives; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(complement.size() - i));
    std::swap(complement[i], complement[j]);
  }
  ds.negative_rows.assign(complement.begin(), complement.begin() + static_cast<std::ptrdiff_t>(positives));
  std::sort(ds.negative_rows.begin(), ds.negative_rows.end());

  const std::size_t total = ds.size();
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));

  const auto n_train = static_cast<std::size_t>(std::llround(0.70 * static_cast<double>(total)));
  const auto n_dev = static_cast<std::size_t>(std::llround(0.15 * static_cast<double>(total)));
  ds.split.assign(total, Split::Test);
  for (std::size_t k = 0; k < total; ++k) {
    if (k < n_train) {
      ds.split[order[k]] = Split::Train;
    } else if (k < n_train + n_dev) {
      ds.split[order[k]] = Split::Dev;
    }
  }
  return ds;
}

std::vector<std::string> frequent_concepts(const TokenTable& tokens, std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto& rec : tokens) ++counts[rec.label];
  std::vector<std::string> out;
  for (const auto& [label, n] : counts) {
    if (n >= min_count) out.push_back(label);
  }
  return out;
}

Standardizer Standardizer::fit(const FeatureMatrix& train) {
  if (train.rows == 0) throw Error(ErrorCode::EmptyTrainSplit, "cannot fit standardizer on 0 rows");
  const double n = static_cast<double>(train.rows);
  std::vector<double> mean(train.cols, 0.0);
  std::vector<double> stddev(train.cols, 0.0);
  for (std::size_t r = 0; r < train.rows; ++r) {
    const auto row = train.row(r);
    for (std::size_t c = 0; c < train.cols; ++c) mean[c] += row[c];
  }
  for (double& m : mean) m /= n;
  for (std::size_t r = 0; r < train.rows; ++r) {
    const auto row = train.row(r);
    for (std::size_t c = 0; c < train.cols; ++c) {
      const double d = row[c] - mean[c];
      stddev[c] += d * d;
    }
  }
  for (double& s : stddev) {
    s = std::sqrt(s / n);
    if (s < kStdFloor) s = 1.0;
  }
  return Standardizer(std::move(mean), std::move(stddev));
}

void Standardizer::apply(FeatureMatrix& features) const {
  for (std::size_t r = 0; r < features.rows; ++r) {
    auto row = features.row(r);
    for (std::size_t c = 0; c < features.cols; ++c) row[c] = (row[c] - mean_[c]) / stddev_[c];
  }
}

void Standardizer::invert(FeatureMatrix& features) const {
  for (std::size_t r = 0; r < features.rows; ++r) {
    auto row = features.row(r);
    for (std::size_t c = 0; c < features.cols; ++c) row[c] = row[c] * stddev_[c] + mean_[c];
  }
}

Standardizer fit_standardizer(const ActivationMatrix& matrix, const ConceptDataset& dataset) {
  const LabeledRows train = dataset.select(Split::Train);
  if (train.size() == 0) throw Error(ErrorCode::EmptyTrainSplit, "dataset has no train rows");
  return Standardizer::fit(gather(matrix, train.rows));
}

FeatureMatrix apply_standardizer(const Standardizer& standardizer, const ActivationMatrix& matrix,
                                 std::span<const std::size_t> rows) {
  FeatureMatrix out = gather(matrix, rows);
  standardizer.apply(out);
  return out;
}

}  // namespace neurovote
