#include "neurovote/rankers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "neurovote/error.hpp"
#include "neurovote/rng.hpp"

namespace neurovote {

namespace {

struct ClassMoments {
  std::vector<double> concept_mean;
  std::vector<double> other_mean;
  std::vector<double> concept_min;
  std::vector<double> concept_max;
};

ClassMoments train_moments(const ActivationMatrix& matrix, const ConceptDataset& dataset) {
  const std::size_t n = matrix.cols();
  ClassMoments m{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                 std::vector<double>(n, std::numeric_limits<double>::infinity()),
                 std::vector<double>(n, -std::numeric_limits<double>::infinity())};
  std::size_t positives = 0;
  std::size_t negatives = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset.split[i] != Split::Train) continue;
    const auto row = matrix.row(dataset.row_of(i));
    if (dataset.label_of(i) == 1) {
      ++positives;
      for (std::size_t j = 0; j < n; ++j) {
        const double v = row[j];
        m.concept_mean[j] += v;
        m.concept_min[j] = std::min(m.concept_min[j], v);
        m.concept_max[j] = std::max(m.concept_max[j], v);
      }
    } else {
      ++negatives;
      for (std::size_t j = 0; j < n; ++j) m.other_mean[j] += row[j];
    }
  }
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorCode::EmptyTrainSplit, "train split needs both concept and non-concept rows");
  }
  for (std::size_t j = 0; j < n; ++j) {
    m.concept_mean[j] /= static_cast<double>(positives);
    m.other_mean[j] /= static_cast<double>(negatives);
  }
  return m;
}

}  // namespace

NeuronRanking probeless_rank(const ActivationMatrix& matrix, const ConceptDataset& dataset) {
  const ClassMoments m = train_moments(matrix, dataset);
  std::vector<double> scores(matrix.cols());
  for (std::size_t j = 0; j < scores.size(); ++j) scores[j] = m.concept_mean[j] - m.other_mean[j];
  return make_ranking(std::string(methods::kProbeless), dataset.concept_name, matrix.layer(), scores);
}

double percentile_linear(std::vector<double> values, double percentile) {
  const double pos = percentile / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  const auto lo_it = values.begin() + static_cast<std::ptrdiff_t>(lo);
  std::nth_element(values.begin(), lo_it, values.end());
  const double lower = *lo_it;
  // The next order statistic is the smallest element above the partition point.
  const double upper = lo_it + 1 == values.end() ? lower : *std::min_element(lo_it + 1, values.end());
  return lower + frac * (upper - lower);
}

NeuronRanking iou_rank(const ActivationMatrix& matrix, const ConceptDataset& dataset,
                       double percentile) {
  if (!(percentile > 0.0 && percentile < 100.0)) {
    throw Error(ErrorCode::InvalidConfig, "IoU percentile must lie in (0, 100)");
  }
  const LabeledRows train = dataset.select(Split::Train);
  if (train.size() == 0) throw Error(ErrorCode::EmptyTrainSplit, "dataset has no train rows");

  const std::size_t n = matrix.cols();
  std::vector<double> scores(n, 0.0);
  std::vector<double> column(train.size());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < train.size(); ++i) column[i] = matrix.at(train.rows[i], j);
    const double threshold = percentile_linear(column, percentile);
    std::size_t both = 0;
    std::size_t either = 0;
    for (std::size_t i = 0; i < train.size(); ++i) {
      const bool fires = column[i] > threshold;
      const bool in_concept = train.labels[i] == 1;
      both += (fires && in_concept) ? 1 : 0;
      either += (fires || in_concept) ? 1 : 0;
    }
    scores[j] = either == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(either);
  }
  return make_ranking(std::string(methods::kIou), dataset.concept_name, matrix.layer(), scores);
}

NeuronRanking mean_select_rank(const ActivationMatrix& matrix, const ConceptDataset& dataset) {
  const ClassMoments m = train_moments(matrix, dataset);
  std::vector<double> scores(matrix.cols(), 0.0);
  for (std::size_t j = 0; j < scores.size(); ++j) {
    const double range = m.concept_max[j] - m.concept_min[j];
    if (range > 0.0) scores[j] = (m.concept_mean[j] - m.other_mean[j]) / range;
  }
  return make_ranking(std::string(methods::kMeanSelect), dataset.concept_name, matrix.layer(), scores);
}

std::string probe_method_id(const TrainConfig& config) {
  if (config.lambda2 == 0.0) return std::string(methods::kLasso);
  if (config.lambda1 == 0.0) return std::string(methods::kRidge);
  return std::string(methods::kLca);
}

NeuronRanking rank_from_probe(const ProbeModel& model, std::string concept_name, int layer) {
  std::vector<double> scores(model.theta.size());
  for (std::size_t j = 0; j < scores.size(); ++j) scores[j] = std::abs(model.theta[j]);
  return make_ranking(probe_method_id(model.config), std::move(concept_name), layer, scores);
}

NeuronRanking random_rank(std::size_t neurons, std::uint64_t seed) {
  std::vector<std::size_t> perm(neurons);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  SplitMix64 rng(seed);
  rng.shuffle(std::span<std::size_t>(perm));
  NeuronRanking ranking{std::string(methods::kRandom), {}, 0, {}};
  ranking.ordered.reserve(neurons);
  for (std::size_t pos = 0; pos < neurons; ++pos) {
    ranking.ordered.push_back({perm[pos], static_cast<double>(neurons - pos)});
  }
  return ranking;
}

}  // namespace neurovote
