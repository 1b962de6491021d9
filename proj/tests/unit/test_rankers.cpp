#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "neurovote/error.hpp"
#include "neurovote/evaluator.hpp"
#include "neurovote/experiment.hpp"
#include "neurovote/rankers.hpp"
#include "neurovote/rng.hpp"
#include "support/fixtures.hpp"

using namespace neurovote;
using namespace neurovote::testing;

namespace {

// Columns of random activations with a few shifted neurons.
std::vector<std::vector<double>> random_columns(std::uint64_t seed, std::size_t neurons,
                                                const std::vector<int>& labels) {
  SplitMix64 rng(seed);
  std::vector<std::vector<double>> cols(neurons, std::vector<double>(labels.size()));
  for (std::size_t c = 0; c < neurons; ++c) {
    const double shift = 0.3 * static_cast<double>(c % 4);
    for (std::size_t r = 0; r < labels.size(); ++r) cols[c][r] = rng.normal() + (labels[r] == 1 ? shift : 0.0);
  }
  return cols;
}

std::vector<int> alternating(std::size_t n, std::size_t every = 3) {
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i % every == 0 ? 1 : 0;
  return labels;
}

double score_of(const NeuronRanking& r, std::size_t id) {
  for (const auto& e : r.ordered) {
    if (e.id == id) return e.score;
  }
  FAIL("id missing from ranking");
  return 0.0;
}

}  // namespace

TEST_CASE("probeless mean difference") {
  const ActivationMatrix m = matrix_from({{1, 5}, {0, 5}, {3, 5}, {2, 5}});
  const ConceptDataset ds = manual_dataset({1, 0, 1, 0});
  const NeuronRanking r = probeless_rank(m, ds);
  CHECK(is_valid_ranking(r));
  CHECK(r.method == "probeless");
  CHECK(score_of(r, 0) == doctest::Approx(1.0));
  CHECK(score_of(r, 1) == 0.0);
  CHECK(top_s(r, 1).ids == std::vector<std::size_t>{0});
}

TEST_CASE("probeless ignores token order and non-train rows") {
  const auto labels = alternating(60);
  const auto cols = random_columns(3, 5, labels);
  const ActivationMatrix m = matrix_from_columns(cols);
  ConceptDataset ds = manual_dataset(labels);
  const NeuronRanking base = probeless_rank(m, ds);

  std::vector<std::size_t> perm(labels.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  SplitMix64 rng(1);
  rng.shuffle(std::span<std::size_t>(perm));
  std::vector<std::vector<double>> shuffled(cols.size(), std::vector<double>(labels.size()));
  std::vector<int> shuffled_labels(labels.size());
  for (std::size_t r = 0; r < labels.size(); ++r) {
    shuffled_labels[r] = labels[perm[r]];
    for (std::size_t c = 0; c < cols.size(); ++c) shuffled[c][r] = cols[c][perm[r]];
  }
  CHECK(probeless_rank(matrix_from_columns(shuffled), manual_dataset(shuffled_labels)).ids() == base.ids());

  ds.split[0] = Split::Test;
  const double before = score_of(base, 0);
  CHECK(score_of(probeless_rank(m, ds), 0) != doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("corpus methods need both classes in train") {
  const ActivationMatrix m = matrix_from({{1}, {2}});
  ConceptDataset ds = manual_dataset({1, 0});
  ds.split[1] = Split::Dev;
  CHECK_THROWS_AS(probeless_rank(m, ds), Error);
  CHECK_THROWS_AS(mean_select_rank(m, ds), Error);
}

TEST_CASE("percentile uses linear interpolation") {
  CHECK(percentile_linear({0.9, 0.1, 0.8, 0.2}, 50) == doctest::Approx(0.5));
  CHECK(percentile_linear({1, 2, 3, 4, 5}, 95) == doctest::Approx(4.8));
  CHECK(percentile_linear({7}, 95) == 7.0);
}

TEST_CASE("IoU hand enumeration") {
  const ActivationMatrix m = matrix_from({{0.9, 1.0}, {0.1, 0.0}, {0.8, 0.0}, {0.2, 1.0}});
  const ConceptDataset ds = manual_dataset({1, 0, 0, 1});
  const NeuronRanking r = iou_rank(m, ds, 50.0);
  CHECK(is_valid_ranking(r));
  CHECK(score_of(r, 0) == doctest::Approx(1.0 / 3.0));
  // Neuron 1 fires above its median exactly on the concept rows.
  CHECK(score_of(r, 1) == doctest::Approx(1.0));
  CHECK(r.ids() == std::vector<std::size_t>{1, 0});
  CHECK_THROWS_AS(iou_rank(m, ds, 0.0), Error);
  CHECK_THROWS_AS(iou_rank(m, ds, 100.0), Error);
}

TEST_CASE("IoU is invariant under strictly increasing per-neuron transforms") {
  const auto labels = alternating(200, 4);
  auto cols = random_columns(9, 8, labels);
  const NeuronRanking base = iou_rank(matrix_from_columns(cols), manual_dataset(labels));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (double& v : cols[c]) {
      switch (c % 3) {
        case 0: v = std::exp(v); break;
        case 1: v = v * v * v + 2.0 * v; break;
        default: v = std::atan(v) * 3.0 - 1.0; break;
      }
    }
  }
  const NeuronRanking moved = iou_rank(matrix_from_columns(cols), manual_dataset(labels));
  CHECK(moved.ids() == base.ids());
  for (std::size_t i = 0; i < base.size(); ++i) CHECK(moved.ordered[i].score == base.ordered[i].score);
}

TEST_CASE("MeanSelect normalises by the concept range") {
  const ActivationMatrix m = matrix_from({{1, 4}, {0, 1}, {3, 4}, {2, 9}});
  const ConceptDataset ds = manual_dataset({1, 0, 1, 0});
  const NeuronRanking r = mean_select_rank(m, ds);
  CHECK(r.method == "meanselect");
  CHECK(score_of(r, 0) == doctest::Approx(0.5));
  CHECK(score_of(r, 1) == 0.0);  // constant over the concept
}

TEST_CASE("MeanSelect is invariant under positive affine maps; probeless is not") {
  const auto labels = alternating(90);
  auto cols = random_columns(21, 6, labels);
  const ActivationMatrix before = matrix_from_columns(cols);
  const NeuronRanking ms = mean_select_rank(before, manual_dataset(labels));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const double a = 0.5 + static_cast<double>(c);
    const double b = static_cast<double>(c) - 2.0;
    for (double& v : cols[c]) v = a * v + b;
  }
  const ActivationMatrix after = matrix_from_columns(cols);
  const NeuronRanking ms2 = mean_select_rank(after, manual_dataset(labels));
  CHECK(ms2.ids() == ms.ids());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    // float storage of the transformed values bounds the agreement
    CHECK(ms2.ordered[i].score == doctest::Approx(ms.ordered[i].score).epsilon(1e-5));
  }

  // Scaling counterexample: neuron 0 has the larger raw gap, scaling neuron 1
  // by 10 flips the probeless order.
  const std::vector<int> l{1, 1, 0, 0};
  const NeuronRanking p1 = probeless_rank(matrix_from({{2, 1}, {2, 1}, {0, 0}, {0, 0}}), manual_dataset(l));
  const NeuronRanking p2 = probeless_rank(matrix_from({{2, 10}, {2, 10}, {0, 0}, {0, 0}}), manual_dataset(l));
  CHECK(p1.ids() == std::vector<std::size_t>{0, 1});
  CHECK(p2.ids() == std::vector<std::size_t>{1, 0});
}

TEST_CASE("probe weight rankings") {
  ProbeModel model;
  model.theta = {0.5, -2.0, 0.0};
  model.config = TrainConfig::lasso();
  NeuronRanking r = rank_from_probe(model, "C", 3);
  CHECK(r.ids() == std::vector<std::size_t>{1, 0, 2});
  CHECK(r.method == "lasso");
  CHECK(r.layer == 3);

  for (double& t : model.theta) t = -t;
  CHECK(rank_from_probe(model).ids() == r.ids());

  model.theta.assign(4, 0.0);
  model.config = TrainConfig::ridge();
  r = rank_from_probe(model);
  CHECK(r.method == "ridge");
  CHECK(r.ids() == std::vector<std::size_t>{0, 1, 2, 3});
  model.config = TrainConfig::elastic_net();
  CHECK(rank_from_probe(model).method == "lca");
}

TEST_CASE("random ranking") {
  CHECK(random_rank(7, 5) == random_rank(7, 5));
  CHECK(is_valid_ranking(random_rank(50, 1)));
  CHECK(random_rank(1, 9).ids() == std::vector<std::size_t>{0});

  std::vector<int> first(10, 0);
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) ++first[random_rank(10, static_cast<std::uint64_t>(d)).ordered[0].id];
  for (int f : first) CHECK(std::abs(f / static_cast<double>(draws) - 0.1) <= 0.01);
}

TEST_CASE("top_s bounds") {
  const NeuronRanking r = random_rank(5, 2);
  CHECK(top_s(r, 5).ids.size() == 5);
  CHECK_THROWS_AS(top_s(r, 0), Error);
  CHECK_THROWS_AS(top_s(r, 6), Error);
}

TEST_CASE("rankings follow a consistent relabeling of neuron ids") {
  const auto labels = alternating(150);
  const auto cols = random_columns(44, 7, labels);
  const std::vector<std::size_t> perm{3, 6, 0, 5, 1, 4, 2};  // new id of old column
  std::vector<std::vector<double>> relabeled(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) relabeled[perm[c]] = cols[c];

  const ActivationMatrix a = matrix_from_columns(cols);
  const ActivationMatrix b = matrix_from_columns(relabeled);
  const ConceptDataset ds = manual_dataset(labels);
  MethodSettings settings;
  for (std::string_view method : methods::kAll) {
    if (method == methods::kRandom) continue;
    CAPTURE(method);
    const NeuronRanking ra = run_method(method, a, ds, settings);
    const NeuronRanking rb = run_method(method, b, ds, settings);
    REQUIRE(ra.size() == rb.size());
    CHECK(is_valid_ranking(rb));
    // Scores move with the ids; the order may differ only inside exact ties.
    for (std::size_t old_id = 0; old_id < ra.size(); ++old_id) {
      CHECK(score_of(rb, perm[old_id]) == doctest::Approx(score_of(ra, old_id)).epsilon(1e-9));
    }
  }
}

TEST_CASE("planted neurons lead the corpus rankings") {
  SynthConfig cfg;
  cfg.seed = 11;
  const SynthDataset synth = synth_generate(cfg);
  const ConceptDataset ds = build_concept_dataset(synth.tokens, kSynthConceptLabel, 11);
  for (const NeuronRanking& r : {probeless_rank(synth.matrix, ds), iou_rank(synth.matrix, ds),
                                 mean_select_rank(synth.matrix, ds)}) {
    CAPTURE(r.method);
    CHECK(is_valid_ranking(r));
    CHECK(r.ordered.front().id < cfg.planted);
    CHECK(recovery_score(r, synth.planted, 10).hits >= 8);
  }
}
