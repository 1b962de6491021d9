#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "neurovote/concept_dataset.hpp"
#include "neurovote/evaluator.hpp"
#include "neurovote/gaussian_probe.hpp"
#include "neurovote/probe_trainer.hpp"
#include "neurovote/rankers.hpp"
#include "neurovote/rng.hpp"
#include "neurovote/voting.hpp"

using namespace neurovote;

namespace {

struct Fixture {
  SynthDataset data;
  ConceptDataset dataset;
};

const Fixture& fixture(std::size_t neurons) {
  static std::vector<std::pair<std::size_t, Fixture>> cache;
  for (const auto& [n, f] : cache) {
    if (n == neurons) return f;
  }
  SynthConfig cfg;
  cfg.neurons = neurons;
  cfg.seed = 1;
  SynthDataset d = synth_generate(cfg);
  ConceptDataset ds = build_concept_dataset(d.tokens, kSynthConceptLabel, 1);
  cache.emplace_back(neurons, Fixture{std::move(d), std::move(ds)});
  return cache.back().second;
}

void BM_LeaveOneOut(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto s = static_cast<std::size_t>(state.range(1));
  MethodPool pool("C", 0);
  for (std::string_view m : methods::kPool) {
    NeuronRanking r = random_rank(n, derive_seed(7, m));
    r.method = std::string(m);
    pool.add(std::move(r));
  }
  const std::vector<NeuronRanking> extras{random_rank(n, 99)};
  for (auto _ : state) benchmark::DoNotOptimize(leave_one_out_report(pool, extras, s));
}
BENCHMARK(BM_LeaveOneOut)->Args({768, 10})->Args({768, 50})->Args({3072, 50});

void BM_Probeless(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(probeless_rank(f.data.matrix, f.dataset));
}
BENCHMARK(BM_Probeless)->Arg(100)->Arg(768);

void BM_Iou(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(iou_rank(f.data.matrix, f.dataset));
}
BENCHMARK(BM_Iou)->Arg(100)->Arg(768);

void BM_TrainElasticNet(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(train_probe(f.data.matrix, f.dataset, TrainConfig::elastic_net()));
}
BENCHMARK(BM_TrainElasticNet)->Arg(100)->Arg(768)->Unit(benchmark::kMillisecond);

void BM_GaussianGreedy(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  GaussianOptions opts;
  opts.max_selected = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    const GaussianModel model = fit_gaussian(f.data.matrix, f.dataset, opts);
    benchmark::DoNotOptimize(gaussian_greedy_rank(model, f.data.matrix, f.dataset, opts));
  }
}
BENCHMARK(BM_GaussianGreedy)->Args({100, 0})->Args({768, 50})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
