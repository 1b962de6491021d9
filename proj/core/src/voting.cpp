#include "neurovote/voting.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

#include "neurovote/error.hpp"

namespace neurovote {

double overlap(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  std::vector<std::size_t> sa(a.begin(), a.end());
  std::vector<std::size_t> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::size_t common = 0;
  auto ia = sa.begin();
  auto ib = sb.begin();
  while (ia != sa.end() && ib != sb.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t united = sa.size() + sb.size() - common;
  return united == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(united);
}

double overlap(const NeuronSet& a, const NeuronSet& b) { return overlap(a.ids, b.ids); }

double avg_overlap(const NeuronSet& test, std::span<const NeuronSet> pool) {
  if (pool.empty()) throw Error(ErrorCode::EmptyPool, "AvgOverlap needs at least one other method");
  double total = 0.0;
  for (const auto& other : pool) total += overlap(test, other);
  return total / static_cast<double>(pool.size());
}

std::vector<std::int64_t> borda_weights(std::span<const NeuronSet> pool, std::size_t s,
                                        std::size_t neurons) {
  std::vector<std::int64_t> weights(neurons, 0);
  for (const auto& voter : pool) {
    const std::size_t len = std::min(s, voter.ids.size());
    for (std::size_t pos = 0; pos < len; ++pos) {
      weights.at(voter.ids[pos]) += static_cast<std::int64_t>(s - pos);
    }
  }
  return weights;
}

std::vector<std::size_t> borda_aggregate(std::span<const NeuronSet> pool, std::size_t s,
                                         std::size_t neurons, BordaOrder order) {
  const std::vector<std::int64_t> weights = borda_weights(pool, s, neurons);
  std::vector<std::size_t> ids(neurons);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    return order == BordaOrder::Descending ? weights[a] > weights[b] : weights[a] < weights[b];
  });
  return ids;
}

double neuron_vote(const NeuronSet& test, std::span<const NeuronSet> pool, std::size_t neurons,
                   BordaOrder order) {
  if (pool.empty()) throw Error(ErrorCode::EmptyPool, "NeuronVote needs at least one other method");
  const std::size_t s = test.ids.size();
  std::vector<std::size_t> best = borda_aggregate(pool, s, neurons, order);
  best.resize(std::min(s, best.size()));
  return overlap(test.ids, best);
}

void MethodPool::add(NeuronRanking ranking) {
  for (const auto& existing : rankings_) {
    if (existing.method == ranking.method) {
      throw Error(ErrorCode::InvalidConfig, "duplicate method '" + ranking.method + "' in pool");
    }
  }
  if (!rankings_.empty() && ranking.size() != neurons()) {
    throw Error(ErrorCode::InvalidConfig, "ranking '" + ranking.method + "' covers " +
                                              std::to_string(ranking.size()) + " neurons, pool has " +
                                              std::to_string(neurons()));
  }
  rankings_.push_back(std::move(ranking));
}

PairwiseMatrix pairwise_matrix(std::span<const NeuronRanking> rankings, std::size_t s) {
  if (rankings.size() < 2) {
    throw Error(ErrorCode::EmptyPool, "pairwise comparison needs at least two methods");
  }
  std::vector<NeuronSet> sets;
  PairwiseMatrix m;
  for (const auto& r : rankings) {
    sets.push_back(top_s(r, s));
    m.methods.push_back(r.method);
  }
  const std::size_t k = sets.size();
  m.values.assign(k * k, 1.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double o = overlap(sets[i], sets[j]);
      m.values[i * k + j] = o;
      m.values[j * k + i] = o;
    }
  }
  return m;
}

PairwiseMatrix pairwise_matrix(const MethodPool& pool, std::size_t s) {
  return pairwise_matrix(pool.rankings(), s);
}

CompatibilityReport leave_one_out_report(const MethodPool& pool,
                                         std::span<const NeuronRanking> extra_tests, std::size_t s,
                                         BordaOrder order) {
  if (pool.size() < 2) {
    throw Error(ErrorCode::EmptyPool, "leave-one-out needs at least two pool methods, got " +
                                          std::to_string(pool.size()));
  }
  const std::size_t neurons = pool.neurons();
  CompatibilityReport report;
  report.concept_name = pool.concept_name();
  report.layer = pool.layer();
  report.s = s;

  std::vector<NeuronSet> sets;
  for (const auto& r : pool.rankings()) {
    sets.push_back(top_s(r, s));
    report.pool_methods.push_back(r.method);
  }
  for (std::size_t m = 0; m < sets.size(); ++m) {
    std::vector<NeuronSet> others;
    for (std::size_t j = 0; j < sets.size(); ++j) {
      if (j != m) others.push_back(sets[j]);
    }
    report.scores.push_back({report.pool_methods[m], avg_overlap(sets[m], others),
                             neuron_vote(sets[m], others, neurons, order), true});
  }

  std::vector<NeuronRanking> everyone = pool.rankings();
  for (const auto& extra : extra_tests) {
    if (extra.size() != neurons) {
      throw Error(ErrorCode::InvalidConfig, "extra ranking '" + extra.method + "' has wrong size");
    }
    const NeuronSet test = top_s(extra, s);
    report.extra_methods.push_back(extra.method);
    report.scores.push_back({extra.method, avg_overlap(test, sets),
                             neuron_vote(test, sets, neurons, order), false});
    everyone.push_back(extra);
  }
  report.pairwise = pairwise_matrix(everyone, s);
  return report;
}

std::vector<std::string> order_methods(std::vector<std::string> ids) {
  auto rank_of = [](const std::string& id) {
    const auto* it = std::find(std::begin(methods::kAll), std::end(methods::kAll), id);
    return static_cast<std::size_t>(it - std::begin(methods::kAll));
  };
  std::sort(ids.begin(), ids.end(), [&](const std::string& a, const std::string& b) {
    const auto ra = rank_of(a);
    const auto rb = rank_of(b);
    return ra != rb ? ra < rb : a < b;
  });
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

AggregateReport aggregate_cells(std::span<const CompatibilityReport> reports) {
  AggregateReport out;
  std::vector<std::string> seen;
  auto accumulate = [](MethodAggregate& agg, const MethodScore& score) {
    agg.avg_overlap += score.avg_overlap;
    agg.neuron_vote += score.neuron_vote;
    ++agg.cells;
  };
  auto finish = [](MethodAggregate& agg) {
    if (agg.cells == 0) return;
    agg.avg_overlap /= static_cast<double>(agg.cells);
    agg.neuron_vote /= static_cast<double>(agg.cells);
  };

  // (layer, s) -> (method_i, method_j) -> (sum, count)
  std::map<std::pair<int, std::size_t>, std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>>>
      heat_sums;

  for (const auto& report : reports) {
    for (const auto& score : report.scores) {
      seen.push_back(score.method);
      accumulate(out.overall[score.method], score);
      accumulate(out.per_layer[report.layer][score.method], score);
    }
    auto& cell = heat_sums[{report.layer, report.s}];
    const auto& pm = report.pairwise;
    for (std::size_t i = 0; i < pm.methods.size(); ++i) {
      for (std::size_t j = 0; j < pm.methods.size(); ++j) {
        auto& slot = cell[{pm.methods[i], pm.methods[j]}];
        slot.first += pm.at(i, j);
        ++slot.second;
      }
    }
  }
  for (auto& [method, agg] : out.overall) finish(agg);
  for (auto& [layer, table] : out.per_layer) {
    for (auto& [method, agg] : table) finish(agg);
  }
  out.methods = order_methods(std::move(seen));

  for (const auto& [key, sums] : heat_sums) {
    std::vector<std::string> names;
    for (const auto& [pair, slot] : sums) names.push_back(pair.first);
    PairwiseMatrix m;
    m.methods = order_methods(std::move(names));
    const std::size_t k = m.methods.size();
    m.values.assign(k * k, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const auto it = sums.find({m.methods[i], m.methods[j]});
        if (it != sums.end() && it->second.second > 0) {
          m.values[i * k + j] = it->second.first / static_cast<double>(it->second.second);
        }
      }
    }
    out.heatmaps.emplace(key, std::move(m));
  }
  return out;
}

}  // namespace neurovote
