#pragma once

// Straight-from-the-definition voting metrics used as an independent oracle.
// Deliberately uses std::set / linear search and different sort mechanics
// from the library implementation.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

namespace neurovote::testing {

using IdList = std::vector<std::size_t>;

inline double naive_overlap(const IdList& a, const IdList& b) {
  const std::set<std::size_t> sa(a.begin(), a.end());
  const std::set<std::size_t> sb(b.begin(), b.end());
  std::size_t inter = 0;
  for (std::size_t x : sa) inter += sb.count(x);
  std::set<std::size_t> uni = sa;
  uni.insert(sb.begin(), sb.end());
  return uni.empty() ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni.size());
}

inline double naive_avg_overlap(const IdList& test, const std::vector<IdList>& pool) {
  double sum = 0.0;
  for (const auto& other : pool) sum += naive_overlap(test, other);
  return sum / static_cast<double>(pool.size());
}

/// Weight of neuron n = sum over voters of s - index(list, n), 0 if absent.
inline std::vector<std::int64_t> naive_borda_weights(const std::vector<IdList>& pool, std::size_t s,
                                                     std::size_t n) {
  std::vector<std::int64_t> w(n, 0);
  for (std::size_t id = 0; id < n; ++id) {
    for (const auto& list : pool) {
      const auto it = std::find(list.begin(), list.end(), id);
      if (it != list.end()) w[id] += static_cast<std::int64_t>(s) - (it - list.begin());
    }
  }
  return w;
}

inline IdList naive_borda(const std::vector<IdList>& pool, std::size_t s, std::size_t n) {
  const auto w = naive_borda_weights(pool, s, n);
  std::vector<std::pair<std::int64_t, std::size_t>> keyed;
  for (std::size_t id = 0; id < n; ++id) keyed.emplace_back(-w[id], id);
  std::sort(keyed.begin(), keyed.end());
  IdList out;
  for (const auto& [negw, id] : keyed) out.push_back(id);
  return out;
}

inline double naive_neuron_vote(const IdList& test, const std::vector<IdList>& pool, std::size_t n) {
  IdList best = naive_borda(pool, test.size(), n);
  best.resize(test.size());
  return naive_overlap(test, best);
}

struct NaiveScores {
  std::vector<double> avg_overlap;
  std::vector<double> neuron_vote;
};

/// Leave-one-out over `pool` (top-s lists), then `extras` against the full pool.
inline NaiveScores naive_leave_one_out(const std::vector<IdList>& pool, const std::vector<IdList>& extras,
                                       std::size_t n) {
  NaiveScores out;
  for (std::size_t m = 0; m < pool.size(); ++m) {
    std::vector<IdList> rest;
    for (std::size_t j = 0; j < pool.size(); ++j) {
      if (j != m) rest.push_back(pool[j]);
    }
    out.avg_overlap.push_back(naive_avg_overlap(pool[m], rest));
    out.neuron_vote.push_back(naive_neuron_vote(pool[m], rest, n));
  }
  for (const auto& e : extras) {
    out.avg_overlap.push_back(naive_avg_overlap(e, pool));
    out.neuron_vote.push_back(naive_neuron_vote(e, pool, n));
  }
  return out;
}

}  // namespace neurovote::testing
