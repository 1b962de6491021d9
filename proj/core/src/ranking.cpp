#include "neurovote/ranking.hpp"

#include <algorithm>
#include <numeric>

#include "neurovote/error.hpp"

namespace neurovote {

namespace methods {

bool is_known(std::string_view id) noexcept {
  return std::find(std::begin(kAll), std::end(kAll), id) != std::end(kAll);
}

bool is_pool_member(std::string_view id) noexcept {
  return std::find(std::begin(kPool), std::end(kPool), id) != std::end(kPool);
}

}  // namespace methods

std::vector<std::size_t> NeuronRanking::ids() const {
  std::vector<std::size_t> out;
  out.reserve(ordered.size());
  for (const auto& n : ordered) out.push_back(n.id);
  return out;
}

NeuronRanking make_ranking(std::string method, std::string concept_name, int layer,
                           std::span<const double> scores) {
  NeuronRanking ranking{std::move(method), std::move(concept_name), layer, {}};
  ranking.ordered.reserve(scores.size());
  for (std::size_t id = 0; id < scores.size(); ++id) ranking.ordered.push_back({id, scores[id]});
  std::stable_sort(ranking.ordered.begin(), ranking.ordered.end(),
                   [](const ScoredNeuron& a, const ScoredNeuron& b) { return a.score > b.score; });
  return ranking;
}

bool is_valid_ranking(const NeuronRanking& ranking) noexcept {
  const std::size_t n = ranking.ordered.size();
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& cur = ranking.ordered[i];
    if (cur.id >= n || seen[cur.id]) return false;
    seen[cur.id] = true;
    if (i > 0) {
      const auto& prev = ranking.ordered[i - 1];
      if (prev.score < cur.score) return false;
      if (prev.score == cur.score && prev.id > cur.id) return false;
    }
  }
  return true;
}

NeuronSet top_s(const NeuronRanking& ranking, std::size_t s) {
  if (s == 0 || s > ranking.size()) {
    throw Error(ErrorCode::SOutOfRange, "s = " + std::to_string(s) + " outside [1, " +
                                            std::to_string(ranking.size()) + "]");
  }
  NeuronSet set{s, {}, ranking.method};
  set.ids.reserve(s);
  for (std::size_t i = 0; i < s; ++i) set.ids.push_back(ranking.ordered[i].id);
  return set;
}

}  // namespace neurovote
