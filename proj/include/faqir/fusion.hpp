#pragma once

// Score normalization, CombSum fusion and candidate pooling.

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "faqir/error.hpp"
#include "faqir/ranking.hpp"

namespace faqir {

/// Per-list min-max: (s - min) / (max - min); a constant list maps to 0.5.
inline RankedList minmax_normalize(const RankedList& list) {
  if (list.entries.empty()) throw validation_error("minmax_normalize(): empty list");
  double lo = list.entries.front().score;
  double hi = lo;
  for (const auto& e : list.entries) {
    lo = std::min(lo, e.score);
    hi = std::max(hi, e.score);
  }
  RankedList out = list;
  for (auto& e : out.entries) e.score = hi == lo ? 0.5 : (e.score - lo) / (hi - lo);
  return out;
}

/// CombSum over lists for one query. Each non-empty list is min-max
/// normalized; an item's fused score is the sum of its normalized scores
/// divided by the number of lists (absent = 0).
inline RankedList combsum(std::span<const RankedList> lists, std::size_t k = kUnlimited) {
  if (lists.size() < 2) throw validation_error("combsum(): need at least two lists");
  if (k == 0) throw validation_error("combsum(): k must be at least 1");
  const auto& qid = lists.front().query_id;
  for (const auto& l : lists)
    if (l.query_id != qid)
      throw validation_error("combsum(): mismatched query ids '" + qid + "' and '" + l.query_id + "'");

  std::map<std::string, double> sums;
  for (const auto& l : lists) {
    if (l.entries.empty()) continue;
    for (const auto& e : minmax_normalize(l).entries) sums[e.faq_id] += e.score;
  }
  const auto n = static_cast<double>(lists.size());
  std::vector<std::pair<std::string, double>> fused;
  fused.reserve(sums.size());
  for (const auto& [id, s] : sums) fused.emplace_back(id, s / n);
  return make_ranked_list(qid, "combsum", std::move(fused), k);
}

/// Union of each list's top-k ids, sorted ascending.
inline std::vector<std::string> build_candidate_pool(std::span<const RankedList> lists,
                                                     std::size_t per_list_k = 10) {
  if (per_list_k == 0) throw validation_error("per_list_k must be at least 1");
  std::set<std::string> pool;
  for (const auto& l : lists) {
    const auto n = std::min(per_list_k, l.entries.size());
    for (std::size_t i = 0; i < n; ++i) pool.insert(l.entries[i].faq_id);
  }
  return {pool.begin(), pool.end()};
}

struct PoolStats {
  double mean_size = 0.0;
  std::size_t min_size = 0;
  std::size_t max_size = 0;
};

inline PoolStats pool_stats(std::span<const std::vector<std::string>> pools) {
  if (pools.empty()) throw validation_error("pool_stats(): no pools");
  PoolStats stats{0.0, pools.front().size(), pools.front().size()};
  std::size_t total = 0;
  for (const auto& p : pools) {
    total += p.size();
    stats.min_size = std::min(stats.min_size, p.size());
    stats.max_size = std::max(stats.max_size, p.size());
  }
  stats.mean_size = static_cast<double>(total) / static_cast<double>(pools.size());
  return stats;
}

}  // namespace faqir
