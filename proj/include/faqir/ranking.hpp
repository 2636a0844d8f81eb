#pragma once

// RankedList is the interchange unit between the rankers, fusion, pooling and
// evaluation. On disk it is a TREC run file:
//
//   query_id Q0 faq_id rank score tag
//
// Scores are written with 17 significant digits so a run survives a
// write/read cycle bit-for-bit.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "faqir/error.hpp"

namespace faqir {

struct RunEntry {
  std::string faq_id;
  std::size_t rank = 0;  // 1-based
  double score = 0.0;

  friend bool operator==(const RunEntry&, const RunEntry&) = default;
};

struct RankedList {
  std::string query_id;
  std::vector<RunEntry> entries;
  std::string tag;

  friend bool operator==(const RankedList&, const RankedList&) = default;
};

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

/// Orders (id, score) candidates by score descending, id ascending, keeps the
/// first k, and assigns ranks from 1.
inline RankedList make_ranked_list(std::string query_id, std::string tag,
                                   std::vector<std::pair<std::string, double>> scored,
                                   std::size_t k) {
  auto better = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  if (k < scored.size()) {
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k),
                      scored.end(), better);
    scored.resize(k);
  } else {
    std::sort(scored.begin(), scored.end(), better);
  }
  RankedList list{std::move(query_id), {}, std::move(tag)};
  list.entries.reserve(scored.size());
  for (std::size_t i = 0; i < scored.size(); ++i)
    list.entries.push_back({std::move(scored[i].first), i + 1, scored[i].second});
  return list;
}

/// Ranks contiguous from 1, scores non-increasing, ids unique.
inline void validate(const RankedList& list) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    const auto& e = list.entries[i];
    if (e.rank != i + 1)
      throw validation_error("query '" + list.query_id + "': ranks are not contiguous from 1");
    if (!std::isfinite(e.score))
      throw validation_error("query '" + list.query_id + "': non-finite score");
    if (i > 0 && e.score > list.entries[i - 1].score)
      throw validation_error("query '" + list.query_id + "': scores increase at rank " +
                             std::to_string(e.rank));
    if (!seen.insert(e.faq_id).second)
      throw validation_error("query '" + list.query_id + "': duplicate item '" + e.faq_id + "'");
  }
}

/// One run file, grouped by query id (sorted).
using Run = std::map<std::string, RankedList>;

inline Run read_run(std::istream& in) {
  Run run;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string qid, q0, doc, rank_text, score_text, tag, extra;
    if (!(fields >> qid)) continue;
    if (!(fields >> q0 >> doc >> rank_text >> score_text >> tag) || (fields >> extra))
      throw validation_error(detail::at_line(lineno, "expected 6 whitespace-separated fields"));
    std::size_t rank = 0;
    double score = 0.0;
    try {
      std::size_t used = 0;
      const long long r = std::stoll(rank_text, &used);
      if (used != rank_text.size() || r < 1) throw std::invalid_argument("rank");
      rank = static_cast<std::size_t>(r);
      score = std::stod(score_text, &used);
      if (used != score_text.size()) throw std::invalid_argument("score");
    } catch (const std::exception&) {
      throw validation_error(detail::at_line(lineno, "bad rank or score"));
    }
    auto& list = run[qid];
    if (list.entries.empty()) {
      list.query_id = qid;
      list.tag = tag;
    }
    list.entries.push_back({doc, rank, score});
  }
  if (in.bad()) throw io_error("read failure");
  for (auto& [qid, list] : run) {
    std::stable_sort(list.entries.begin(), list.entries.end(),
                     [](const RunEntry& a, const RunEntry& b) { return a.rank < b.rank; });
    validate(list);
  }
  return run;
}

inline std::string format_score(double score) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", score);
  return buf;
}

inline void write_run(std::ostream& out, const RankedList& list) {
  for (const auto& e : list.entries)
    out << list.query_id << " Q0 " << e.faq_id << ' ' << e.rank << ' ' << format_score(e.score)
        << ' ' << list.tag << '\n';
}

inline void write_run(std::ostream& out, const Run& run) {
  for (const auto& [qid, list] : run) write_run(out, list);
}

}  // namespace faqir
