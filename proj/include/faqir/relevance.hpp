#pragma once

// Relevance judgments from raw annotation scores. A tuple is positive when its
// mean score is strictly greater than 3, decided as sum > 3 * count so the
// boundary is exact.

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "faqir/corpus.hpp"
#include "faqir/error.hpp"

namespace faqir {

inline constexpr int kPositiveMeanThreshold = 3;

struct RelevanceJudgment {
  std::string query_id;
  std::string faq_id;
  std::vector<int> raw_scores;
  double mean = 0.0;
  bool positive = false;
};

inline bool is_positive(std::span<const int> scores) {
  long long sum = 0;
  for (int s : scores) sum += s;
  return sum > kPositiveMeanThreshold * static_cast<long long>(scores.size());
}

inline std::vector<RelevanceJudgment> aggregate(const std::vector<AnnotationTuple>& tuples) {
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<RelevanceJudgment> out;
  out.reserve(tuples.size());
  for (const auto& t : tuples) {
    if (t.raw_scores.empty())
      throw validation_error("no scores for (" + t.query_id + ", " + t.faq_id + ")");
    for (int s : t.raw_scores)
      if (s < 1 || s > 4) throw validation_error("score " + std::to_string(s) + " outside {1..4}");
    if (!seen.emplace(t.query_id, t.faq_id).second)
      throw validation_error("duplicate annotation tuple (" + t.query_id + ", " + t.faq_id + ")");
    long long sum = 0;
    for (int s : t.raw_scores) sum += s;
    out.push_back({t.query_id, t.faq_id, t.raw_scores,
                   static_cast<double>(sum) / static_cast<double>(t.raw_scores.size()),
                   is_positive(t.raw_scores)});
  }
  return out;
}

struct AnswerableQueries {
  std::vector<Query> answerable;
  std::size_t removed_count = 0;
};

/// Drops queries with no positive judgment; keeps the input order.
inline AnswerableQueries filter_unanswerable(const std::vector<Query>& queries,
                                             const std::vector<RelevanceJudgment>& judgments) {
  std::set<std::string> has_positive;
  for (const auto& j : judgments)
    if (j.positive) has_positive.insert(j.query_id);
  AnswerableQueries out;
  for (const auto& q : queries) {
    if (has_positive.contains(q.id))
      out.answerable.push_back(q);
    else
      ++out.removed_count;
  }
  return out;
}

/// "query_id 0 faq_id rel" lines sorted by (query_id, faq_id).
inline void write_qrels(std::ostream& out, std::vector<RelevanceJudgment> judgments) {
  std::sort(judgments.begin(), judgments.end(), [](const auto& a, const auto& b) {
    return std::tie(a.query_id, a.faq_id) < std::tie(b.query_id, b.faq_id);
  });
  for (const auto& j : judgments)
    out << j.query_id << " 0 " << j.faq_id << ' ' << (j.positive ? 1 : 0) << '\n';
}

inline void emit_qrels(const std::vector<RelevanceJudgment>& judgments, const std::string& path) {
  auto out = detail::open_output(path);
  write_qrels(out, judgments);
  detail::check_written(out, path);
}

}  // namespace faqir
