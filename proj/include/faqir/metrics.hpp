#pragma once

// Retrieval metrics over binary qrels (unjudged = non-relevant) and
// classification metrics over label sequences.

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "faqir/error.hpp"
#include "faqir/ranking.hpp"

namespace faqir {

class Qrels {
 public:
  void set(const std::string& query_id, const std::string& faq_id, int rel) {
    if (rel != 0 && rel != 1) throw validation_error("qrels relevance must be 0 or 1");
    auto& q = by_query_[query_id];
    const auto [it, inserted] = q.emplace(faq_id, rel);
    if (!inserted) {
      if (it->second == rel) return;
      throw validation_error("conflicting qrels for (" + query_id + ", " + faq_id + ")");
    }
    if (rel) ++relevant_[query_id];
  }

  bool relevant(const std::string& query_id, const std::string& faq_id) const {
    auto q = by_query_.find(query_id);
    if (q == by_query_.end()) return false;
    auto it = q->second.find(faq_id);
    return it != q->second.end() && it->second == 1;
  }

  std::size_t relevant_count(const std::string& query_id) const {
    auto it = relevant_.find(query_id);
    return it == relevant_.end() ? 0 : it->second;
  }

  /// Sorted ids of queries with at least one judgment.
  std::vector<std::string> query_ids() const {
    std::vector<std::string> out;
    for (const auto& [q, _] : by_query_) out.push_back(q);
    return out;
  }

  const std::map<std::string, std::map<std::string, int>>& judgments() const { return by_query_; }

 private:
  std::map<std::string, std::map<std::string, int>> by_query_;
  std::map<std::string, std::size_t> relevant_;
};

inline Qrels read_qrels(std::istream& in) {
  Qrels qrels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string qid, iter, doc, rel_text, extra;
    if (!(fields >> qid)) continue;
    if (!(fields >> iter >> doc >> rel_text) || (fields >> extra))
      throw validation_error(detail::at_line(lineno, "expected 4 whitespace-separated fields"));
    int rel = 0;
    if (rel_text == "0") rel = 0;
    else if (rel_text == "1") rel = 1;
    else throw validation_error(detail::at_line(lineno, "relevance must be 0 or 1"));
    try {
      qrels.set(qid, doc, rel);
    } catch (const validation_error& e) {
      throw validation_error(detail::at_line(lineno, e.what()));
    }
  }
  if (in.bad()) throw io_error("read failure");
  return qrels;
}

/// Relevant hits in the top min(k, |run|) entries, divided by k.
inline double precision_at_k(const RankedList& run, const Qrels& qrels, std::size_t k) {
  if (k == 0) throw validation_error("precision_at_k(): k must be at least 1");
  const auto n = std::min(k, run.entries.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += qrels.relevant(run.query_id, run.entries[i].faq_id);
  return static_cast<double>(hits) / static_cast<double>(k);
}

inline double reciprocal_rank(const RankedList& run, const Qrels& qrels) {
  for (std::size_t i = 0; i < run.entries.size(); ++i)
    if (qrels.relevant(run.query_id, run.entries[i].faq_id)) return 1.0 / static_cast<double>(i + 1);
  return 0.0;
}

/// Sum of precision@r over relevant hits at r <= cutoff, divided by the total
/// number of relevant items R for the query (trec_eval map_cut convention).
inline double average_precision(const RankedList& run, const Qrels& qrels,
                                std::size_t cutoff = 100) {
  if (cutoff == 0) throw validation_error("average_precision(): cutoff must be at least 1");
  const auto total_relevant = qrels.relevant_count(run.query_id);
  if (total_relevant == 0) return 0.0;
  const auto n = std::min(cutoff, run.entries.size());
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (qrels.relevant(run.query_id, run.entries[i].faq_id)) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(total_relevant);
}

inline double mean_over_queries(std::span<const double> values) {
  if (values.empty()) throw validation_error("mean_over_queries(): no queries");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

struct RetrievalReport {
  double map = 0.0;
  double mrr = 0.0;
  double p_at_5 = 0.0;
  std::size_t queries = 0;
};

/// Averages over qrels queries that have at least one relevant item, in
/// query-id order. Queries missing from the run score 0.
inline RetrievalReport evaluate_run(const Run& run, const Qrels& qrels, std::size_t map_cutoff = 100) {
  std::vector<double> ap, rr, p5;
  for (const auto& qid : qrels.query_ids()) {
    if (qrels.relevant_count(qid) == 0) continue;
    auto it = run.find(qid);
    const RankedList empty{qid, {}, ""};
    const RankedList& list = it == run.end() ? empty : it->second;
    ap.push_back(average_precision(list, qrels, map_cutoff));
    rr.push_back(reciprocal_rank(list, qrels));
    p5.push_back(precision_at_k(list, qrels, 5));
  }
  if (ap.empty()) throw validation_error("qrels contain no query with a relevant item");
  return {mean_over_queries(ap), mean_over_queries(rr), mean_over_queries(p5), ap.size()};
}

// ---------------------------------------------------------------------------
// Classification

struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> counts;  // [gold][predicted]

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& row : counts)
      for (auto c : row) t += c;
    return t;
  }
  std::size_t trace() const {
    std::size_t t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
  }
};

struct ClassificationReport {
  double accuracy = 0.0;
  std::map<std::string, double> per_label_f1;
  double macro_f1 = 0.0;
  ConfusionMatrix confusion;
};

inline ClassificationReport classification_report(std::span<const std::string> gold,
                                                  std::span<const std::string> predicted,
                                                  std::span<const std::string> labels) {
  if (gold.size() != predicted.size())
    throw validation_error("classification_report(): gold and predicted lengths differ");
  if (gold.empty()) throw validation_error("classification_report(): no items");
  if (labels.empty()) throw validation_error("classification_report(): no labels");

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (!index.emplace(labels[i], i).second)
      throw validation_error("duplicate label '" + labels[i] + "'");
  auto lookup = [&](const std::string& l) {
    auto it = index.find(l);
    if (it == index.end()) throw validation_error("unknown label '" + l + "'");
    return it->second;
  };

  ClassificationReport report;
  report.confusion.labels.assign(labels.begin(), labels.end());
  report.confusion.counts.assign(labels.size(), std::vector<std::size_t>(labels.size(), 0));
  for (std::size_t i = 0; i < gold.size(); ++i)
    ++report.confusion.counts[lookup(gold[i])][lookup(predicted[i])];

  const auto& m = report.confusion.counts;
  report.accuracy = static_cast<double>(report.confusion.trace()) / static_cast<double>(gold.size());
  double f1_sum = 0.0;
  for (std::size_t c = 0; c < labels.size(); ++c) {
    std::size_t predicted_c = 0, gold_c = 0;
    for (std::size_t r = 0; r < labels.size(); ++r) {
      predicted_c += m[r][c];
      gold_c += m[c][r];
    }
    const double tp = static_cast<double>(m[c][c]);
    const double p = predicted_c ? tp / static_cast<double>(predicted_c) : 0.0;
    const double r = gold_c ? tp / static_cast<double>(gold_c) : 0.0;
    const double f1 = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    report.per_label_f1[labels[c]] = f1;
    f1_sum += f1;
  }
  report.macro_f1 = f1_sum / static_cast<double>(labels.size());
  return report;
}

}  // namespace faqir
