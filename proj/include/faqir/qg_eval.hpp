#pragma once

// Evaluation of generated questions: corpus diversity (Distinct-n,
// Entropy-n), relevance to a reference (sentence BLEU, ROUGE-L, best of
// several candidates), and question-type distributions compared by KL
// divergence.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "faqir/error.hpp"
#include "faqir/qpp_tools.hpp"
#include "faqir/text.hpp"

namespace faqir {

struct NgramDistribution {
  std::size_t n = 0;
  std::map<Ngram, std::size_t> counts;
  std::size_t total = 0;
};

inline NgramDistribution count_ngrams(std::span<const TokenSequence> corpus, std::size_t n) {
  NgramDistribution dist{n, {}, 0};
  for (const auto& sentence : corpus)
    for (auto& g : ngrams(sentence, n)) {
      ++dist.counts[std::move(g)];
      ++dist.total;
    }
  return dist;
}

inline double distinct_n(std::span<const TokenSequence> corpus, std::size_t n) {
  const auto dist = count_ngrams(corpus, n);
  if (dist.total == 0) throw validation_error("distinct_n(): corpus has no " + std::to_string(n) + "-grams");
  return static_cast<double>(dist.counts.size()) / static_cast<double>(dist.total);
}

/// Shannon entropy (natural log) of the corpus n-gram distribution.
inline double entropy_n(std::span<const TokenSequence> corpus, std::size_t n) {
  const auto dist = count_ngrams(corpus, n);
  if (dist.total == 0) throw validation_error("entropy_n(): corpus has no " + std::to_string(n) + "-grams");
  const auto total = static_cast<double>(dist.total);
  double h = 0.0;
  for (const auto& [g, c] : dist.counts) {
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h;
}

inline constexpr double kBleuEpsilon = 1e-9;

/// Sentence BLEU: geometric mean of clipped n-gram precisions (n = 1..max_n)
/// times min(1, exp(1 - r/c)). Zero precisions are replaced by kBleuEpsilon.
/// Orders longer than the candidate contribute no n-grams and are left out of
/// the mean. The reference length r is the one closest to c (ties: shorter).
inline double bleu_n(std::span<const std::string> candidate, std::span<const TokenSequence> references,
                     std::size_t max_n = 4) {
  if (candidate.empty()) throw validation_error("bleu_n(): empty candidate");
  if (references.empty()) throw validation_error("bleu_n(): no references");
  if (max_n == 0) throw validation_error("bleu_n(): max_n must be at least 1");

  double log_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 1; n <= max_n && n <= candidate.size(); ++n) {
    std::map<Ngram, std::size_t> cand;
    for (auto& g : ngrams(candidate, n)) ++cand[std::move(g)];
    std::map<Ngram, std::size_t> max_ref;
    for (const auto& ref : references) {
      std::map<Ngram, std::size_t> counts;
      for (auto& g : ngrams(ref, n)) ++counts[std::move(g)];
      for (const auto& [g, c] : counts) max_ref[g] = std::max(max_ref[g], c);
    }
    std::size_t clipped = 0, total = 0;
    for (const auto& [g, c] : cand) {
      total += c;
      auto it = max_ref.find(g);
      if (it != max_ref.end()) clipped += std::min(c, it->second);
    }
    const double p = clipped ? static_cast<double>(clipped) / static_cast<double>(total) : kBleuEpsilon;
    log_sum += std::log(p);
    ++orders;
  }

  const auto c = candidate.size();
  std::size_t r = references.front().size();
  for (const auto& ref : references) {
    const auto d_new = ref.size() > c ? ref.size() - c : c - ref.size();
    const auto d_old = r > c ? r - c : c - r;
    if (d_new < d_old || (d_new == d_old && ref.size() < r)) r = ref.size();
  }
  const double bp = std::min(1.0, std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c)));
  return std::clamp(bp * std::exp(log_sum / static_cast<double>(orders)), 0.0, 1.0);
}

inline double bleu_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                     std::size_t max_n = 4) {
  const TokenSequence ref(reference.begin(), reference.end());
  return bleu_n(candidate, std::span<const TokenSequence>(&ref, 1), max_n);
}

inline std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline constexpr double kRougeBeta = 1.2;

/// LCS F-measure with beta = 1.2.
inline double rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) throw validation_error("rouge_l(): empty input");
  const auto lcs = static_cast<double>(lcs_length(candidate, reference));
  if (lcs == 0.0) return 0.0;
  const double p = lcs / static_cast<double>(candidate.size());
  const double r = lcs / static_cast<double>(reference.size());
  const double b2 = kRougeBeta * kRougeBeta;
  return (1.0 + b2) * p * r / (r + b2 * p);
}

enum class RelevanceMetric { bleu, rouge_l };

/// Best score over several generated candidates.
inline double top1_relevance(std::span<const TokenSequence> candidates,
                             std::span<const std::string> reference, RelevanceMetric metric,
                             std::size_t bleu_max_n = 4) {
  if (candidates.empty()) throw validation_error("top1_relevance(): no candidates");
  double best = 0.0;
  for (const auto& c : candidates) {
    const double s = metric == RelevanceMetric::bleu ? bleu_n(c, reference, bleu_max_n) : rouge_l(c, reference);
    best = std::max(best, s);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Question types

inline const std::string kOtherType = "OTHER";

/// Longest phrase of the set that opens the question, or "OTHER".
inline std::string question_type(std::span<const std::string> question, const PhraseSet& phrases) {
  const auto match = match_leading_phrase(question, phrases);
  return match.empty() ? kOtherType : join(match);
}

using TypeDistribution = std::map<std::string, double>;

inline TypeDistribution type_distribution(std::span<const TokenSequence> questions, const PhraseSet& phrases) {
  if (questions.empty()) throw validation_error("type_distribution(): no questions");
  std::map<std::string, std::size_t> counts;
  for (const auto& q : questions) ++counts[question_type(q, phrases)];
  TypeDistribution dist;
  for (const auto& [type, c] : counts)
    dist[type] = static_cast<double>(c) / static_cast<double>(questions.size());
  return dist;
}

enum class KlDirection { generated_to_truth, truth_to_generated };

/// KL(generated || truth) by default. Both distributions are extended to the
/// union of their supports, floored at epsilon and renormalized.
inline double kl_divergence(const TypeDistribution& generated, const TypeDistribution& truth,
                            double epsilon = 1e-6,
                            KlDirection direction = KlDirection::generated_to_truth) {
  if (!(epsilon > 0.0)) throw validation_error("kl_divergence(): epsilon must be positive");
  std::map<std::string, std::pair<double, double>> joint;
  for (const auto& [k, v] : generated) {
    if (!(v >= 0.0)) throw validation_error("kl_divergence(): negative probability");
    joint[k].first = v;
  }
  for (const auto& [k, v] : truth) {
    if (!(v >= 0.0)) throw validation_error("kl_divergence(): negative probability");
    joint[k].second = v;
  }
  if (joint.empty()) throw validation_error("kl_divergence(): empty distributions");

  double zp = 0.0, zq = 0.0;
  for (auto& [k, pq] : joint) {
    pq.first = std::max(pq.first, epsilon);
    pq.second = std::max(pq.second, epsilon);
    zp += pq.first;
    zq += pq.second;
  }
  double kl = 0.0;
  for (const auto& [k, pq] : joint) {
    double p = pq.first / zp;
    double q = pq.second / zq;
    if (direction == KlDirection::truth_to_generated) std::swap(p, q);
    kl += p * std::log(p / q);
  }
  return std::max(kl, 0.0);
}

}  // namespace faqir
