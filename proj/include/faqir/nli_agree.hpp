#pragma once

// Finer-grained NLI labels from Likert annotations in [-3, 3], the
// annotation partitioning and auxiliary labels used to train one learner per
// annotator mode, the weighted multi-task loss, and a rule-based baseline
// driven by the embedding environment, subject person and matrix verb.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faqir/corpus.hpp"
#include "faqir/error.hpp"

namespace faqir {

enum class FinerLabel { Entailment, Neutral, Contradiction, Disagreement };
enum class AuxLabel { contradiction, neutral, entailment };  // ordered by polarity

inline constexpr std::array<std::string_view, 4> kFinerLabelNames = {"Entailment", "Neutral",
                                                                      "Contradiction", "Disagreement"};

inline std::string_view to_string(FinerLabel l) { return kFinerLabelNames[static_cast<std::size_t>(l)]; }

inline std::optional<FinerLabel> parse_finer_label(std::string_view s) {
  for (std::size_t i = 0; i < kFinerLabelNames.size(); ++i)
    if (kFinerLabelNames[i] == s) return static_cast<FinerLabel>(i);
  return std::nullopt;
}

inline std::string_view to_string(AuxLabel l) {
  switch (l) {
    case AuxLabel::entailment: return "entailment";
    case AuxLabel::neutral: return "neutral";
    case AuxLabel::contradiction: return "contradiction";
  }
  throw invariant_error("bad AuxLabel");
}

namespace detail {

inline void check_annotations(std::span<const int> annotations) {
  if (annotations.empty()) throw validation_error("no annotations");
  for (int a : annotations)
    if (a < -3 || a > 3) throw validation_error("annotation " + std::to_string(a) + " outside [-3, 3]");
}

// All moments are kept as integers so every threshold below is exact:
//   mean > t       <=> sum > t*n
//   variance <= 1  <=> n*sum_sq - sum^2 <= n^2      (population variance)
//   frac >= 0.8    <=> 5*count >= 4*n
struct Moments {
  long long n = 0, sum = 0, sum_sq = 0;

  explicit Moments(std::span<const int> xs) {
    for (int x : xs) {
      ++n;
      sum += x;
      sum_sq += static_cast<long long>(x) * x;
    }
  }
  bool variance_at_most_one() const { return n * sum_sq - sum * sum <= n * n; }
  bool at_least_80_percent(long long count) const { return 5 * count >= 4 * n; }
};

}  // namespace detail

/// Entailment:    >= 80% in [1,3]   OR (variance <= 1 AND mean > 1)
/// Neutral:       >= 80% equal 0    OR (variance <= 1 AND |mean| <= 0.5)
/// Contradiction: >= 80% in [-3,-1] OR (variance <= 1 AND mean < -1)
/// Disagreement otherwise. First match in the order above wins.
inline FinerLabel finer_label(std::span<const int> annotations) {
  detail::check_annotations(annotations);
  const detail::Moments m(annotations);
  const auto count = [&](auto pred) {
    return static_cast<long long>(std::count_if(annotations.begin(), annotations.end(), pred));
  };
  const bool low_var = m.variance_at_most_one();

  if (m.at_least_80_percent(count([](int a) { return a >= 1; })) || (low_var && m.sum > m.n))
    return FinerLabel::Entailment;
  if (m.at_least_80_percent(count([](int a) { return a == 0; })) ||
      (low_var && 2 * std::abs(m.sum) <= m.n))
    return FinerLabel::Neutral;
  if (m.at_least_80_percent(count([](int a) { return a <= -1; })) || (low_var && m.sum < -m.n))
    return FinerLabel::Contradiction;
  return FinerLabel::Disagreement;
}

/// Sorts descending and cuts into three contiguous slices of sizes
/// floor(n/3) plus one extra for the first slice when n%3 >= 1 and for the
/// third when n%3 == 2 (8 -> 3,2,3).
inline std::array<std::vector<int>, 3> partition(std::span<const int> annotations) {
  if (annotations.size() < 3) throw validation_error("partition(): need at least 3 annotations");
  std::vector<int> sorted(annotations.begin(), annotations.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const auto n = sorted.size();
  std::array<std::size_t, 3> sizes{n / 3, n / 3, n / 3};
  if (n % 3 >= 1) ++sizes[0];
  if (n % 3 == 2) ++sizes[2];
  std::array<std::vector<int>, 3> parts;
  auto it = sorted.begin();
  for (std::size_t p = 0; p < 3; ++p) {
    parts[p].assign(it, it + static_cast<std::ptrdiff_t>(sizes[p]));
    it += static_cast<std::ptrdiff_t>(sizes[p]);
  }
  return parts;
}

/// mean > 0.5 -> entailment, mean < -0.5 -> contradiction, else neutral.
inline AuxLabel aux_label(std::span<const int> partition) {
  if (partition.empty()) throw validation_error("aux_label(): empty partition");
  long long sum = 0;
  for (int x : partition) sum += x;
  const auto n = static_cast<long long>(partition.size());
  if (2 * sum > n) return AuxLabel::entailment;
  if (2 * sum < -n) return AuxLabel::contradiction;
  return AuxLabel::neutral;
}

/// r * loss_f + (1 - r) / 3 * (loss_e + loss_n + loss_c). Evaluated as
/// (1 - r) * sum / 3 so that r = 0 yields exactly the mean of the three.
inline double combine_loss(double r, double loss_f, double loss_e, double loss_n, double loss_c) {
  if (!(r >= 0.0 && r <= 1.0)) throw validation_error("combine_loss(): r must lie in [0, 1]");
  if (!(loss_f >= 0.0 && loss_e >= 0.0 && loss_n >= 0.0 && loss_c >= 0.0))
    throw validation_error("combine_loss(): losses must be non-negative");
  return r * loss_f + (1.0 - r) * (loss_e + loss_n + loss_c) / 3.0;
}

// ---------------------------------------------------------------------------
// Rule baseline

struct HeuristicDecision {
  FinerLabel label = FinerLabel::Disagreement;
  int rule = 0;  // 1..7, or 0 for the fallback
};

inline bool is_neg_raising_verb(std::string_view verb) {
  return verb == "know" || verb == "think" || verb == "believe";
}

/// Rules in priority order; the first that fires decides:
///   1 conditional                                   -> Disagreement
///   2 question, second person                       -> Neutral
///   3 question, non-second person                   -> Disagreement
///   4 negation, first person, know/think/believe    -> Contradiction
///   5 factive verb                                  -> Entailment
///   6 negation, non-factive verb                    -> Disagreement
///   7 modal, non-third person                       -> Entailment
/// Nothing fires -> Disagreement.
inline HeuristicDecision heuristic_decision(Environment env, Person person, std::string_view matrix_verb,
                                            bool factive) {
  if (env == Environment::conditional) return {FinerLabel::Disagreement, 1};
  if (env == Environment::question && person == Person::second) return {FinerLabel::Neutral, 2};
  if (env == Environment::question) return {FinerLabel::Disagreement, 3};
  if (env == Environment::negation && person == Person::first && is_neg_raising_verb(matrix_verb))
    return {FinerLabel::Contradiction, 4};
  if (factive) return {FinerLabel::Entailment, 5};
  if (env == Environment::negation) return {FinerLabel::Disagreement, 6};
  if (env == Environment::modal && person != Person::third) return {FinerLabel::Entailment, 7};
  return {FinerLabel::Disagreement, 0};
}

inline FinerLabel heuristic_label(Environment env, Person person, std::string_view matrix_verb, bool factive) {
  return heuristic_decision(env, person, matrix_verb, factive).label;
}

inline FinerLabel heuristic_label(const NliItem& item) {
  if (!item.factive)
    throw validation_error("item '" + item.id + "' has no factivity flag; supply one or a verb lexicon");
  return heuristic_label(item.environment, item.person, item.matrix_verb, *item.factive);
}

}  // namespace faqir
