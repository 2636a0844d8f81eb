#pragma once

// Question-phrase preparation, evidence-span cleanup, and the stratified
// dev-set sampler.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "faqir/error.hpp"
#include "faqir/rng.hpp"
#include "faqir/text.hpp"

namespace faqir {

// ---------------------------------------------------------------------------
// Question phrases

/// Leading-n-gram inventory. phrases[n] holds the kept phrases of exactly n
/// tokens; phrases[1] is every observed leading unigram. A question whose
/// leading n-gram (n >= 2) is too rare falls back to its leading unigram,
/// tallied in degraded[n].
struct PhraseSet {
  std::size_t n_max = 1;
  std::size_t total_questions = 0;
  std::map<std::size_t, std::set<Ngram>> phrases;
  std::map<Ngram, std::size_t> frequencies;
  std::map<std::size_t, std::map<std::string, std::size_t>> degraded;

  bool contains(const Ngram& phrase) const {
    auto it = phrases.find(phrase.size());
    return it != phrases.end() && it->second.contains(phrase);
  }

  friend bool operator==(const PhraseSet&, const PhraseSet&) = default;
};

/// Longest phrase of the set that is a prefix of `question`; empty if none.
inline Ngram match_leading_phrase(std::span<const std::string> question, const PhraseSet& set) {
  for (auto it = set.phrases.rbegin(); it != set.phrases.rend(); ++it) {
    const auto n = it->first;
    if (n == 0 || n > question.size()) continue;
    Ngram prefix(question.begin(), question.begin() + static_cast<std::ptrdiff_t>(n));
    if (it->second.contains(prefix)) return prefix;
  }
  return {};
}

/// Keeps a leading n-gram (n >= 2) iff count / total_questions > zeta.
inline PhraseSet build_phrase_sets(std::span<const TokenSequence> questions, std::size_t n_max,
                                   double zeta) {
  if (questions.empty()) throw validation_error("build_phrase_sets(): empty corpus");
  if (n_max == 0) throw validation_error("build_phrase_sets(): n_max must be at least 1");
  if (!(zeta >= 0.0)) throw validation_error("build_phrase_sets(): zeta must be non-negative");
  for (std::size_t i = 0; i < questions.size(); ++i)
    if (questions[i].empty())
      throw validation_error("build_phrase_sets(): question " + std::to_string(i + 1) + " has no tokens");

  PhraseSet set;
  set.n_max = n_max;
  set.total_questions = questions.size();
  const auto total = static_cast<double>(questions.size());

  std::map<std::size_t, std::map<Ngram, std::size_t>> counts;
  for (const auto& q : questions)
    for (std::size_t n = 1; n <= std::min(n_max, q.size()); ++n)
      ++counts[n][Ngram(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(n))];

  for (const auto& [n, table] : counts) {
    for (const auto& [phrase, count] : table) {
      if (n == 1 || static_cast<double>(count) / total > zeta) {
        set.phrases[n].insert(phrase);
        set.frequencies[phrase] = count;
      } else {
        set.degraded[n][phrase.front()] += count;
      }
    }
  }
  return set;
}

/// "n<TAB>phrase<TAB>count" per kept phrase; degraded unigrams are written
/// under their level with a trailing '*'. A leading '#' line carries the
/// corpus size and n_max.
inline void write_phrase_set(std::ostream& out, const PhraseSet& set) {
  out << "#\ttotal_questions\t" << set.total_questions << "\tn_max\t" << set.n_max << '\n';
  for (std::size_t n = 1; n <= set.n_max; ++n) {
    if (auto it = set.phrases.find(n); it != set.phrases.end())
      for (const auto& phrase : it->second)
        out << n << '\t' << join(phrase) << '\t' << set.frequencies.at(phrase) << '\n';
    if (auto it = set.degraded.find(n); it != set.degraded.end())
      for (const auto& [unigram, count] : it->second)
        out << n << '\t' << unigram << "*\t" << count << '\n';
  }
}

inline PhraseSet read_phrase_set(std::istream& in) {
  PhraseSet set;
  std::size_t max_seen = 0;
  bool have_header = false;
  std::string line;
  std::size_t lineno = 0;
  auto to_size = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw validation_error(detail::at_line(lineno, "expected a non-negative integer, got '" + s + "'"));
    }
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ss(line);
    for (std::string f; std::getline(ss, f, '\t');) fields.push_back(f);
    if (fields[0] == "#") {
      for (std::size_t i = 1; i + 1 < fields.size(); i += 2) {
        if (fields[i] == "total_questions") set.total_questions = to_size(fields[i + 1]);
        if (fields[i] == "n_max") set.n_max = to_size(fields[i + 1]);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 3) throw validation_error(detail::at_line(lineno, "expected n<TAB>phrase<TAB>count"));
    const auto n = to_size(fields[0]);
    const auto count = to_size(fields[2]);
    std::string text = fields[1];
    const bool is_degraded = !text.empty() && text.back() == '*';
    if (is_degraded) text.pop_back();
    Ngram phrase = tokenize(text);
    if (phrase.empty() || n == 0) throw validation_error(detail::at_line(lineno, "empty phrase"));
    if (is_degraded) {
      if (phrase.size() != 1) throw validation_error(detail::at_line(lineno, "degraded phrase must be a unigram"));
      set.degraded[n][phrase.front()] += count;
    } else {
      if (phrase.size() != n)
        throw validation_error(detail::at_line(lineno, "phrase arity does not match n=" + std::to_string(n)));
      set.phrases[n].insert(phrase);
      set.frequencies[phrase] = count;
    }
    max_seen = std::max(max_seen, n);
  }
  if (!have_header) set.n_max = std::max<std::size_t>(max_seen, 1);
  return set;
}

// ---------------------------------------------------------------------------
// Merge-and-drop over extracted spans

struct Span {
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // inclusive

  std::size_t length() const { return end - start + 1; }
  friend bool operator==(const Span&, const Span&) = default;
};

inline void validate_spans(std::span<const Span> spans, std::size_t token_count) {
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (spans[i].start > spans[i].end) throw validation_error("span with start > end");
    if (spans[i].end >= token_count) throw validation_error("span outside the token range");
    if (i > 0 && spans[i].start <= spans[i - 1].end)
      throw validation_error("spans overlap or are not sorted by start");
  }
}

/// Left to right: a span longer than `eta` tokens is kept. A shorter span is
/// merged with the nearest remaining span (kept ones to its left, unprocessed
/// ones to its right) when fewer than `gamma` tokens lie strictly between
/// them, and the merged span is re-evaluated; otherwise it is dropped. On
/// equal gaps the left neighbour wins.
inline std::vector<Span> merge_and_drop(std::vector<Span> spans, std::size_t token_count,
                                        std::size_t eta, std::size_t gamma) {
  validate_spans(spans, token_count);
  std::vector<Span> kept;
  std::size_t i = 0;
  while (i < spans.size()) {
    const Span s = spans[i];
    if (s.length() > eta) {
      kept.push_back(s);
      ++i;
      continue;
    }
    constexpr auto none = std::numeric_limits<std::size_t>::max();
    const std::size_t left_gap = kept.empty() ? none : s.start - kept.back().end - 1;
    const std::size_t right_gap = i + 1 < spans.size() ? spans[i + 1].start - s.end - 1 : none;
    if (left_gap != none && left_gap <= right_gap && left_gap < gamma) {
      kept.back().end = s.end;  // merged span is longer than the kept one, so it stays kept
      ++i;
    } else if (right_gap != none && right_gap < left_gap && right_gap < gamma) {
      spans[i + 1].start = s.start;  // re-evaluated on the next iteration
      ++i;
    } else {
      ++i;  // dropped
    }
  }
  return kept;
}

/// Documents separated by blank lines; one "start<TAB>end" per line.
inline std::vector<std::vector<Span>> read_span_documents(std::istream& in) {
  std::vector<std::vector<Span>> docs;
  std::vector<Span> current;
  bool open = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) {
      if (open) docs.push_back(std::move(current));
      current.clear();
      open = false;
      continue;
    }
    std::istringstream ss(line);
    long long start = -1, end = -1;
    std::string extra;
    if (!(ss >> start >> end) || (ss >> extra) || start < 0 || end < 0)
      throw validation_error(detail::at_line(lineno, "expected start<TAB>end"));
    current.push_back({static_cast<std::size_t>(start), static_cast<std::size_t>(end)});
    open = true;
  }
  if (open) docs.push_back(std::move(current));
  return docs;
}

inline void write_span_documents(std::ostream& out, const std::vector<std::vector<Span>>& docs) {
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (d) out << '\n';
    for (const auto& s : docs[d]) out << s.start << '\t' << s.end << '\n';
  }
}

// ---------------------------------------------------------------------------
// Stratified sampling

struct Stratum {
  std::string name;
  std::vector<std::string> items;
  double ratio = 1.0;
};

struct SampledItem {
  std::string stratum;
  std::string item;

  friend bool operator==(const SampledItem&, const SampledItem&) = default;
};

/// Largest-remainder quotas over the ratios, capped at pool size; the deficit
/// of capped strata is re-apportioned over the rest until nothing exceeds its
/// pool.
inline std::vector<std::size_t> stratum_quotas(std::span<const Stratum> strata, std::size_t total) {
  if (strata.empty()) throw validation_error("stratified_sample(): no strata");
  std::size_t available = 0;
  for (const auto& s : strata) {
    if (!(s.ratio > 0.0)) throw validation_error("stratum '" + s.name + "' needs a positive ratio");
    available += s.items.size();
  }
  if (total > available)
    throw validation_error("requested " + std::to_string(total) + " items but pools hold " +
                           std::to_string(available));

  std::vector<std::size_t> quota(strata.size(), 0);
  std::vector<bool> capped(strata.size(), false);
  for (;;) {
    std::size_t remaining = total;
    std::vector<std::size_t> open;
    std::vector<double> weights;
    for (std::size_t i = 0; i < strata.size(); ++i) {
      if (capped[i]) {
        remaining -= quota[i];
      } else {
        open.push_back(i);
        weights.push_back(strata[i].ratio);
      }
    }
    const auto seats = apportion(remaining, weights);
    bool changed = false;
    for (std::size_t k = 0; k < open.size(); ++k) {
      const auto i = open[k];
      quota[i] = seats[k];
      if (quota[i] > strata[i].items.size()) {
        quota[i] = strata[i].items.size();
        capped[i] = true;
        changed = true;
      }
    }
    if (!changed) return quota;
  }
}

/// Seeded sampling without replacement inside each stratum (partial
/// Fisher-Yates, strata in order, one generator). Selected items keep their
/// pool order.
inline std::vector<SampledItem> stratified_sample(std::span<const Stratum> strata, std::size_t total,
                                                  std::uint64_t seed) {
  if (total == 0) throw validation_error("stratified_sample(): total must be at least 1");
  std::unordered_set<std::string> seen;
  for (const auto& s : strata)
    for (const auto& item : s.items)
      if (!seen.insert(item).second) throw validation_error("item '" + item + "' appears twice in the pools");

  const auto quota = stratum_quotas(strata, total);
  Xoshiro256 rng(seed);
  std::vector<SampledItem> out;
  out.reserve(total);
  for (std::size_t s = 0; s < strata.size(); ++s) {
    const auto n = strata[s].items.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < quota[s]; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.bounded(n - i));
      std::swap(idx[i], idx[j]);
    }
    std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(quota[s]));
    for (std::size_t i = 0; i < quota[s]; ++i) out.push_back({strata[s].name, strata[s].items[idx[i]]});
  }
  return out;
}

}  // namespace faqir
