#include <gtest/gtest.h>

#include <sstream>

#include "faqir/qpp_tools.hpp"
#include "generators.hpp"

using namespace faqir;
using Corpus = std::vector<TokenSequence>;

namespace {

Corpus corpus_with(std::size_t total, const std::vector<std::pair<std::string, std::size_t>>& planted) {
  Corpus c;
  for (const auto& [text, count] : planted)
    for (std::size_t i = 0; i < count; ++i) c.push_back(tokenize(text));
  while (c.size() < total) c.push_back(tokenize("what is the dose"));
  return c;
}

}  // namespace

TEST(PhraseSets, RareBigramDegrades) {
  const auto c = corpus_with(10000, {{"has lasix been given", 1}, {"has the patient eaten", 5}});
  const auto set = build_phrase_sets(c, 3, 0.0002);
  EXPECT_FALSE(set.contains({"has", "lasix"}));
  EXPECT_TRUE(set.contains({"has", "the"}));  // 5 / 10000 = 0.05% > 0.02%
  EXPECT_TRUE(set.contains({"has"}));
  EXPECT_EQ(set.degraded.at(2).at("has"), 1u);
  EXPECT_EQ(match_leading_phrase(tokenize("has lasix been given"), set), Ngram{"has"});
  EXPECT_EQ(match_leading_phrase(tokenize("has the patient eaten"), set), (Ngram{"has", "the", "patient"}));
}

TEST(PhraseSets, AllLeadingUnigramsKept) {
  const auto c = corpus_with(20000, {{"why", 1}, {"zebra crossing", 1}});
  const auto set = build_phrase_sets(c, 3, 0.5);
  EXPECT_TRUE(set.contains({"why"}));
  EXPECT_TRUE(set.contains({"zebra"}));
  EXPECT_TRUE(set.contains({"what"}));
}

TEST(PhraseSets, Errors) {
  EXPECT_THROW(build_phrase_sets(Corpus{}, 3, 0.1), validation_error);
  EXPECT_THROW(build_phrase_sets(Corpus{{"a"}}, 0, 0.1), validation_error);
  EXPECT_THROW(build_phrase_sets(Corpus{{"a"}}, 2, -0.1), validation_error);
  EXPECT_THROW(build_phrase_sets(Corpus{{"a"}, {}}, 2, 0.1), validation_error);
}

TEST(PhraseSets, PropertyArityAndCoverage) {
  gen::Source g(51);
  for (int round = 0; round < 300; ++round) {
    Corpus c;
    for (std::size_t i = 0; i < g.size(1, 60); ++i) c.push_back(g.words(1, 5, 4));
    const auto n_max = g.size(1, 4);
    const auto set = build_phrase_sets(c, n_max, g.real(0, 0.2));
    for (const auto& [n, phrases] : set.phrases) {
      EXPECT_LE(n, n_max);
      for (const auto& p : phrases) EXPECT_EQ(p.size(), n);
    }
    for (const auto& q : c) {
      const auto m = match_leading_phrase(q, set);
      ASSERT_FALSE(m.empty());
      EXPECT_TRUE(std::equal(m.begin(), m.end(), q.begin()));
    }
    std::stringstream ss;
    write_phrase_set(ss, set);
    EXPECT_EQ(read_phrase_set(ss), set);
  }
}

TEST(PhraseSets, ReadRejectsMalformed) {
  std::istringstream arity("2\thow\t3\n");
  EXPECT_THROW(read_phrase_set(arity), validation_error);
  std::istringstream fields("1\thow\n");
  EXPECT_THROW(read_phrase_set(fields), validation_error);
  std::istringstream count("1\thow\tmany\n");
  EXPECT_THROW(read_phrase_set(count), validation_error);
}

TEST(MergeAndDrop, WorkedCases) {
  EXPECT_EQ(merge_and_drop({{0, 4}}, 100, 3, 3), (std::vector<Span>{{0, 4}}));
  EXPECT_EQ(merge_and_drop({{10, 11}, {14, 20}}, 100, 3, 3), (std::vector<Span>{{10, 20}}));
  EXPECT_EQ(merge_and_drop({{10, 11}}, 100, 3, 3), (std::vector<Span>{}));
}

TEST(MergeAndDrop, MoreCases) {
  // gap exactly gamma: no merge
  EXPECT_EQ(merge_and_drop({{10, 11}, {15, 20}}, 100, 3, 3), (std::vector<Span>{{15, 20}}));
  // short span merges into the kept span on its left
  EXPECT_EQ(merge_and_drop({{0, 5}, {7, 8}}, 100, 3, 3), (std::vector<Span>{{0, 8}}));
  // equal gaps: left wins
  EXPECT_EQ(merge_and_drop({{0, 5}, {7, 8}, {10, 20}}, 100, 3, 3), (std::vector<Span>{{0, 8}, {10, 20}}));
  // chain of short spans merged rightwards until long enough
  EXPECT_EQ(merge_and_drop({{0, 0}, {2, 2}, {4, 4}, {6, 6}}, 100, 3, 3), (std::vector<Span>{{0, 6}}));
  EXPECT_EQ(merge_and_drop({}, 100, 3, 3), (std::vector<Span>{}));
}

TEST(MergeAndDrop, Errors) {
  EXPECT_THROW(merge_and_drop({{5, 4}}, 100, 3, 3), validation_error);
  EXPECT_THROW(merge_and_drop({{0, 4}, {3, 8}}, 100, 3, 3), validation_error);
  EXPECT_THROW(merge_and_drop({{6, 8}, {0, 4}}, 100, 3, 3), validation_error);
  EXPECT_THROW(merge_and_drop({{0, 10}}, 5, 3, 3), validation_error);
}

TEST(MergeAndDrop, PropertySortedDisjointLongAndStable) {
  gen::Source g(52);
  for (int round = 0; round < 2000; ++round) {
    std::vector<Span> spans;
    std::size_t pos = g.size(0, 3);
    for (std::size_t i = 0; i < g.size(0, 8); ++i) {
      const auto len = g.size(1, 6);
      spans.push_back({pos, pos + len - 1});
      pos += len + g.size(0, 5);
    }
    const auto eta = g.size(0, 5), gamma = g.size(0, 5);
    const auto out = merge_and_drop(spans, pos + 1, eta, gamma);
    for (std::size_t i = 0; i < out.size(); ++i) {
      EXPECT_GT(out[i].length(), eta);
      if (i) {
        EXPECT_GT(out[i].start, out[i - 1].end);
      }
      // every output span is covered by the union of inputs plus small gaps
      bool starts_at_input = false, ends_at_input = false;
      for (const auto& s : spans) starts_at_input |= s.start == out[i].start, ends_at_input |= s.end == out[i].end;
      EXPECT_TRUE(starts_at_input && ends_at_input);
    }
    EXPECT_EQ(merge_and_drop(out, pos + 1, eta, gamma), out);
  }
}

TEST(SpanFiles, RoundTrip) {
  const std::vector<std::vector<Span>> docs{{{0, 4}, {6, 7}}, {}, {{3, 3}}};
  std::stringstream ss;
  write_span_documents(ss, docs);
  // an empty document in the middle collapses (blank lines only separate)
  const auto back = read_span_documents(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], docs[0]);
  EXPECT_EQ(back[1], docs[2]);
  std::istringstream bad("1\n");
  EXPECT_THROW(read_span_documents(bad), validation_error);
}

namespace {

std::vector<Stratum> pools(std::vector<std::size_t> sizes, std::vector<double> ratios) {
  std::vector<Stratum> out;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    Stratum st{"s" + std::to_string(s), {}, ratios[s]};
    for (std::size_t i = 0; i < sizes[s]; ++i) st.items.push_back("s" + std::to_string(s) + "_" + std::to_string(i));
    out.push_back(std::move(st));
  }
  return out;
}

std::map<std::string, std::size_t> per_stratum(const std::vector<SampledItem>& s) {
  std::map<std::string, std::size_t> out;
  for (const auto& x : s) ++out[x.stratum];
  return out;
}

}  // namespace

TEST(StratifiedSample, Examples) {
  const auto p = pools({500, 500, 500}, {1, 3, 6});
  EXPECT_EQ(stratum_quotas(p, 100), (std::vector<std::size_t>{10, 30, 60}));
  const auto a = stratified_sample(p, 100, 9);
  EXPECT_EQ(per_stratum(a), (std::map<std::string, std::size_t>{{"s0", 10}, {"s1", 30}, {"s2", 60}}));
  EXPECT_EQ(a, stratified_sample(p, 100, 9));
  EXPECT_NE(a, stratified_sample(p, 100, 10));

  const auto one = pools({20}, {0.3});
  EXPECT_EQ(stratified_sample(one, 7, 1).size(), 7u);

  const auto capped = pools({5, 500, 500}, {1, 3, 6});
  const auto q = stratum_quotas(capped, 100);
  EXPECT_EQ(q[0], 5u);
  EXPECT_EQ(q[0] + q[1] + q[2], 100u);
  EXPECT_EQ(q, (std::vector<std::size_t>{5, 32, 63}));  // 95 over 3:6 -> 31.67, 63.33
}

TEST(StratifiedSample, Errors) {
  EXPECT_THROW(stratified_sample(pools({3, 3}, {1, 1}), 7, 1), validation_error);
  EXPECT_THROW(stratified_sample(pools({3, 3}, {1, 0}), 2, 1), validation_error);
  EXPECT_THROW(stratified_sample(pools({3}, {1}), 0, 1), validation_error);
  EXPECT_THROW(stratified_sample({}, 1, 1), validation_error);
  auto dup = pools({2, 2}, {1, 1});
  dup[1].items[0] = dup[0].items[0];
  EXPECT_THROW(stratified_sample(dup, 2, 1), validation_error);
}

TEST(StratifiedSample, PropertyExactSizeNoDuplicates) {
  gen::Source g(53);
  for (int round = 0; round < 500; ++round) {
    std::vector<std::size_t> sizes(g.size(1, 4));
    std::vector<double> ratios(sizes.size());
    std::size_t avail = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      avail += sizes[i] = g.size(0, 30);
      ratios[i] = g.real(0.1, 6);
    }
    if (avail == 0) continue;
    const auto total = g.size(1, avail);
    const auto p = pools(sizes, ratios);
    const auto s = stratified_sample(p, total, round);
    EXPECT_EQ(s.size(), total);
    std::set<std::string> uniq;
    for (const auto& x : s) uniq.insert(x.item);
    EXPECT_EQ(uniq.size(), total);
    const auto q = stratum_quotas(p, total);
    const auto counts = per_stratum(s);
    for (std::size_t i = 0; i < p.size(); ++i) {
      EXPECT_LE(q[i], sizes[i]);
      EXPECT_EQ(counts.contains(p[i].name) ? counts.at(p[i].name) : 0, q[i]);
    }
  }
}
