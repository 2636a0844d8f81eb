// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero
// if any criterion fails. `--cough-dir DIR` enables the optional check on a
// user-supplied corpus (faq_bank.jsonl, queries.jsonl, annotations.jsonl,
// item_embeddings.jsonl, query_embeddings.jsonl).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

#include "cli_harness.hpp"
#include "faqir/bm25.hpp"
#include "faqir/corpus.hpp"
#include "faqir/fusion.hpp"
#include "faqir/metrics.hpp"
#include "faqir/nli_agree.hpp"
#include "faqir/qg_eval.hpp"
#include "faqir/qpp_tools.hpp"
#include "faqir/relevance.hpp"
#include "generators.hpp"
#include "nli_cases.hpp"
#include "oracles.hpp"

using namespace faqir;

namespace {

struct Outcome {
  enum { pass, fail, skip } status = pass;
  std::string detail;
};

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && first_failure_.empty()) first_failure_ = what;
    ok_ = ok_ && ok;
  }
  Outcome done(std::string detail) const {
    return ok_ ? Outcome{Outcome::pass, std::move(detail)} : Outcome{Outcome::fail, first_failure_};
  }

 private:
  bool ok_ = true;
  std::string first_failure_;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1e", v);
  return buf;
}

RankedList ranked_ids(const std::vector<std::string>& ids, const std::string& qid = "q") {
  std::vector<std::pair<std::string, double>> s;
  for (std::size_t i = 0; i < ids.size(); ++i) s.emplace_back(ids[i], static_cast<double>(ids.size() - i));
  return make_ranked_list(qid, "t", std::move(s), kUnlimited);
}

// ---------------------------------------------------------------------------

Outcome bm25_oracle() {
  Check c;
  gen::Source g(1001);
  double worst = 0.0;
  for (int corpus = 0; corpus < 100; ++corpus) {
    std::vector<std::pair<std::string, oracle::Doc>> docs;
    for (std::size_t i = 0; i < g.size(1, 50); ++i) docs.emplace_back("d" + std::to_string(i), g.words(0, 8, 20));
    const Bm25Params p{g.coin() ? 1.2 : g.real(0.0, 3.0), g.coin() ? 0.75 : g.real(0.0, 1.0)};
    const Bm25Index idx(docs, FieldMode::Qq, p);
    for (int q = 0; q < 5; ++q) {
      const auto query = g.words(1, 6, 25);
      const auto k = g.size(1, 60);
      const auto got = idx.search("q", join(query), k);
      const auto want = oracle::bm25(docs, query, p.k1, p.b, k);
      c.expect(got.entries.size() == want.size(), "result count differs");
      for (std::size_t i = 0; i < std::min(want.size(), got.entries.size()); ++i) {
        c.expect(got.entries[i].faq_id == want[i].id, "ordering differs");
        worst = std::max(worst, std::abs(got.entries[i].score - want[i].score));
      }
    }
  }
  c.expect(worst <= 1e-12, "score gap " + sci(worst) + " > 1e-12");
  return c.done("100 corpora x 5 queries, max |diff| " + sci(worst));
}

Outcome metric_oracle() {
  Check c;
  gen::Source g(1002);
  for (int round = 0; round < 200; ++round) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < 20; ++i) ids.push_back("d" + std::to_string(i));
    g.shuffle(ids);
    ids.resize(g.size(0, 20));
    std::set<std::string> rel;
    Qrels qrels;
    for (std::size_t i = 0; i < 20; ++i) {
      const auto id = "d" + std::to_string(i);
      const bool r = g.coin(0.3);
      if (r) rel.insert(id);
      if (r || g.coin(0.3)) qrels.set("q", id, r ? 1 : 0);
    }
    const auto run = ranked_ids(ids);
    c.expect(precision_at_k(run, qrels, 5) == oracle::precision_at(ids, rel, 5), "P@5 differs");
    c.expect(reciprocal_rank(run, qrels) == oracle::rr(ids, rel), "MRR differs");
    c.expect(average_precision(run, qrels, 100) == oracle::ap(ids, rel, 100), "AP@100 differs");
  }
  Qrels q;
  q.set("q", "a", 1);
  q.set("q", "b", 1);
  const double ap = average_precision(ranked_ids({"a", "x", "b"}), q, 100);
  c.expect(std::abs(ap - 0.8333) <= 1e-4 && std::abs(ap - 5.0 / 6.0) <= 1e-9, "worked AP = " + fmt(ap, 10));
  return c.done("200 pairs exact; worked AP " + fmt(ap));
}

Outcome combsum_affine() {
  // Scores are dyadic rationals and a, b integers, so a*s+b is exact and the
  // fused scores must not move by a single bit.
  Check c;
  gen::Source g(1003);
  for (int round = 0; round < 1000; ++round) {
    std::vector<RankedList> lists;
    for (int r = 0; r < 3; ++r) {
      std::vector<std::pair<std::string, double>> s;
      std::set<std::string> used;
      for (std::size_t i = 0; i < g.size(1, 10); ++i) {
        auto id = g.word(15);
        if (used.insert(id).second) s.emplace_back(id, g.integer(-512, 512) / 64.0);
      }
      lists.push_back(make_ranked_list("q", "r" + std::to_string(r), std::move(s), kUnlimited));
    }
    const auto base = combsum(lists);
    auto moved = lists;
    const double a = g.integer(1, 64), b = g.integer(-1000, 1000);
    for (auto& e : moved[g.size(0, 2)].entries) e.score = a * e.score + b;
    c.expect(combsum(moved) == base, "fused output changed under a*s+b");
  }
  return c.done("1000 inputs, bit-identical");
}

Outcome pool_construction() {
  Check c;
  std::vector<std::pair<std::string, double>> ten;
  for (int i = 0; i < 10; ++i) ten.emplace_back("f" + std::to_string(i), 10 - i);
  const std::vector<RankedList> same(4, make_ranked_list("q", "t", ten, kUnlimited));
  const auto identical = build_candidate_pool(same, 10).size();
  c.expect(identical == 10, "identical lists gave " + std::to_string(identical));

  std::vector<RankedList> disjoint;
  for (int r = 0; r < 4; ++r) {
    std::vector<std::pair<std::string, double>> s;
    for (int i = 0; i < 10; ++i) s.emplace_back("r" + std::to_string(r) + "_" + std::to_string(i), 10 - i);
    disjoint.push_back(make_ranked_list("q", "t", s, kUnlimited));
  }
  const auto apart = build_candidate_pool(disjoint, 10).size();
  c.expect(apart == 40, "disjoint lists gave " + std::to_string(apart));

  gen::Source g(1004);
  for (int round = 0; round < 1000; ++round) {
    std::vector<RankedList> lists;
    std::vector<std::vector<std::string>> ids;
    for (int r = 0; r < 4; ++r) {
      std::vector<std::string> pick;
      std::vector<std::string> vocab;
      for (int i = 0; i < 60; ++i) vocab.push_back("f" + std::to_string(i));
      g.shuffle(vocab);
      vocab.resize(g.size(10, 30));
      ids.push_back(vocab);
      lists.push_back(ranked_ids(vocab));
    }
    const auto pool = build_candidate_pool(lists, 10);
    const auto want = oracle::pool_union(ids, 10);
    c.expect(std::set<std::string>(pool.begin(), pool.end()) == want, "pool differs from set union");
    c.expect(pool.size() >= 10 && pool.size() <= 40, "pool size " + std::to_string(pool.size()) + " outside [10,40]");
  }
  return c.done("identical 10, disjoint 40, 1000 random pools match union");
}

Outcome relevance_aggregation() {
  Check c;
  std::size_t checked = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::vector<int> s(n, 1);
    for (;;) {
      const int sum = std::accumulate(s.begin(), s.end(), 0);
      c.expect(is_positive(s) == (sum > 3 * static_cast<int>(n)), "multiset mismatch");
      ++checked;
      std::size_t i = n;
      while (i > 0 && s[i - 1] == 4) --i;
      if (i == 0) break;
      ++s[i - 1];
      for (std::size_t j = i; j < n; ++j) s[j] = s[i - 1];
    }
  }
  std::vector<Query> qs;
  std::vector<AnnotationTuple> tuples;
  gen::Source g(1005);
  for (int i = 0; i < 1236; ++i) {
    const auto id = "q" + std::to_string(i);
    qs.push_back({id, "text", QueryForm::query_string, {}});
    for (int j = 0; j < 3; ++j) {
      std::vector<int> scores = g.ints(3, 1, 3);  // mean <= 3: never positive
      tuples.push_back({id, "f" + std::to_string(j), scores});
    }
    if (i >= 35) tuples.push_back({id, "fpos", {4, 4, 3}});
  }
  const auto kept = filter_unanswerable(qs, aggregate(tuples));
  c.expect(kept.answerable.size() == 1201, "retained " + std::to_string(kept.answerable.size()));
  c.expect(kept.removed_count == 35, "removed " + std::to_string(kept.removed_count));
  return c.done(std::to_string(checked) + " multisets; 1236 -> " + std::to_string(kept.answerable.size()));
}

Outcome nli_labeling() {
  Check c;
  using L = FinerLabel;
  using Ints = std::vector<int>;
  c.expect(finer_label(Ints(8, 3)) == L::Entailment, "all-3s");
  c.expect(finer_label(Ints{0, 0, 0, 0, 0, 0, 0, 1}) == L::Neutral, "7-of-8 zeros");
  c.expect(finer_label(Ints{3, 3, 2, 2, 1, 1, 0, -1}) == L::Disagreement, "mean 1.375 case");
  // mean exactly 1, variance 0.75, 5/8 in range: the mean clause must not fire
  c.expect(finer_label(Ints{2, 2, 2, 1, 1, 0, 0, 0}) == L::Disagreement, "mean = 1 boundary");
  c.expect(finer_label(Ints{2, 2, 2, 1, 1, 1, 0, 0}) == L::Entailment, "mean just above 1");
  // exactly 80% in range is enough; 70% is not
  c.expect(finer_label(Ints{3, 3, 3, 3, 3, 3, 3, 3, -3, -3}) == L::Entailment, "fraction 0.80 inclusive");
  c.expect(finer_label(Ints{3, 3, 3, 3, 3, 3, 3, -3, -3, -3}) == L::Disagreement, "fraction 0.70");
  c.expect(finer_label(Ints{0, 0, 0, 0, -3}) == L::Neutral, "neutral fraction 0.80 inclusive");

  gen::Source g(1006);
  for (int round = 0; round < 10000; ++round) {
    auto a = g.ints(g.size(1, 16), -3, 3);
    const auto l = finer_label(a);
    c.expect(l == L::Entailment || l == L::Neutral || l == L::Contradiction || l == L::Disagreement,
             "label outside the four classes");
    g.shuffle(a);
    c.expect(finer_label(a) == l, "permutation changed the label");
  }
  return c.done("3 worked examples, 5 boundaries, 10000 permutation/totality checks");
}

Outcome partitioning() {
  Check c;
  const auto p8 = partition(std::vector<int>{3, 3, 2, 2, 1, 1, 0, -1});
  c.expect(p8[0].size() == 3 && p8[1].size() == 2 && p8[2].size() == 3, "n=8 sizes");
  gen::Source g(1007);
  for (std::size_t n = 3; n <= 30; ++n) {
    for (int round = 0; round < 50; ++round) {
      const auto a = g.ints(n, -3, 3);
      const auto p = partition(a);
      std::vector<int> cat;
      for (const auto& part : p) cat.insert(cat.end(), part.begin(), part.end());
      auto sorted = a;
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      c.expect(cat == sorted, "slices do not concatenate to the sorted input");
      const auto [lo, hi] = std::minmax({p[0].size(), p[1].size(), p[2].size()});
      c.expect(hi - lo <= 1, "sizes differ by more than 1 at n=" + std::to_string(n));
    }
  }
  return c.done("n=8 -> (3,2,3); n in [3,30] balanced and contiguous");
}

Outcome loss_combiner() {
  Check c;
  gen::Source g(1008);
  double worst = 0.0;
  for (int round = 0; round < 5000; ++round) {
    double l[4], m[4];
    for (int i = 0; i < 4; ++i) l[i] = g.real(0, 10), m[i] = g.real(0, 10);
    c.expect(combine_loss(1.0, l[0], l[1], l[2], l[3]) == l[0], "r=1 identity");
    c.expect(combine_loss(0.0, l[0], l[1], l[2], l[3]) == (l[1] + l[2] + l[3]) / 3.0, "r=0 identity");
    const double r = g.real(0, 1);
    for (int arg = 0; arg < 4; ++arg) {
      // f(x + t*d) = f(x) + t*(f(x + d) - f(x)) along each coordinate
      const double t = g.real(0, 1);
      double x[4], xd[4], xt[4];
      for (int i = 0; i < 4; ++i) x[i] = xd[i] = xt[i] = l[i];
      xd[arg] += m[arg];
      xt[arg] += t * m[arg];
      const double f0 = combine_loss(r, x[0], x[1], x[2], x[3]);
      const double f1 = combine_loss(r, xd[0], xd[1], xd[2], xd[3]);
      const double ft = combine_loss(r, xt[0], xt[1], xt[2], xt[3]);
      worst = std::max(worst, std::abs(ft - (f0 + t * (f1 - f0))));
    }
  }
  c.expect(worst <= 1e-12, "linearity gap " + sci(worst));
  return c.done("identities exact; max linearity gap " + sci(worst));
}

Outcome heuristic_rules() {
  Check c;
  const auto table = cases::heuristic_table();
  for (const auto& t : table) {
    const auto d = heuristic_decision(t.env, t.person, t.verb, t.factive);
    c.expect(d.label == t.label && d.rule == t.rule,
             std::string(to_string(t.env)) + "/" + std::string(to_string(t.person)) + "/" + t.verb);
  }
  return c.done(std::to_string(table.size()) + " cases");
}

Outcome diversity_metrics() {
  Check c;
  using Corpus = std::vector<TokenSequence>;
  c.expect(distinct_n(Corpus{tokenize("a b c d e f")}, 3) == 1.0, "unique corpus distinct");
  c.expect(entropy_n(Corpus{tokenize("a a a a a")}, 2) == 0.0, "single-type entropy");
  for (int v = 1; v <= 50; ++v) {
    TokenSequence s;
    for (int i = 0; i < v; ++i) s.push_back("t" + std::to_string(i));
    c.expect(std::abs(entropy_n(Corpus{s}, 1) - std::log(static_cast<double>(v))) <= 1e-9, "uniform-V entropy");
  }
  const double h31 = entropy_n(Corpus{tokenize("a a a b")}, 1);
  c.expect(std::abs(h31 - 0.5623) <= 1e-4, "{3:1} entropy " + fmt(h31));
  const auto s = tokenize("how long does the virus survive on surfaces");
  c.expect(bleu_n(s, s) == 1.0, "BLEU identical");
  c.expect(rouge_l(s, s) == 1.0, "ROUGE-L identical");
  const TypeDistribution p{{"how", 0.5}, {"what", 0.5}}, q{{"how", 0.25}, {"what", 0.75}};
  c.expect(kl_divergence(p, p) == 0.0, "KL(p||p)");
  const double kl = kl_divergence(p, q, 1e-12);
  c.expect(std::abs(kl - 0.1438) <= 1e-3, "KL case " + fmt(kl));
  return c.done("Ent{3:1} " + fmt(h31) + ", KL " + fmt(kl));
}

Outcome qpp_tools() {
  Check c;
  std::vector<TokenSequence> qs;
  qs.push_back(tokenize("Has lasix been given"));
  while (qs.size() < 10000) qs.push_back(tokenize("What is the dose"));
  const auto set = build_phrase_sets(qs, 3, 0.0002);
  c.expect(!set.contains({"has", "lasix"}), "\"has lasix\" kept at 0.01%");
  c.expect(match_leading_phrase(qs[0], set) == Ngram{"has"}, "\"has lasix\" did not degrade to \"has\"");

  c.expect(merge_and_drop({{0, 4}}, 100, 3, 3) == std::vector<Span>{{0, 4}}, "span (0,4)");
  c.expect(merge_and_drop({{10, 11}, {14, 20}}, 100, 3, 3) == std::vector<Span>{{10, 20}}, "spans (10,11)+(14,20)");
  c.expect(merge_and_drop({{10, 11}}, 100, 3, 3).empty(), "span (10,11) alone");

  std::vector<Stratum> strata;
  for (const auto& [name, ratio] : std::vector<std::pair<std::string, double>>{{"a", 1}, {"b", 3}, {"c", 6}}) {
    Stratum st{name, {}, ratio};
    for (int i = 0; i < 200; ++i) st.items.push_back(name + std::to_string(i));
    strata.push_back(std::move(st));
  }
  c.expect(stratum_quotas(strata, 100) == std::vector<std::size_t>{10, 30, 60}, "quotas not 10/30/60");
  const auto s1 = stratified_sample(strata, 100, 42);
  c.expect(s1 == stratified_sample(strata, 100, 42), "sampling not seed-deterministic");
  c.expect(s1.size() == 100, "sample size");
  return c.done("degradation, 3 span cases, quotas 10/30/60, seeded");
}

Outcome splits() {
  Check c;
  std::vector<std::string> ids;
  for (int i = 0; i < 1200; ++i) ids.push_back("item" + std::to_string(i));
  const auto a = split_dataset(ids, {7, 1, 2}, 17);
  const auto b = split_dataset(ids, {7, 1, 2}, 17);
  std::array<std::size_t, 3> n{};
  for (const auto& s : a) ++n[static_cast<std::size_t>(s.split)];
  c.expect(n == std::array<std::size_t, 3>{840, 120, 240}, "sizes " + std::to_string(n[0]) + "/" +
                                                               std::to_string(n[1]) + "/" + std::to_string(n[2]));
  c.expect(a == b, "not seed-stable");
  return c.done(std::to_string(n[0]) + "/" + std::to_string(n[1]) + "/" + std::to_string(n[2]) + ", stable");
}

Outcome end_to_end() {
  Check c;
  harness::TempDir first, second;
  const auto x = harness::run_pipeline(FAQIR_TEST_DATA, first);
  const auto y = harness::run_pipeline(FAQIR_TEST_DATA, second);
  c.expect(x.ok, x.failure);
  c.expect(y.ok, y.failure);
  c.expect(x.files == y.files && x.stdout_of == y.stdout_of, "outputs differ between runs");
  std::string eval = x.ok ? x.stdout_of.at("eval") : "";
  for (auto& ch : eval)
    if (ch == '\n') ch = ' ';
  return c.done(std::to_string(x.files.size()) + " files byte-identical; fixture " + eval);
}

Outcome cough(const std::string& dir) {
  if (dir.empty()) return {Outcome::skip, "no --cough-dir given"};
  harness::TempDir work;
  auto step = [&](std::vector<std::string> args) {
    const auto r = harness::run(std::move(args));
    if (r.code != 0) throw std::runtime_error(r.err);
    return r.out;
  };
  try {
    step({"index", "--bank", dir + "/faq_bank.jsonl", "--mode", "qqa", "--out", work / "idx"});
    step({"search", "--index", work / "idx", "--queries", dir + "/queries.jsonl", "--out", work / "bm25"});
    step({"dense-search", "--embeddings", dir + "/item_embeddings.jsonl", "--query-embeddings",
          dir + "/query_embeddings.jsonl", "--out", work / "dense"});
    step({"fuse", "--runs", work / "bm25", work / "dense", "--out", work / "fused"});
    step({"aggregate", "--annotations", dir + "/annotations.jsonl", "--queries", dir + "/queries.jsonl",
          "--out-qrels", work / "qrels"});
    auto out = step({"eval-retrieval", "--run", work / "fused", "--qrels", work / "qrels"});
    for (auto& ch : out)
      if (ch == '\n') ch = ' ';
    return {Outcome::pass, out};
  } catch (const std::exception& e) {
    return {Outcome::fail, e.what()};
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::string cough_dir;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cough-dir" && i + 1 < argc) cough_dir = argv[++i];
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"bm25-oracle-equivalence", bm25_oracle},
      {"metric-oracle-equivalence", metric_oracle},
      {"combsum-affine-invariance", combsum_affine},
      {"pool-construction", pool_construction},
      {"relevance-aggregation", relevance_aggregation},
      {"nli-labeling", nli_labeling},
      {"partitioning", partitioning},
      {"loss-combiner", loss_combiner},
      {"heuristic-rules", heuristic_rules},
      {"diversity-metrics", diversity_metrics},
      {"qpp-tools", qpp_tools},
      {"splits", splits},
      {"end-to-end-determinism", end_to_end},
      {"cough-pipeline (optional)", [&] { return cough(cough_dir); }},
  };

  const auto start = std::chrono::steady_clock::now();
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {Outcome::fail, std::string("threw: ") + e.what()};
    }
    const char* tag = o.status == Outcome::pass ? "PASS" : o.status == Outcome::skip ? "SKIP" : "FAIL";
    failures += o.status == Outcome::fail;
    std::cout << tag << "  " << name << "  " << o.detail << '\n';
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << "(" << failures << " failing, " << fmt(secs, 2) << " s)\n";
  return failures ? 1 : 0;
}
