#pragma once

// Command-line front end. run() is the whole program minus main(), so tests
// can drive every subcommand in-process.
//
// Exit status: 0 success, 1 validation error (bad flags or input), 2 I/O
// error, 3 internal invariant violation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "faqir/bm25.hpp"
#include "faqir/corpus.hpp"
#include "faqir/dense.hpp"
#include "faqir/fusion.hpp"
#include "faqir/metrics.hpp"
#include "faqir/nli_agree.hpp"
#include "faqir/qg_eval.hpp"
#include "faqir/qpp_tools.hpp"
#include "faqir/ranking.hpp"
#include "faqir/relevance.hpp"
#include "faqir/text.hpp"

namespace faqir::cli {

enum ExitStatus : int { kOk = 0, kValidation = 1, kIo = 2, kInternal = 3 };

namespace detail {

using faqir::detail::check_written;
using faqir::detail::open_input;
using faqir::detail::open_output;

inline std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

inline void report_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

/// Non-blank lines with trailing CR removed.
inline std::vector<std::string> read_lines(const std::string& path) {
  auto in = open_input(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) lines.push_back(line);
  }
  if (in.bad()) throw io_error("read failure on '" + path + "'");
  return lines;
}

/// "a:b:c" -> {a, b, c}
inline std::vector<double> parse_ratios(const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  for (std::string part; std::getline(ss, part, ':');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw validation_error("bad ratio list '" + text + "'");
    }
    if (!(out.back() >= 0.0)) throw validation_error("ratios must be non-negative");
  }
  if (out.empty()) throw validation_error("empty ratio list");
  return out;
}

/// Lines "group<TAB>text"; a line without a tab is its own group, named by
/// its 1-based position.
inline std::vector<std::pair<std::string, std::string>> read_grouped_texts(const std::string& path) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto tab = lines[i].find('\t');
    if (tab == std::string::npos)
      out.emplace_back(std::to_string(i + 1), lines[i]);
    else
      out.emplace_back(lines[i].substr(0, tab), lines[i].substr(tab + 1));
  }
  return out;
}

/// Two tab-separated columns per line.
inline std::vector<std::pair<std::string, std::string>> read_pairs(const std::string& path) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t lineno = 0;
  for (const auto& line : read_lines(path)) {
    ++lineno;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw validation_error(path + ": expected two tab-separated columns: '" + line + "'");
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

inline Run load_run(const std::string& path) {
  auto in = open_input(path);
  try {
    return read_run(in);
  } catch (const validation_error& e) {
    throw validation_error(path + ": " + e.what());
  }
}

inline Vector encode_or_zero(const std::string& text, std::size_t dim) {
  const auto tokens = tokenize(text);
  if (tokens.empty()) return Vector(dim, 0.0);
  try {
    return hash_encode(tokens, dim);
  } catch (const validation_error&) {
    return Vector(dim, 0.0);
  }
}

inline std::map<std::string, FinerLabel> read_label_file(const std::string& path) {
  std::map<std::string, FinerLabel> out;
  for (const auto& [id, text] : read_pairs(path)) {
    auto label = parse_finer_label(text);
    if (!label) throw validation_error(path + ": unknown label '" + text + "'");
    if (!out.emplace(id, *label).second) throw validation_error(path + ": duplicate id '" + id + "'");
  }
  return out;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using namespace detail;

  CLI::App app{"FAQ retrieval and evaluation toolkit", "faqir"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  // index
  std::string bank_path, index_out, mode_name;
  Bm25Params params;
  TokenizeOptions tok;
  auto* index_cmd = app.add_subcommand("index", "Build a BM25 index over an FAQ bank");
  index_cmd->add_option("--bank", bank_path, "FAQ bank (JSON lines)")->required();
  index_cmd->add_option("--mode", mode_name, "Field mode")->required()->check(CLI::IsMember({"qq", "qa", "qqa"}));
  index_cmd->add_option("--k1", params.k1, "BM25 k1")->capture_default_str();
  index_cmd->add_option("--b", params.b, "BM25 b")->capture_default_str();
  index_cmd->add_flag("--stem", tok.stem, "Strip plural suffixes");
  index_cmd->add_flag("--stopwords", tok.remove_stopwords, "Drop English stopwords");
  index_cmd->add_option("--out", index_out, "Output index file")->required();

  // search
  std::string index_path, queries_path, run_out, tag = "bm25";
  std::size_t k = 100;
  auto* search_cmd = app.add_subcommand("search", "Run BM25 retrieval for a query file");
  search_cmd->add_option("--index", index_path)->required();
  search_cmd->add_option("--queries", queries_path)->required();
  search_cmd->add_option("--k", k)->capture_default_str();
  search_cmd->add_option("--tag", tag)->capture_default_str();
  search_cmd->add_option("--out", run_out)->required();

  // dense-search
  std::string emb_path, qemb_path, field = "q", dense_tag = "dense";
  std::size_t hash_dim = 0;
  auto* dense_cmd = app.add_subcommand("dense-search", "Cosine retrieval over embeddings or hashed text");
  dense_cmd->add_option("--embeddings", emb_path, "Item embeddings (JSON lines)");
  dense_cmd->add_option("--query-embeddings", qemb_path, "Query embeddings (JSON lines)");
  dense_cmd->add_option("--hash-dim", hash_dim, "Use the hashed encoder with this dimension");
  dense_cmd->add_option("--bank", bank_path, "FAQ bank (with --hash-dim)");
  dense_cmd->add_option("--queries", queries_path, "Queries (with --hash-dim)");
  dense_cmd->add_option("--field", field, "Item field to encode (with --hash-dim)")
      ->check(CLI::IsMember({"q", "a"}))
      ->capture_default_str();
  dense_cmd->add_option("--k", k)->capture_default_str();
  dense_cmd->add_option("--tag", dense_tag)->capture_default_str();
  dense_cmd->add_option("--out", run_out)->required();

  // fuse
  std::vector<std::string> run_paths;
  auto* fuse_cmd = app.add_subcommand("fuse", "CombSum fusion of run files");
  fuse_cmd->add_option("--runs", run_paths)->required()->expected(2, -1);
  fuse_cmd->add_option("--k", k)->capture_default_str();
  fuse_cmd->add_option("--out", run_out)->required();

  // pool
  std::size_t per_list_k = 10;
  std::string pool_out;
  auto* pool_cmd = app.add_subcommand("pool", "Candidate pools: union of each run's top-k");
  pool_cmd->add_option("--runs", run_paths)->required()->expected(1, -1);
  pool_cmd->add_option("--per-list-k", per_list_k)->capture_default_str();
  pool_cmd->add_option("--out", pool_out)->required();

  // aggregate
  std::string annotations_path, qrels_out;
  auto* agg_cmd = app.add_subcommand("aggregate", "Annotations to qrels; drops unanswerable queries");
  agg_cmd->add_option("--annotations", annotations_path)->required();
  agg_cmd->add_option("--queries", queries_path)->required();
  agg_cmd->add_option("--out-qrels", qrels_out)->required();

  // eval-retrieval
  std::string run_path, qrels_path;
  std::size_t map_cutoff = 100;
  auto* evalr_cmd = app.add_subcommand("eval-retrieval", "MAP, MRR and P@5 of a run");
  evalr_cmd->add_option("--run", run_path)->required();
  evalr_cmd->add_option("--qrels", qrels_path)->required();
  evalr_cmd->add_option("--map-cutoff", map_cutoff)->capture_default_str();

  // eval-diversity
  std::string corpus_path, reference_path;
  std::vector<std::size_t> orders{3, 4};
  auto* evald_cmd = app.add_subcommand("eval-diversity", "Distinct-n, Entropy-n, top-1 BLEU/ROUGE-L");
  evald_cmd->add_option("--corpus", corpus_path)->required();
  evald_cmd->add_option("--n", orders)->capture_default_str();
  evald_cmd->add_option("--reference", reference_path);

  // type-dist
  std::string phrases_path, truth_path, kl_dir = "generated-truth";
  bool want_kl = false;
  double epsilon = 1e-6;
  auto* type_cmd = app.add_subcommand("type-dist", "Question-type distribution and KL divergence");
  type_cmd->add_option("--corpus", corpus_path)->required();
  type_cmd->add_option("--phrases", phrases_path)->required();
  type_cmd->add_option("--truth", truth_path);
  type_cmd->add_flag("--kl", want_kl);
  type_cmd->add_option("--epsilon", epsilon)->capture_default_str();
  type_cmd->add_option("--kl-direction", kl_dir)
      ->check(CLI::IsMember({"generated-truth", "truth-generated"}))
      ->capture_default_str();

  // qpp-phrases
  std::string questions_path, phrases_out;
  std::size_t n_max = 3;
  double zeta = 0.0002;
  auto* qpp_cmd = app.add_subcommand("qpp-phrases", "Build leading question-phrase sets");
  qpp_cmd->add_option("--questions", questions_path)->required();
  qpp_cmd->add_option("--n-max", n_max)->capture_default_str();
  qpp_cmd->add_option("--zeta", zeta)->capture_default_str();
  qpp_cmd->add_option("--out", phrases_out)->required();

  // merge-drop
  std::string spans_path, spans_out;
  std::size_t eta = 3, gamma = 3, token_count = kUnlimited;
  auto* md_cmd = app.add_subcommand("merge-drop", "Merge close short spans, drop isolated ones");
  md_cmd->add_option("--spans", spans_path)->required();
  md_cmd->add_option("--eta", eta)->capture_default_str();
  md_cmd->add_option("--gamma", gamma)->capture_default_str();
  md_cmd->add_option("--token-count", token_count, "Upper bound on token indices");
  md_cmd->add_option("--out", spans_out)->required();

  // dev-sample
  std::string pools_path, ratios_text, sample_out;
  std::size_t total = 0;
  std::uint64_t seed = 0;
  auto* dev_cmd = app.add_subcommand("dev-sample", "Stratified seeded sampling");
  dev_cmd->add_option("--pools", pools_path, "stratum<TAB>item lines")->required();
  dev_cmd->add_option("--ratios", ratios_text)->required();
  dev_cmd->add_option("--total", total)->required();
  dev_cmd->add_option("--seed", seed)->required();
  dev_cmd->add_option("--out", sample_out)->required();

  // nli-label
  std::string items_path, scheme, lexicon_path, labels_out;
  auto* nlil_cmd = app.add_subcommand("nli-label", "Label NLI items");
  nlil_cmd->add_option("--items", items_path)->required();
  nlil_cmd->add_option("--scheme", scheme)->required()->check(CLI::IsMember({"finer", "heuristic"}));
  nlil_cmd->add_option("--factive-lexicon", lexicon_path, "One factive verb per line");
  nlil_cmd->add_option("--out", labels_out)->required();

  // nli-eval
  std::string gold_path, pred_path;
  auto* nlie_cmd = app.add_subcommand("nli-eval", "Accuracy, per-class F1, confusion matrix");
  nlie_cmd->add_option("--gold", gold_path)->required();
  nlie_cmd->add_option("--pred", pred_path)->required();

  // split
  std::string ids_path, split_out;
  auto* split_cmd = app.add_subcommand("split", "Seeded train/dev/test split");
  split_cmd->add_option("--ids", ids_path)->required();
  split_cmd->add_option("--ratios", ratios_text)->required();
  split_cmd->add_option("--seed", seed)->required();
  split_cmd->add_option("--out", split_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kValidation;
  }

  try {
    if (*index_cmd) {
      auto bank = load_faq_bank(bank_path);
      report_warnings(bank.warnings, err);
      const auto index = build_index(bank.items, *parse_field_mode(mode_name), params, tok);
      auto f = open_output(index_out);
      index.write(f);
      check_written(f, index_out);
      out << "documents " << index.doc_count() << '\n'
          << "avg_doc_length " << fixed4(index.average_doc_length()) << '\n';

    } else if (*search_cmd) {
      auto in = open_input(index_path);
      const auto index = Bm25Index::read(in);
      auto queries = load_queries(queries_path);
      report_warnings(queries.warnings, err);
      Run run;
      for (const auto& q : queries.items) run[q.id] = index.search(q.id, q.text, k, tag);
      auto f = open_output(run_out);
      write_run(f, run);
      check_written(f, run_out);

    } else if (*dense_cmd) {
      Run run;
      if (hash_dim > 0) {
        if (bank_path.empty() || queries_path.empty())
          throw validation_error("--hash-dim needs --bank and --queries");
        auto bank = load_faq_bank(bank_path);
        auto queries = load_queries(queries_path);
        report_warnings(bank.warnings, err);
        report_warnings(queries.warnings, err);
        EmbeddingStore store(hash_dim);
        for (const auto& item : bank.items)
          store.add(item.id, encode_or_zero(field == "q" ? item.question : item.answer, hash_dim));
        for (const auto& q : queries.items) {
          const auto v = encode_or_zero(q.text, hash_dim);
          bool zero = true;
          for (double x : v) zero = zero && x == 0.0;
          if (!zero) run[q.id] = search(store, v, k, q.id, dense_tag);
        }
      } else {
        if (emb_path.empty() || qemb_path.empty())
          throw validation_error("dense-search needs --embeddings and --query-embeddings, or --hash-dim");
        const auto store = load_embeddings(emb_path);
        const auto qstore = load_embeddings(qemb_path);
        for (std::size_t i = 0; i < qstore.size(); ++i) {
          if (qstore.norm(i) == 0.0) continue;
          run[qstore.ids()[i]] = search(store, qstore.vectors()[i], k, qstore.ids()[i], dense_tag);
        }
      }
      auto f = open_output(run_out);
      write_run(f, run);
      check_written(f, run_out);

    } else if (*fuse_cmd) {
      std::vector<Run> runs;
      std::set<std::string> qids;
      for (const auto& p : run_paths) {
        runs.push_back(load_run(p));
        for (const auto& [qid, _] : runs.back()) qids.insert(qid);
      }
      Run fused;
      for (const auto& qid : qids) {
        std::vector<RankedList> lists;
        for (const auto& r : runs) {
          auto it = r.find(qid);
          lists.push_back(it == r.end() ? RankedList{qid, {}, ""} : it->second);
        }
        fused[qid] = combsum(lists, k);
      }
      auto f = open_output(run_out);
      write_run(f, fused);
      check_written(f, run_out);

    } else if (*pool_cmd) {
      std::vector<Run> runs;
      std::set<std::string> qids;
      for (const auto& p : run_paths) {
        runs.push_back(load_run(p));
        for (const auto& [qid, _] : runs.back()) qids.insert(qid);
      }
      if (qids.empty()) throw validation_error("runs contain no queries");
      std::vector<std::vector<std::string>> pools;
      auto f = open_output(pool_out);
      for (const auto& qid : qids) {
        std::vector<RankedList> lists;
        for (const auto& r : runs)
          if (auto it = r.find(qid); it != r.end()) lists.push_back(it->second);
        pools.push_back(build_candidate_pool(lists, per_list_k));
        for (const auto& id : pools.back()) f << qid << '\t' << id << '\n';
      }
      check_written(f, pool_out);
      const auto stats = pool_stats(pools);
      out << "queries " << pools.size() << '\n'
          << "mean_pool_size " << fixed4(stats.mean_size) << '\n'
          << "min_pool_size " << stats.min_size << '\n'
          << "max_pool_size " << stats.max_size << '\n';

    } else if (*agg_cmd) {
      auto tuples = load_annotations(annotations_path);
      auto queries = load_queries(queries_path);
      report_warnings(tuples.warnings, err);
      report_warnings(queries.warnings, err);
      const auto judgments = aggregate(tuples.items);
      const auto kept = filter_unanswerable(queries.items, judgments);
      std::set<std::string> answerable;
      for (const auto& q : kept.answerable) answerable.insert(q.id);
      std::set<std::string> known;
      for (const auto& q : queries.items) known.insert(q.id);
      std::vector<RelevanceJudgment> emitted;
      std::set<std::string> unknown;
      for (const auto& j : judgments) {
        if (answerable.contains(j.query_id)) emitted.push_back(j);
        if (!known.contains(j.query_id)) unknown.insert(j.query_id);
      }
      for (const auto& q : unknown) err << "warning: judgments for unknown query '" << q << "' ignored\n";
      emit_qrels(emitted, qrels_out);
      out << "removed_unanswerable " << kept.removed_count << '\n'
          << "answerable_queries " << kept.answerable.size() << '\n';

    } else if (*evalr_cmd) {
      const auto run = load_run(run_path);
      auto in = open_input(qrels_path);
      const auto qrels = read_qrels(in);
      const auto report = evaluate_run(run, qrels, map_cutoff);
      out << "MAP " << fixed4(report.map) << '\n'
          << "MRR " << fixed4(report.mrr) << '\n'
          << "P@5 " << fixed4(report.p_at_5) << '\n';

    } else if (*evald_cmd) {
      const auto corpus = read_grouped_texts(corpus_path);
      std::vector<TokenSequence> tokens;
      std::map<std::string, std::vector<TokenSequence>> by_group;
      for (const auto& [group, text] : corpus) {
        tokens.push_back(tokenize(text));
        if (!tokens.back().empty()) by_group[group].push_back(tokens.back());
      }
      for (auto n : orders) {
        out << "Dist-" << n << ' ' << fixed4(distinct_n(tokens, n)) << '\n';
        out << "Ent-" << n << ' ' << fixed4(entropy_n(tokens, n)) << '\n';
      }
      if (!reference_path.empty()) {
        std::map<std::string, TokenSequence> refs;
        for (const auto& [group, text] : read_grouped_texts(reference_path)) {
          auto t = tokenize(text);
          if (t.empty()) throw validation_error("reference for group '" + group + "' has no tokens");
          if (!refs.emplace(group, std::move(t)).second)
            throw validation_error("duplicate reference group '" + group + "'");
        }
        if (refs.empty()) throw validation_error("reference file is empty");
        for (const auto& [group, _] : refs)
          if (!by_group.contains(group)) throw validation_error("no candidates for reference group '" + group + "'");
        for (auto n : orders) {
          std::vector<double> best;
          for (const auto& [group, ref] : refs)
            best.push_back(top1_relevance(by_group[group], ref, RelevanceMetric::bleu, n));
          out << "BLEU-" << n << ' ' << fixed4(mean_over_queries(best)) << '\n';
        }
        std::vector<double> best;
        for (const auto& [group, ref] : refs)
          best.push_back(top1_relevance(by_group[group], ref, RelevanceMetric::rouge_l));
        out << "ROUGE-L " << fixed4(mean_over_queries(best)) << '\n';
      }

    } else if (*type_cmd) {
      auto pin = open_input(phrases_path);
      const auto phrases = read_phrase_set(pin);
      auto load_questions = [](const std::string& path) {
        std::vector<TokenSequence> qs;
        for (const auto& [group, text] : read_grouped_texts(path)) {
          auto t = tokenize(text);
          if (!t.empty()) qs.push_back(std::move(t));
        }
        return qs;
      };
      const auto generated = type_distribution(load_questions(corpus_path), phrases);
      if (truth_path.empty()) {
        if (want_kl) throw validation_error("--kl needs --truth");
        out << "type\tprob\n";
        for (const auto& [type, p] : generated) out << type << '\t' << fixed4(p) << '\n';
      } else {
        const auto truth = type_distribution(load_questions(truth_path), phrases);
        std::set<std::string> types;
        for (const auto& [t, _] : generated) types.insert(t);
        for (const auto& [t, _] : truth) types.insert(t);
        out << "type\tgenerated\ttruth\n";
        for (const auto& t : types) {
          const double g = generated.contains(t) ? generated.at(t) : 0.0;
          const double r = truth.contains(t) ? truth.at(t) : 0.0;
          out << t << '\t' << fixed4(g) << '\t' << fixed4(r) << '\n';
        }
        if (want_kl) {
          const auto dir = kl_dir == "generated-truth" ? KlDirection::generated_to_truth
                                                       : KlDirection::truth_to_generated;
          out << "KL " << fixed4(kl_divergence(generated, truth, epsilon, dir)) << '\n';
        }
      }

    } else if (*qpp_cmd) {
      std::vector<TokenSequence> questions;
      for (const auto& line : read_lines(questions_path)) {
        auto t = tokenize(line);
        if (!t.empty()) questions.push_back(std::move(t));
      }
      const auto set = build_phrase_sets(questions, n_max, zeta);
      auto f = open_output(phrases_out);
      write_phrase_set(f, set);
      check_written(f, phrases_out);
      out << "questions " << set.total_questions << '\n';
      for (std::size_t n = 1; n <= set.n_max; ++n) {
        const auto it = set.phrases.find(n);
        out << "phrases_n" << n << ' ' << (it == set.phrases.end() ? 0 : it->second.size()) << '\n';
      }

    } else if (*md_cmd) {
      auto in = open_input(spans_path);
      auto docs = read_span_documents(in);
      for (auto& d : docs) d = merge_and_drop(std::move(d), token_count, eta, gamma);
      auto f = open_output(spans_out);
      write_span_documents(f, docs);
      check_written(f, spans_out);

    } else if (*dev_cmd) {
      std::vector<Stratum> strata;
      std::map<std::string, std::size_t> where;
      for (const auto& [name, item] : read_pairs(pools_path)) {
        auto [it, inserted] = where.emplace(name, strata.size());
        if (inserted) strata.push_back({name, {}, 1.0});
        strata[it->second].items.push_back(item);
      }
      const auto ratios = parse_ratios(ratios_text);
      if (ratios.size() != strata.size())
        throw validation_error(std::to_string(ratios.size()) + " ratios for " + std::to_string(strata.size()) +
                               " strata");
      for (std::size_t i = 0; i < strata.size(); ++i) strata[i].ratio = ratios[i];
      const auto sample = stratified_sample(strata, total, seed);
      auto f = open_output(sample_out);
      for (const auto& s : sample) f << s.stratum << '\t' << s.item << '\n';
      check_written(f, sample_out);

    } else if (*nlil_cmd) {
      auto items = load_nli_items(items_path);
      report_warnings(items.warnings, err);
      if (!lexicon_path.empty()) {
        std::set<std::string> lexicon;
        for (const auto& line : read_lines(lexicon_path)) lexicon.insert(std::string(trim(line)));
        resolve_factivity(items.items, lexicon);
      }
      auto f = open_output(labels_out);
      for (const auto& item : items.items) {
        const auto label = scheme == "finer" ? finer_label(item.annotations) : heuristic_label(item);
        f << item.id << '\t' << to_string(label) << '\n';
      }
      check_written(f, labels_out);

    } else if (*nlie_cmd) {
      const auto gold = read_label_file(gold_path);
      const auto pred = read_label_file(pred_path);
      std::vector<std::string> g, p;
      for (const auto& [id, label] : gold) {
        auto it = pred.find(id);
        if (it == pred.end()) throw validation_error("no prediction for item '" + id + "'");
        g.emplace_back(to_string(label));
        p.emplace_back(to_string(it->second));
      }
      for (const auto& [id, _] : pred)
        if (!gold.contains(id)) throw validation_error("prediction for unknown item '" + id + "'");
      const std::vector<std::string> labels(kFinerLabelNames.begin(), kFinerLabelNames.end());
      const auto report = classification_report(g, p, labels);
      out << "accuracy " << fixed4(report.accuracy) << '\n';
      for (const auto& l : labels) out << "F1 " << l << ' ' << fixed4(report.per_label_f1.at(l)) << '\n';
      out << "macro_F1 " << fixed4(report.macro_f1) << '\n';
      out << "confusion (rows gold, columns predicted)\n";
      for (const auto& l : labels) out << '\t' << l;
      out << '\n';
      for (std::size_t r = 0; r < labels.size(); ++r) {
        out << labels[r];
        for (auto c : report.confusion.counts[r]) out << '\t' << c;
        out << '\n';
      }

    } else if (*split_cmd) {
      const auto ids = read_lines(ids_path);
      const auto ratios = parse_ratios(ratios_text);
      if (ratios.size() != 3) throw validation_error("--ratios needs three values train:dev:test");
      std::vector<std::string> trimmed;
      for (const auto& id : ids) trimmed.emplace_back(trim(id));
      const auto assignment = split_dataset(trimmed, {ratios[0], ratios[1], ratios[2]}, seed);
      auto f = open_output(split_out);
      for (const auto& a : assignment) f << a.item_id << '\t' << to_string(a.split) << '\n';
      check_written(f, split_out);
    }
  } catch (const validation_error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const io_error& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const invariant_error& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}

}  // namespace faqir::cli
