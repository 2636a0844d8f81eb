#pragma once

// Okapi BM25 over FAQ items in three field modes:
//   Qq  - query vs. item question
//   Qa  - query vs. item answer
//   Qqa - query vs. question followed by answer
//
// idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)), which stays positive even for
// terms present in most documents.

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "faqir/corpus.hpp"
#include "faqir/error.hpp"
#include "faqir/ranking.hpp"
#include "faqir/text.hpp"

namespace faqir {

enum class FieldMode { Qq, Qa, Qqa };

inline std::string_view to_string(FieldMode mode) {
  switch (mode) {
    case FieldMode::Qq: return "qq";
    case FieldMode::Qa: return "qa";
    case FieldMode::Qqa: return "qqa";
  }
  throw invariant_error("bad FieldMode");
}

inline std::optional<FieldMode> parse_field_mode(std::string_view s) {
  if (s == "qq") return FieldMode::Qq;
  if (s == "qa") return FieldMode::Qa;
  if (s == "qqa") return FieldMode::Qqa;
  return std::nullopt;
}

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct Posting {
  std::size_t doc = 0;  // index into Bm25Index::doc_ids()
  std::size_t tf = 0;
};

class Bm25Index {
 public:
  static constexpr int kFormatVersion = 1;

  /// Documents are (id, tokens) pairs; ids must be unique.
  Bm25Index(std::vector<std::pair<std::string, TokenSequence>> docs, FieldMode mode,
            Bm25Params params = {}, TokenizeOptions options = {})
      : mode_(mode), params_(params), options_(options) {
    if (docs.empty()) throw validation_error("cannot index an empty bank");
    if (!(params.k1 >= 0.0) || !std::isfinite(params.k1))
      throw validation_error("k1 must be finite and non-negative");
    if (!(params.b >= 0.0 && params.b <= 1.0)) throw validation_error("b must lie in [0, 1]");

    std::size_t total_length = 0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
      auto& [id, tokens] = docs[d];
      if (!by_id_.emplace(id, d).second) throw validation_error("duplicate document id '" + id + "'");
      doc_ids_.push_back(id);
      doc_lengths_.push_back(tokens.size());
      total_length += tokens.size();

      std::map<std::string_view, std::size_t> tf;
      for (const auto& t : tokens) ++tf[t];
      for (const auto& [term, count] : tf) postings_[std::string(term)].push_back({d, count});
    }
    avg_doc_length_ = static_cast<double>(total_length) / static_cast<double>(docs.size());
  }

  std::size_t doc_count() const { return doc_ids_.size(); }
  double average_doc_length() const { return avg_doc_length_; }
  FieldMode mode() const { return mode_; }
  const Bm25Params& params() const { return params_; }
  const TokenizeOptions& tokenize_options() const { return options_; }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  const std::vector<std::size_t>& doc_lengths() const { return doc_lengths_; }
  const std::unordered_map<std::string, std::vector<Posting>>& postings() const {
    return postings_;
  }

  std::size_t doc_length(std::string_view doc_id) const { return doc_lengths_[doc_index(doc_id)]; }

  std::size_t document_frequency(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? 0 : it->second.size();
  }

  double idf(std::size_t df) const {
    const auto n = static_cast<double>(doc_count());
    const auto f = static_cast<double>(df);
    return std::log(1.0 + (n - f + 0.5) / (f + 0.5));
  }

  /// Sum over query tokens (repeats included) of the per-term BM25 weight.
  double score(std::span<const std::string> query_tokens, std::string_view doc_id) const {
    const std::size_t d = doc_index(doc_id);
    double total = 0.0;
    for (const auto& term : query_tokens) {
      auto it = postings_.find(term);
      if (it == postings_.end()) continue;
      const auto& list = it->second;
      auto p = std::lower_bound(list.begin(), list.end(), d,
                                [](const Posting& a, std::size_t doc) { return a.doc < doc; });
      if (p == list.end() || p->doc != d) continue;
      total += term_weight(p->tf, list.size(), d);
    }
    return total;
  }

  /// Term-at-a-time scoring; documents with score 0 are not returned.
  RankedList search(const std::string& query_id, std::string_view query_text, std::size_t k,
                    const std::string& tag = "bm25") const {
    if (k == 0) throw validation_error("k must be at least 1");
    const auto tokens = tokenize(query_text, options_);
    std::vector<double> acc(doc_count(), 0.0);
    std::vector<std::size_t> touched;
    for (const auto& term : tokens) {
      auto it = postings_.find(term);
      if (it == postings_.end()) continue;
      for (const auto& p : it->second) {
        if (acc[p.doc] == 0.0) touched.push_back(p.doc);
        acc[p.doc] += term_weight(p.tf, it->second.size(), p.doc);
      }
    }
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(touched.size());
    for (auto d : touched)
      if (acc[d] > 0.0) scored.emplace_back(doc_ids_[d], acc[d]);
    return make_ranked_list(query_id, tag, std::move(scored), k);
  }

  // Serialized form: a header line followed by one record per document with
  // its term-frequency map. Postings and avgdl are rebuilt on load.
  void write(std::ostream& out) const {
    using nlohmann::json;
    json header = {{"format", "faqir-bm25-index"}, {"version", kFormatVersion},
                   {"mode", to_string(mode_)},     {"k1", params_.k1},
                   {"b", params_.b},               {"stem", options_.stem},
                   {"stopwords", options_.remove_stopwords},
                   {"docs", doc_count()}};
    out << header.dump() << '\n';
    std::vector<std::map<std::string, std::size_t>> tfs(doc_count());
    for (const auto& [term, list] : postings_)
      for (const auto& p : list) tfs[p.doc][term] = p.tf;
    for (std::size_t d = 0; d < doc_count(); ++d) {
      json rec = {{"doc", doc_ids_[d]}, {"length", doc_lengths_[d]}, {"tf", tfs[d]}};
      out << rec.dump() << '\n';
    }
  }

  static Bm25Index read(std::istream& in) {
    using nlohmann::json;
    std::string line;
    std::size_t lineno = 0;
    auto next_record = [&]() -> std::optional<json> {
      while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
          return json::parse(line);
        } catch (const json::parse_error& e) {
          throw validation_error(detail::at_line(lineno, std::string("malformed index record: ") + e.what()));
        }
      }
      return std::nullopt;
    };

    try {
      auto header = next_record();
      if (!header || header->value("format", "") != "faqir-bm25-index")
        throw validation_error("not a BM25 index file");
      if (header->at("version").get<int>() != kFormatVersion)
        throw validation_error("unsupported index version " + header->at("version").dump());
      auto mode = parse_field_mode(header->at("mode").get<std::string>());
      if (!mode) throw validation_error("bad field mode in index header");
      Bm25Params params{header->at("k1").get<double>(), header->at("b").get<double>()};
      TokenizeOptions options{header->at("stopwords").get<bool>(), header->at("stem").get<bool>()};
      const auto expected = header->at("docs").get<std::size_t>();

      std::vector<std::pair<std::string, TokenSequence>> docs;
      while (auto rec = next_record()) {
        TokenSequence tokens;
        const auto length = rec->at("length").get<std::size_t>();
        for (const auto& [term, tf] : rec->at("tf").items()) {
          const auto count = tf.get<std::size_t>();
          if (count == 0) throw validation_error(detail::at_line(lineno, "zero term frequency"));
          tokens.insert(tokens.end(), count, term);
        }
        if (tokens.size() != length)
          throw validation_error(detail::at_line(lineno, "document length disagrees with term frequencies"));
        docs.emplace_back(rec->at("doc").get<std::string>(), std::move(tokens));
      }
      if (docs.size() != expected) throw validation_error("index is truncated");
      return Bm25Index(std::move(docs), *mode, params, options);
    } catch (const json::exception& e) {
      throw validation_error(std::string("malformed index: ") + e.what());
    }
  }

 private:
  std::size_t doc_index(std::string_view doc_id) const {
    auto it = by_id_.find(std::string(doc_id));
    if (it == by_id_.end()) throw validation_error("unknown document id '" + std::string(doc_id) + "'");
    return it->second;
  }

  double term_weight(std::size_t tf, std::size_t df, std::size_t doc) const {
    const auto f = static_cast<double>(tf);
    const double norm = 1.0 - params_.b +
                        params_.b * static_cast<double>(doc_lengths_[doc]) / avg_doc_length_;
    return idf(df) * f * (params_.k1 + 1.0) / (f + params_.k1 * norm);
  }

  FieldMode mode_;
  Bm25Params params_;
  TokenizeOptions options_;
  std::vector<std::string> doc_ids_;
  std::vector<std::size_t> doc_lengths_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  double avg_doc_length_ = 0.0;
};

inline std::string document_text(const FaqItem& item, FieldMode mode) {
  switch (mode) {
    case FieldMode::Qq: return item.question;
    case FieldMode::Qa: return item.answer;
    case FieldMode::Qqa: return item.question + "\n" + item.answer;
  }
  throw invariant_error("bad FieldMode");
}

inline Bm25Index build_index(const std::vector<FaqItem>& bank, FieldMode mode,
                             Bm25Params params = {}, TokenizeOptions options = {}) {
  std::vector<std::pair<std::string, TokenSequence>> docs;
  docs.reserve(bank.size());
  for (const auto& item : bank) docs.emplace_back(item.id, tokenize(document_text(item, mode), options));
  return Bm25Index(std::move(docs), mode, params, options);
}

}  // namespace faqir
