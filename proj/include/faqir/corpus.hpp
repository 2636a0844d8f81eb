#pragma once

// Record types and JSON-lines persistence for FAQ banks, query banks,
// relevance annotations and NLI items, plus seeded train/dev/test splitting.
//
// Every file holds one JSON object per line. Blank lines are skipped. Unknown
// keys are ignored with a warning; missing or mistyped keys are errors that
// carry the 1-based line number.

#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "faqir/error.hpp"
#include "faqir/rng.hpp"
#include "faqir/text.hpp"

namespace faqir {

enum class ItemForm { question, query_string, forum };
enum class QueryForm { question, query_string };
enum class Environment { negation, modal, question, conditional };
enum class Person { first, second, third };
enum class Split { train, dev, test };

namespace detail {

template <typename E, std::size_t N>
struct EnumNames {
  std::array<std::pair<E, std::string_view>, N> names;

  std::string_view to_string(E value) const {
    for (const auto& [e, name] : names)
      if (e == value) return name;
    throw invariant_error("enum value without a name");
  }
  std::optional<E> parse(std::string_view text) const {
    for (const auto& [e, name] : names)
      if (name == text) return e;
    return std::nullopt;
  }
};

inline constexpr EnumNames<ItemForm, 3> kItemForms{{{{ItemForm::question, "question"},
                                                     {ItemForm::query_string, "query_string"},
                                                     {ItemForm::forum, "forum"}}}};
inline constexpr EnumNames<QueryForm, 2> kQueryForms{
    {{{QueryForm::question, "question"}, {QueryForm::query_string, "query_string"}}}};
inline constexpr EnumNames<Environment, 4> kEnvironments{
    {{{Environment::negation, "negation"},
      {Environment::modal, "modal"},
      {Environment::question, "question"},
      {Environment::conditional, "conditional"}}}};
inline constexpr EnumNames<Person, 3> kPersons{
    {{{Person::first, "first"}, {Person::second, "second"}, {Person::third, "third"}}}};
inline constexpr EnumNames<Split, 3> kSplits{
    {{{Split::train, "train"}, {Split::dev, "dev"}, {Split::test, "test"}}}};

}  // namespace detail

inline std::string_view to_string(ItemForm v) { return detail::kItemForms.to_string(v); }
inline std::string_view to_string(QueryForm v) { return detail::kQueryForms.to_string(v); }
inline std::string_view to_string(Environment v) { return detail::kEnvironments.to_string(v); }
inline std::string_view to_string(Person v) { return detail::kPersons.to_string(v); }
inline std::string_view to_string(Split v) { return detail::kSplits.to_string(v); }

struct FaqItem {
  std::string id;
  std::string question;
  std::string answer;
  std::string source;
  std::string language;
  ItemForm form = ItemForm::question;

  friend bool operator==(const FaqItem&, const FaqItem&) = default;
};

struct Query {
  std::string id;
  std::string text;
  QueryForm form = QueryForm::question;
  std::optional<std::string> template_id;

  friend bool operator==(const Query&, const Query&) = default;
};

/// Raw relevance scores: Matched (4), Useful (3), Useless (2), Non-relevant (1).
struct AnnotationTuple {
  std::string query_id;
  std::string faq_id;
  std::vector<int> raw_scores;

  friend bool operator==(const AnnotationTuple&, const AnnotationTuple&) = default;
};

/// Premise/hypothesis pair with Likert annotations in [-3, 3].
struct NliItem {
  std::string id;
  std::string premise;
  std::string hypothesis;
  std::vector<int> annotations;
  Environment environment = Environment::negation;
  Person person = Person::third;
  std::string matrix_verb;
  std::optional<bool> factive;

  friend bool operator==(const NliItem&, const NliItem&) = default;
};

struct SplitAssignment {
  std::string item_id;
  Split split = Split::train;

  friend bool operator==(const SplitAssignment&, const SplitAssignment&) = default;
};

/// Loader output: the records plus non-fatal diagnostics.
template <typename T>
struct Loaded {
  std::vector<T> items;
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kMinRelevanceAnnotations = 3;
inline constexpr std::size_t kMinNliAnnotations = 8;

namespace detail {

using json = nlohmann::json;

class RecordReader {
 public:
  RecordReader(const json& obj, std::size_t line, std::vector<std::string>& warnings,
               std::initializer_list<std::string_view> known)
      : obj_(obj), line_(line) {
    if (!obj.is_object()) throw validation_error(at_line(line, "record is not a JSON object"));
    for (const auto& [key, value] : obj.items()) {
      bool is_known = false;
      for (auto k : known) is_known = is_known || k == key;
      if (!is_known) warnings.push_back(at_line(line, "ignoring unknown field '" + key + "'"));
    }
  }

  std::string string(const char* key, bool allow_blank = false) const {
    const auto& v = require(key);
    if (!v.is_string()) fail(std::string("field '") + key + "' must be a string");
    auto s = v.get<std::string>();
    if (!allow_blank && trim(s).empty()) fail(std::string("field '") + key + "' is empty");
    return s;
  }

  std::optional<std::string> optional_string(const char* key) const {
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) fail(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
  }

  std::optional<bool> optional_bool(const char* key) const {
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return std::nullopt;
    if (!it->is_boolean()) fail(std::string("field '") + key + "' must be a boolean");
    return it->get<bool>();
  }

  std::vector<int> int_list(const char* key, int lo, int hi) const {
    const auto& v = require(key);
    if (!v.is_array()) fail(std::string("field '") + key + "' must be a list of integers");
    std::vector<int> out;
    for (const auto& e : v) {
      if (!e.is_number_integer()) fail(std::string("field '") + key + "' must hold integers");
      const auto x = e.get<long long>();
      if (x < lo || x > hi)
        fail("value " + std::to_string(x) + " in '" + key + "' outside [" + std::to_string(lo) +
             ", " + std::to_string(hi) + "]");
      out.push_back(static_cast<int>(x));
    }
    if (out.empty()) fail(std::string("field '") + key + "' is empty");
    return out;
  }

  template <typename E, std::size_t N>
  E enumeration(const char* key, const EnumNames<E, N>& names) const {
    auto s = string(key);
    auto e = names.parse(s);
    if (!e) fail("unknown " + std::string(key) + " value '" + s + "'");
    return *e;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw validation_error(at_line(line_, what));
  }

 private:
  const json& require(const char* key) const {
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null())
      fail(std::string("missing required field '") + key + "'");
    return *it;
  }

  const json& obj_;
  std::size_t line_;
};

template <typename T, typename Parse>
Loaded<T> read_records(std::istream& in, Parse parse) {
  Loaded<T> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw validation_error(at_line(lineno, std::string("malformed record: ") + e.what()));
    }
    out.items.push_back(parse(obj, lineno, out.warnings));
  }
  if (in.bad()) throw io_error("read failure");
  return out;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  return out;
}

inline void check_written(std::ostream& out, const std::string& path) {
  out.flush();
  if (!out) throw io_error("write to '" + path + "' failed");
}

template <typename T, typename Key>
void check_unique(const std::vector<T>& items, Key key, std::string_view what) {
  std::unordered_set<std::string> seen;
  for (const auto& item : items)
    if (!seen.insert(key(item)).second)
      throw validation_error("duplicate " + std::string(what) + " '" + key(item) + "'");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Loaders

inline Loaded<FaqItem> read_faq_bank(std::istream& in) {
  auto bank = detail::read_records<FaqItem>(
      in, [](const detail::json& obj, std::size_t line, auto& warnings) {
        detail::RecordReader r(obj, line, warnings,
                               {"id", "question", "answer", "source", "language", "form"});
        return FaqItem{r.string("id"),     r.string("question"),
                       r.string("answer"), r.string("source", true),
                       r.string("language", true),
                       r.enumeration("form", detail::kItemForms)};
      });
  detail::check_unique(bank.items, [](const FaqItem& f) { return f.id; }, "FAQ id");
  return bank;
}

inline Loaded<FaqItem> load_faq_bank(const std::string& path) {
  auto in = detail::open_input(path);
  return read_faq_bank(in);
}

inline Loaded<Query> read_queries(std::istream& in) {
  auto queries = detail::read_records<Query>(
      in, [](const detail::json& obj, std::size_t line, auto& warnings) {
        detail::RecordReader r(obj, line, warnings, {"id", "text", "form", "template_id"});
        return Query{r.string("id"), r.string("text"),
                     r.enumeration("form", detail::kQueryForms),
                     r.optional_string("template_id")};
      });
  detail::check_unique(queries.items, [](const Query& q) { return q.id; }, "query id");
  return queries;
}

inline Loaded<Query> load_queries(const std::string& path) {
  auto in = detail::open_input(path);
  return read_queries(in);
}

inline Loaded<AnnotationTuple> read_annotations(std::istream& in) {
  return detail::read_records<AnnotationTuple>(
      in, [](const detail::json& obj, std::size_t line, auto& warnings) {
        detail::RecordReader r(obj, line, warnings, {"query_id", "faq_id", "raw_scores"});
        AnnotationTuple t{r.string("query_id"), r.string("faq_id"),
                          r.int_list("raw_scores", 1, 4)};
        if (t.raw_scores.size() < kMinRelevanceAnnotations)
          warnings.push_back(detail::at_line(
              line, "only " + std::to_string(t.raw_scores.size()) + " annotation score(s) for (" +
                        t.query_id + ", " + t.faq_id + ")"));
        return t;
      });
}

inline Loaded<AnnotationTuple> load_annotations(const std::string& path) {
  auto in = detail::open_input(path);
  return read_annotations(in);
}

inline Loaded<NliItem> read_nli_items(std::istream& in) {
  auto items = detail::read_records<NliItem>(
      in, [](const detail::json& obj, std::size_t line, auto& warnings) {
        detail::RecordReader r(obj, line, warnings,
                               {"id", "premise", "hypothesis", "annotations", "environment",
                                "person", "matrix_verb", "factive"});
        NliItem item{r.string("id"),
                     r.string("premise"),
                     r.string("hypothesis"),
                     r.int_list("annotations", -3, 3),
                     r.enumeration("environment", detail::kEnvironments),
                     r.enumeration("person", detail::kPersons),
                     r.string("matrix_verb"),
                     r.optional_bool("factive")};
        if (item.annotations.size() < kMinNliAnnotations)
          warnings.push_back(detail::at_line(
              line, "only " + std::to_string(item.annotations.size()) +
                        " annotation(s) for item '" + item.id + "'"));
        return item;
      });
  detail::check_unique(items.items, [](const NliItem& i) { return i.id; }, "NLI item id");
  return items;
}

inline Loaded<NliItem> load_nli_items(const std::string& path) {
  auto in = detail::open_input(path);
  return read_nli_items(in);
}

/// Fills unset `factive` flags from a verb lexicon (membership => factive).
inline void resolve_factivity(std::vector<NliItem>& items, const std::set<std::string>& lexicon) {
  for (auto& item : items)
    if (!item.factive) item.factive = lexicon.contains(item.matrix_verb);
}

// ---------------------------------------------------------------------------
// Writers. Output reloads to an identical collection.

inline void write_faq_bank(std::ostream& out, const std::vector<FaqItem>& bank) {
  for (const auto& f : bank) {
    detail::json j = {{"id", f.id},         {"question", f.question},
                      {"answer", f.answer}, {"source", f.source},
                      {"language", f.language}, {"form", to_string(f.form)}};
    out << j.dump() << '\n';
  }
}

inline void write_queries(std::ostream& out, const std::vector<Query>& queries) {
  for (const auto& q : queries) {
    detail::json j = {{"id", q.id}, {"text", q.text}, {"form", to_string(q.form)}};
    if (q.template_id) j["template_id"] = *q.template_id;
    out << j.dump() << '\n';
  }
}

inline void write_annotations(std::ostream& out, const std::vector<AnnotationTuple>& tuples) {
  for (const auto& t : tuples) {
    detail::json j = {{"query_id", t.query_id}, {"faq_id", t.faq_id}, {"raw_scores", t.raw_scores}};
    out << j.dump() << '\n';
  }
}

inline void write_nli_items(std::ostream& out, const std::vector<NliItem>& items) {
  for (const auto& i : items) {
    detail::json j = {{"id", i.id},
                      {"premise", i.premise},
                      {"hypothesis", i.hypothesis},
                      {"annotations", i.annotations},
                      {"environment", to_string(i.environment)},
                      {"person", to_string(i.person)},
                      {"matrix_verb", i.matrix_verb}};
    if (i.factive) j["factive"] = *i.factive;
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Splits

/// Seeded split: shuffle a copy of the ids, then cut it into train/dev/test
/// blocks sized by largest-remainder apportionment. Returned in input order.
inline std::vector<SplitAssignment> split_dataset(const std::vector<std::string>& item_ids,
                                                  const std::array<double, 3>& ratios,
                                                  std::uint64_t seed) {
  detail::check_unique(item_ids, [](const std::string& s) { return s; }, "item id");
  const auto sizes = apportion(item_ids.size(), ratios);

  std::vector<std::size_t> order(item_ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Xoshiro256 rng(seed);
  seeded_shuffle(order, rng);

  std::vector<Split> which(item_ids.size());
  std::size_t pos = 0;
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t c = 0; c < sizes[s]; ++c) which[order[pos++]] = static_cast<Split>(s);

  std::vector<SplitAssignment> out;
  out.reserve(item_ids.size());
  for (std::size_t i = 0; i < item_ids.size(); ++i) out.push_back({item_ids[i], which[i]});
  return out;
}

}  // namespace faqir
