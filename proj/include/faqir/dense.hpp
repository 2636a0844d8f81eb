#pragma once

// Flat cosine-similarity ranking over per-item vectors. Vectors come either
// from an embedding file ({"id": ..., "vec": [...]} per line) produced by any
// external encoder, or from hash_encode(), a deterministic bag-of-words
// encoder:
//
//   h = FNV-1a-64(utf8 bytes of token)
//   v[h mod dim] += (bit 63 of h == 0) ? +1 : -1
//   v /= ||v||_2

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"

#include "faqir/corpus.hpp"
#include "faqir/error.hpp"
#include "faqir/ranking.hpp"
#include "faqir/text.hpp"

namespace faqir {

using Vector = std::vector<double>;

class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  explicit EmbeddingStore(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw validation_error("embedding dimension must be positive");
  }

  void add(std::string id, Vector vec) {
    if (dim_ == 0) {
      if (vec.empty()) throw validation_error("embedding dimension must be positive");
      dim_ = vec.size();
    }
    if (vec.size() != dim_)
      throw validation_error("dimension mismatch for '" + id + "': expected " +
                             std::to_string(dim_) + ", got " + std::to_string(vec.size()));
    for (double x : vec)
      if (!std::isfinite(x)) throw validation_error("non-finite value in vector '" + id + "'");
    if (!ids_set_.insert(id).second) throw validation_error("duplicate embedding id '" + id + "'");
    double sq = 0.0;
    for (double x : vec) sq += x * x;
    norms_.push_back(std::sqrt(sq));
    ids_.push_back(std::move(id));
    vectors_.push_back(std::move(vec));
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<Vector>& vectors() const { return vectors_; }

  const Vector* find(std::string_view id) const {
    for (std::size_t i = 0; i < ids_.size(); ++i)
      if (ids_[i] == id) return &vectors_[i];
    return nullptr;
  }

  double norm(std::size_t i) const { return norms_[i]; }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<Vector> vectors_;
  std::vector<double> norms_;
  std::unordered_set<std::string> ids_set_;
};

inline EmbeddingStore read_embeddings(std::istream& in) {
  EmbeddingStore store;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      // NaN/Infinity are not JSON; accept them as quoted or bare tokens so
      // they are reported as non-finite rather than as a syntax error.
      const auto obj = nlohmann::json::parse(line, nullptr, false);
      if (obj.is_discarded()) {
        if (line.find("NaN") != std::string::npos || line.find("Infinity") != std::string::npos)
          throw validation_error("non-finite value");
        throw validation_error("malformed record");
      }
      if (!obj.is_object() || !obj.contains("id") || !obj.contains("vec") || !obj["vec"].is_array())
        throw validation_error("expected {\"id\": ..., \"vec\": [...]}");
      Vector vec;
      for (const auto& x : obj["vec"]) {
        if (x.is_number()) {
          vec.push_back(x.get<double>());
        } else if (x.is_string()) {
          const auto s = x.get<std::string>();
          if (s == "NaN" || s == "nan" || s == "Infinity" || s == "-Infinity" || s == "inf" || s == "-inf")
            throw validation_error("non-finite value");
          throw validation_error("non-numeric vector entry");
        } else {
          throw validation_error("non-numeric vector entry");
        }
      }
      store.add(obj["id"].get<std::string>(), std::move(vec));
    } catch (const validation_error& e) {
      throw validation_error(detail::at_line(lineno, e.what()));
    } catch (const nlohmann::json::exception& e) {
      throw validation_error(detail::at_line(lineno, e.what()));
    }
  }
  if (in.bad()) throw io_error("read failure");
  return store;
}

inline EmbeddingStore load_embeddings(const std::string& path) {
  auto in = detail::open_input(path);
  return read_embeddings(in);
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline Vector hash_encode(std::span<const std::string> tokens, std::size_t dim) {
  if (dim < 2) throw validation_error("hash_encode(): dim must be at least 2");
  if (tokens.empty()) throw validation_error("hash_encode(): empty token sequence");
  Vector v(dim, 0.0);
  for (const auto& t : tokens) {
    const auto h = fnv1a64(t);
    v[h % dim] += (h >> 63) == 0 ? 1.0 : -1.0;
  }
  double sq = 0.0;
  for (double x : v) sq += x * x;
  if (sq == 0.0) throw validation_error("hash_encode(): token signs cancel to the zero vector");
  const double n = std::sqrt(sq);
  for (double& x : v) x /= n;
  return v;
}

inline double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

inline double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw validation_error("cosine(): dimension mismatch");
  const double uu = dot(u, u);
  const double vv = dot(v, v);
  if (uu == 0.0 || vv == 0.0) throw validation_error("cosine(): zero-norm vector");
  // sqrt(uu * vv) rather than sqrt(uu) * sqrt(vv): cosine(u, u) is then exactly 1.
  const double c = dot(u, v) / std::sqrt(uu * vv);
  return std::clamp(c, -1.0, 1.0);
}

/// Exhaustive top-k by cosine (desc), ties by id (asc). Zero-norm stored
/// vectors have no direction and are skipped.
inline RankedList search(const EmbeddingStore& store, std::span<const double> query,
                         std::size_t k, const std::string& query_id = "",
                         const std::string& tag = "dense") {
  if (k == 0) throw validation_error("k must be at least 1");
  if (query.size() != store.dim()) throw validation_error("query dimension mismatch");
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (store.norm(i) == 0.0) continue;
    scored.emplace_back(store.ids()[i], cosine(query, store.vectors()[i]));
  }
  return make_ranked_list(query_id, tag, std::move(scored), k);
}

}  // namespace faqir
