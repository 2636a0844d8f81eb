#pragma once

// Tokenization and n-gram extraction. Every module that looks at terms goes
// through tokenize(), so BM25, the hashed encoder, the diversity metrics and
// the phrase tools all see identical tokens.

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "faqir/error.hpp"

namespace faqir {

using TokenSequence = std::vector<std::string>;
using Ngram = std::vector<std::string>;

struct TokenizeOptions {
  bool remove_stopwords = false;
  bool stem = false;

  friend bool operator==(const TokenizeOptions&, const TokenizeOptions&) = default;
};

namespace detail {

inline constexpr std::array<std::string_view, 33> kStopwords = {
    "a",   "an",   "and",  "are",  "as",   "at",   "be",    "but",  "by",
    "for", "if",   "in",   "into", "is",   "it",   "no",    "not",  "of",
    "on",  "or",   "such", "that", "the",  "their", "then", "there", "these",
    "they", "this", "to",  "was",  "will", "with"};

inline bool is_stopword(std::string_view token) {
  return std::binary_search(kStopwords.begin(), kStopwords.end(), token);
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Harman's S-stemmer: plural stripping only.
inline std::string s_stem(std::string token) {
  if (token.size() < 2) return token;
  if (ends_with(token, "ies") && !ends_with(token, "eies") && !ends_with(token, "aies")) {
    token.replace(token.size() - 3, 3, "y");
  } else if (ends_with(token, "es") && !ends_with(token, "aes") && !ends_with(token, "ees") &&
             !ends_with(token, "oes")) {
    token.erase(token.size() - 1);
  } else if (ends_with(token, "s") && !ends_with(token, "us") && !ends_with(token, "ss")) {
    token.erase(token.size() - 1);
  }
  return token;
}

inline void append_utf8(std::string& out, UChar32 cp) {
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  UBool error = false;
  U8_APPEND(buf, len, U8_MAX_LENGTH, cp, error);
  if (!error) out.append(buf, static_cast<std::size_t>(len));
}

}  // namespace detail

/// Lowercases and splits on every maximal run of characters that are not
/// Unicode letters or decimal digits. Invalid UTF-8 bytes act as separators.
inline TokenSequence tokenize(std::string_view text, const TokenizeOptions& options = {}) {
  TokenSequence tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (!(options.remove_stopwords && detail::is_stopword(current)))
      tokens.push_back(options.stem ? detail::s_stem(std::move(current)) : std::move(current));
    current.clear();
  };

  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 cp = 0;
    U8_NEXT(bytes, i, length, cp);
    if (cp >= 0 && u_isalnum(cp)) {
      detail::append_utf8(current, u_tolower(cp));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

/// Contiguous windows of length n, in order.
inline std::vector<Ngram> ngrams(std::span<const std::string> tokens, std::size_t n) {
  if (n == 0) throw validation_error("ngrams(): n must be at least 1");
  std::vector<Ngram> out;
  if (tokens.size() < n) return out;
  out.reserve(tokens.size() - n + 1);
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    out.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                     tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
  return out;
}

inline std::string join(std::span<const std::string> tokens, std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

}  // namespace faqir
