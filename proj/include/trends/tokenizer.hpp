#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace trends {

struct TokenizerConfig {
  enum class Mode { unigram, bigram };

  std::unordered_set<std::string> stopwords;  // lowercase
  Mode mode = Mode::unigram;
  std::unordered_set<std::string> author_exclusions;

  // Canonical form used for cache keys and manifests.
  std::string fingerprint() const;
};

inline const char* to_string(TokenizerConfig::Mode m) {
  return m == TokenizerConfig::Mode::unigram ? "unigram" : "bigram";
}

namespace detail {

inline bool is_word_alnum(unsigned char c) { return std::isalnum(c) != 0; }

// Lowercase, strip leading/trailing non-alphanumerics, keep interior
// punctuation (hyphens, apostrophes). Empty result means the token is
// dropped.
inline std::string normalize_word(std::string_view raw) {
  std::size_t b = 0, e = raw.size();
  while (b < e && !is_word_alnum(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && !is_word_alnum(static_cast<unsigned char>(raw[e - 1]))) --e;
  std::string out;
  out.reserve(e - b);
  for (std::size_t i = b; i < e; ++i) {
    out.push_back(static_cast<char>(
        std::tolower(static_cast<unsigned char>(raw[i]))));
  }
  return out;
}

}  // namespace detail

// Unigram mode: lowercased, punctuation-stripped, whitespace-split words
// with stopwords removed. Bigram mode: adjacent pairs of that filtered
// sequence joined with "-".
inline std::vector<std::string> tokenize(std::string_view text,
                                         const TokenizerConfig& config) {
  std::vector<std::string> words;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < n && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) continue;
    std::string w = detail::normalize_word(text.substr(start, i - start));
    if (w.empty()) continue;
    if (config.stopwords.count(w)) continue;
    words.push_back(std::move(w));
  }
  if (config.mode == TokenizerConfig::Mode::unigram) return words;

  std::vector<std::string> bigrams;
  if (words.size() >= 2) {
    bigrams.reserve(words.size() - 1);
    for (std::size_t j = 0; j + 1 < words.size(); ++j) {
      bigrams.push_back(words[j] + "-" + words[j + 1]);
    }
  }
  return bigrams;
}

inline std::string TokenizerConfig::fingerprint() const {
  std::vector<std::string> sw(stopwords.begin(), stopwords.end());
  std::vector<std::string> ex(author_exclusions.begin(),
                              author_exclusions.end());
  std::sort(sw.begin(), sw.end());
  std::sort(ex.begin(), ex.end());
  std::string out = "mode=";
  out += to_string(mode);
  out += ";stopwords=";
  for (const auto& w : sw) {
    out += w;
    out += ',';
  }
  out += ";exclusions=";
  for (const auto& a : ex) {
    out += a;
    out += ',';
  }
  return out;
}

}  // namespace trends
