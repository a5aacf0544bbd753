#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "trends/tokenizer.hpp"
#include "trends/types.hpp"

namespace trends {

using TokenId = std::uint32_t;
using AuthorId = std::uint32_t;
using ProducerId = std::uint32_t;

namespace detail {

// String-to-id dictionary; ids are assigned in insertion order.
class Interner {
 public:
  std::uint32_t intern(std::string_view s) {
    auto it = index_.find(std::string(s));
    if (it != index_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(keys_.size());
    keys_.emplace_back(s);
    index_.emplace(keys_.back(), id);
    return id;
  }

  std::optional<std::uint32_t> find(std::string_view s) const {
    auto it = index_.find(std::string(s));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<std::string>& keys() const { return keys_; }
  std::size_t size() const { return keys_.size(); }

 private:
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

}  // namespace detail

// Per-word presence series across buckets. doc_counts is the corpus-wide
// n_i; word_counts is k_i, the number of documents in bucket i containing
// the word at least once.
struct FrequencySeries {
  double alpha = 0.0;
  std::vector<std::int64_t> doc_counts;
  std::vector<std::int64_t> word_counts;
};

// Immutable, time-sorted document collection with interned token, author,
// and producer dictionaries plus derived per-word bucket statistics. Safe
// for unsynchronized concurrent reads.
class Corpus {
 public:
  struct Doc {
    std::string id;
    std::vector<AuthorId> authors;
    std::int64_t timestamp = 0;
    std::int64_t bucket = 0;
    std::vector<TokenId> tokens;  // ordered, duplicates preserved
    std::optional<ProducerId> producer;
    std::optional<DocKind> kind;

    bool operator==(const Doc&) const = default;
  };

  Corpus() = default;

  std::size_t size() const { return docs_.size(); }
  const std::vector<Doc>& docs() const { return docs_; }
  Granularity granularity() const { return granularity_; }
  std::int64_t epoch() const { return epoch_; }

  std::int64_t bucket_count() const {
    return static_cast<std::int64_t>(bucket_doc_counts_.size());
  }
  const std::vector<std::int64_t>& bucket_doc_counts() const {
    return bucket_doc_counts_;
  }

  const std::vector<std::string>& token_text() const { return tokens_.keys(); }
  const std::vector<std::string>& author_keys() const {
    return authors_.keys();
  }
  const std::vector<std::string>& producer_keys() const {
    return producers_.keys();
  }
  std::size_t vocabulary_size() const { return tokens_.size(); }
  std::size_t author_count() const { return authors_.size(); }
  std::size_t producer_count() const { return producers_.size(); }

  std::optional<TokenId> token_id(std::string_view word) const {
    return tokens_.find(word);
  }

  bool has_kind_tags() const { return kind_tagged_ > 0; }
  bool has_producers() const { return producer_tagged_ > 0; }

  // Sparse (bucket, k) presence counts for one token, bucket-ascending.
  const std::vector<std::pair<std::int64_t, std::int64_t>>&
  word_bucket_counts(TokenId t) const {
    return word_buckets_.at(t);
  }

  // Total number of documents containing the token.
  std::int64_t word_doc_count(TokenId t) const { return word_docs_.at(t); }

  double word_alpha(TokenId t) const {
    return size() == 0 ? 0.0
                       : static_cast<double>(word_docs_.at(t)) /
                             static_cast<double>(size());
  }

  // Dense per-bucket series (n_i, k_i) for a word, with alpha = sum(k)/sum(n).
  // An absent word gives alpha 0 and all-zero counts.
  FrequencySeries word_frequency_series(std::string_view word) const {
    FrequencySeries s;
    s.doc_counts = bucket_doc_counts_;
    s.word_counts.assign(bucket_doc_counts_.size(), 0);
    const auto id = token_id(word);
    if (!id) return s;
    fill_series(*id, s);
    return s;
  }

  FrequencySeries word_frequency_series(TokenId t) const {
    FrequencySeries s;
    s.doc_counts = bucket_doc_counts_;
    s.word_counts.assign(bucket_doc_counts_.size(), 0);
    fill_series(t, s);
    return s;
  }

  // True if the word occurs in any bucket of [first, last] (inclusive).
  bool word_occurs_in(TokenId t, std::int64_t first, std::int64_t last) const {
    const auto& sparse = word_buckets_.at(t);
    auto it = std::lower_bound(
        sparse.begin(), sparse.end(), first,
        [](const auto& p, std::int64_t b) { return p.first < b; });
    return it != sparse.end() && it->first <= last;
  }

  // Number of documents containing the word within [first, last].
  std::int64_t word_docs_in(TokenId t, std::int64_t first,
                            std::int64_t last) const {
    const auto& sparse = word_buckets_.at(t);
    auto lo = std::lower_bound(
        sparse.begin(), sparse.end(), first,
        [](const auto& p, std::int64_t b) { return p.first < b; });
    std::int64_t total = 0;
    for (auto it = lo; it != sparse.end() && it->first <= last; ++it) {
      total += it->second;
    }
    return total;
  }

  bool operator==(const Corpus& other) const {
    return granularity_ == other.granularity_ && epoch_ == other.epoch_ &&
           docs_ == other.docs_ &&
           tokens_.keys() == other.tokens_.keys() &&
           authors_.keys() == other.authors_.keys() &&
           producers_.keys() == other.producers_.keys();
  }

  // Builds a corpus from tokenized records. Records are sorted by
  // (timestamp, doc_id), excluded authors dropped, duplicate ids rejected.
  static Corpus build(std::vector<RawRecord> records,
                      const TokenizerConfig& tokenizer, Granularity g,
                      std::int64_t epoch);

  // Rebuilds a corpus from already-interned parts (cache loading). Derived
  // statistics are recomputed.
  static Corpus from_parts(Granularity g, std::int64_t epoch,
                           std::vector<std::string> token_keys,
                           std::vector<std::string> author_keys,
                           std::vector<std::string> producer_keys,
                           std::vector<Doc> docs);

 private:
  void fill_series(TokenId t, FrequencySeries& s) const {
    for (const auto& [bucket, k] : word_buckets_.at(t)) {
      s.word_counts[static_cast<std::size_t>(bucket)] = k;
    }
    std::int64_t total_docs = static_cast<std::int64_t>(size());
    s.alpha = total_docs == 0 ? 0.0
                              : static_cast<double>(word_docs_.at(t)) /
                                    static_cast<double>(total_docs);
  }

  void finalize();

  std::vector<Doc> docs_;
  Granularity granularity_ = Granularity::week;
  std::int64_t epoch_ = 0;
  detail::Interner tokens_;
  detail::Interner authors_;
  detail::Interner producers_;
  std::vector<std::int64_t> bucket_doc_counts_;
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>>
      word_buckets_;
  std::vector<std::int64_t> word_docs_;
  std::size_t kind_tagged_ = 0;
  std::size_t producer_tagged_ = 0;
};

inline Corpus Corpus::build(std::vector<RawRecord> records,
                            const TokenizerConfig& tokenizer, Granularity g,
                            std::int64_t epoch) {
  if (records.empty()) {
    throw std::invalid_argument("ingest: empty record stream");
  }

  // Duplicate ids are rejected across the whole stream, before exclusion.
  {
    std::unordered_map<std::string, std::size_t> seen;
    seen.reserve(records.size());
    for (const auto& r : records) {
      auto [it, inserted] = seen.emplace(r.id, 0);
      if (!inserted) {
        throw std::invalid_argument("ingest: duplicate doc_id \"" + r.id +
                                    "\"");
      }
    }
  }

  for (const auto& r : records) {
    if (r.authors.empty()) {
      throw std::invalid_argument("ingest: record \"" + r.id +
                                  "\": no authors");
    }
  }

  // A record with any excluded author is dropped entirely.
  if (!tokenizer.author_exclusions.empty()) {
    std::erase_if(records, [&](const RawRecord& r) {
      for (const auto& a : r.authors) {
        if (tokenizer.author_exclusions.count(a)) return true;
      }
      return false;
    });
    if (records.empty()) {
      throw std::invalid_argument(
          "ingest: no documents left after author exclusion");
    }
  }

  // (timestamp, doc_id) is a total order, so the result is independent of
  // input order.
  std::sort(records.begin(), records.end(),
            [](const RawRecord& a, const RawRecord& b) {
              if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
              return a.id < b.id;
            });

  Corpus c;
  c.granularity_ = g;
  c.epoch_ = epoch;
  c.docs_.reserve(records.size());
  for (auto& r : records) {
    Doc d;
    d.id = std::move(r.id);
    d.timestamp = r.timestamp;
    d.bucket = time_bucket(r.timestamp, g, epoch);
    d.authors.reserve(r.authors.size());
    for (const auto& a : r.authors) d.authors.push_back(c.authors_.intern(a));
    for (const auto& w : tokenize(r.text, tokenizer)) {
      d.tokens.push_back(c.tokens_.intern(w));
    }
    if (r.producer) d.producer = c.producers_.intern(*r.producer);
    d.kind = r.kind;
    c.docs_.push_back(std::move(d));
  }
  c.finalize();
  return c;
}

inline Corpus Corpus::from_parts(Granularity g, std::int64_t epoch,
                                 std::vector<std::string> token_keys,
                                 std::vector<std::string> author_keys,
                                 std::vector<std::string> producer_keys,
                                 std::vector<Doc> docs) {
  Corpus c;
  c.granularity_ = g;
  c.epoch_ = epoch;
  for (const auto& k : token_keys) c.tokens_.intern(k);
  for (const auto& k : author_keys) c.authors_.intern(k);
  for (const auto& k : producer_keys) c.producers_.intern(k);
  c.docs_ = std::move(docs);
  c.finalize();
  return c;
}

inline void Corpus::finalize() {
  std::int64_t max_bucket = -1;
  for (const auto& d : docs_) {
    if (d.bucket < 0) throw std::logic_error("corpus: negative bucket");
    max_bucket = std::max(max_bucket, d.bucket);
    if (d.kind) ++kind_tagged_;
    if (d.producer) ++producer_tagged_;
  }
  bucket_doc_counts_.assign(static_cast<std::size_t>(max_bucket + 1), 0);
  for (const auto& d : docs_) {
    ++bucket_doc_counts_[static_cast<std::size_t>(d.bucket)];
  }

  word_buckets_.assign(tokens_.size(), {});
  word_docs_.assign(tokens_.size(), 0);
  std::vector<TokenId> distinct;
  for (const auto& d : docs_) {
    distinct.assign(d.tokens.begin(), d.tokens.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    for (TokenId t : distinct) {
      auto& sparse = word_buckets_[t];
      // Docs arrive bucket-ascending, so the tail entry is the only
      // candidate for increment.
      if (!sparse.empty() && sparse.back().first == d.bucket) {
        ++sparse.back().second;
      } else {
        sparse.emplace_back(d.bucket, 1);
      }
      ++word_docs_[t];
    }
  }
}

}  // namespace trends
