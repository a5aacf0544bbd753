#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "trends/corpus.hpp"

namespace trends {

enum class PopulationKey { author, producer };
enum class DocSubset { all, post, comment };
enum class ActivityMode { final_level, current_level };

inline const char* to_string(PopulationKey k) {
  return k == PopulationKey::author ? "author" : "producer";
}

inline const char* to_string(DocSubset s) {
  switch (s) {
    case DocSubset::all: return "all";
    case DocSubset::post: return "post";
    case DocSubset::comment: return "comment";
  }
  return "?";
}

inline const char* to_string(ActivityMode m) {
  return m == ActivityMode::final_level ? "final" : "current";
}

inline std::optional<PopulationKey> parse_population_key(
    const std::string& s) {
  if (s == "author") return PopulationKey::author;
  if (s == "producer") return PopulationKey::producer;
  return std::nullopt;
}

inline std::optional<DocSubset> parse_subset(const std::string& s) {
  if (s == "all") return DocSubset::all;
  if (s == "post") return DocSubset::post;
  if (s == "comment") return DocSubset::comment;
  return std::nullopt;
}

inline std::optional<ActivityMode> parse_mode(const std::string& s) {
  if (s == "final") return ActivityMode::final_level;
  if (s == "current") return ActivityMode::current_level;
  return std::nullopt;
}

// Empirical CDF over a fixed sample; right-continuous step function.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
      throw std::invalid_argument("ecdf: empty sample");
    }
    std::sort(values_.begin(), values_.end());
  }

  // Fraction of the sample <= x.
  double le(double x) const {
    const auto it = std::upper_bound(values_.begin(), values_.end(), x);
    return static_cast<double>(it - values_.begin()) /
           static_cast<double>(values_.size());
  }

  // Fraction of the sample strictly < x.
  double lt(double x) const {
    const auto it = std::lower_bound(values_.begin(), values_.end(), x);
    return static_cast<double>(it - values_.begin()) /
           static_cast<double>(values_.size());
  }

  double operator()(double x) const { return le(x); }

  std::size_t size() const { return values_.size(); }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

 private:
  std::vector<double> values_;
};

// Activity bookkeeping for one (population key, subset) choice. Activity
// is the number of population documents an entity produced; a document's
// activity is the maximum over its entities. Final activity is the
// lifetime count, current activity the count up to and including the
// document's timestamp.
struct ActivityIndex {
  PopulationKey key = PopulationKey::author;
  DocSubset subset = DocSubset::all;
  std::vector<std::int64_t> entity_final;  // entity id -> lifetime count
  // Indexed by corpus doc position; -1 marks documents outside the
  // population.
  std::vector<std::int64_t> doc_final;
  std::vector<std::int64_t> doc_current;
  std::int64_t population_size = 0;
  Ecdf final_cdf;

  bool in_population(std::size_t doc_idx) const {
    return doc_final[doc_idx] >= 0;
  }
};

namespace detail {

inline bool doc_in_subset(const Corpus::Doc& d, DocSubset subset) {
  if (subset == DocSubset::all) return true;
  if (!d.kind) return false;
  return (subset == DocSubset::post && *d.kind == DocKind::post) ||
         (subset == DocSubset::comment && *d.kind == DocKind::comment);
}

inline void check_subset_usable(const Corpus& corpus, DocSubset subset) {
  if (subset != DocSubset::all && !corpus.has_kind_tags()) {
    throw std::invalid_argument(
        std::string("subset '") + to_string(subset) +
        "' requested but the corpus has no kind tags");
  }
}

}  // namespace detail

// Builds activity counts and the activity CDF H over the documents of the
// chosen subset. For the producer key, documents without a producer are
// excluded from both counts and H. Multi-entity documents contribute to
// every entity's count but take the maximum for their own activity.
inline ActivityIndex build_activity_index(const Corpus& corpus,
                                          PopulationKey key,
                                          DocSubset subset) {
  detail::check_subset_usable(corpus, subset);
  const auto& docs = corpus.docs();
  const std::size_t entity_count = key == PopulationKey::author
                                       ? corpus.author_count()
                                       : corpus.producer_count();

  std::vector<char> in_pop(docs.size(), 0);
  std::vector<std::int64_t> entity_final(entity_count, 0);
  std::int64_t population = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& d = docs[i];
    if (!detail::doc_in_subset(d, subset)) continue;
    if (key == PopulationKey::producer && !d.producer) continue;
    in_pop[i] = 1;
    ++population;
    if (key == PopulationKey::author) {
      for (AuthorId a : d.authors) ++entity_final[a];
    } else {
      ++entity_final[*d.producer];
    }
  }
  if (population == 0) {
    throw std::invalid_argument(
        std::string("activity index: empty population for key=") +
        to_string(key) + " subset=" + to_string(subset));
  }

  std::vector<std::int64_t> doc_final(docs.size(), -1);
  std::vector<std::int64_t> doc_current(docs.size(), -1);
  std::vector<double> h_values;
  h_values.reserve(static_cast<std::size_t>(population));

  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!in_pop[i]) continue;
    const auto& d = docs[i];
    std::int64_t best = 0;
    if (key == PopulationKey::author) {
      for (AuthorId a : d.authors) best = std::max(best, entity_final[a]);
    } else {
      best = entity_final[*d.producer];
    }
    doc_final[i] = best;
    h_values.push_back(static_cast<double>(best));
  }

  // Current activity: walk documents chronologically; all documents
  // sharing a timestamp are counted before any of them is assigned, per
  // "up to and including" the timestamp.
  std::vector<std::int64_t> running(entity_count, 0);
  std::size_t i = 0;
  while (i < docs.size()) {
    std::size_t j = i;
    while (j < docs.size() && docs[j].timestamp == docs[i].timestamp) ++j;
    for (std::size_t m = i; m < j; ++m) {
      if (!in_pop[m]) continue;
      const auto& d = docs[m];
      if (key == PopulationKey::author) {
        for (AuthorId a : d.authors) ++running[a];
      } else {
        ++running[*d.producer];
      }
    }
    for (std::size_t m = i; m < j; ++m) {
      if (!in_pop[m]) continue;
      const auto& d = docs[m];
      std::int64_t best = 0;
      if (key == PopulationKey::author) {
        for (AuthorId a : d.authors) best = std::max(best, running[a]);
      } else {
        best = running[*d.producer];
      }
      doc_current[m] = best;
    }
    i = j;
  }

  return ActivityIndex{key,
                       subset,
                       std::move(entity_final),
                       std::move(doc_final),
                       std::move(doc_current),
                       population,
                       Ecdf(std::move(h_values))};
}

// Within-bucket quantile of current activity: the fraction of population
// documents in the same time bucket whose current activity is strictly
// smaller. Lies in [0, 1); NaN for documents outside the population.
inline std::vector<double> fractional_rank(const Corpus& corpus,
                                           const ActivityIndex& index) {
  const auto& docs = corpus.docs();
  std::vector<double> rank(docs.size(),
                           std::numeric_limits<double>::quiet_NaN());

  std::vector<std::vector<std::int64_t>> per_bucket(
      static_cast<std::size_t>(corpus.bucket_count()));
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!index.in_population(i)) continue;
    per_bucket[static_cast<std::size_t>(docs[i].bucket)].push_back(
        index.doc_current[i]);
  }
  for (auto& v : per_bucket) std::sort(v.begin(), v.end());

  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!index.in_population(i)) continue;
    const auto& v = per_bucket[static_cast<std::size_t>(docs[i].bucket)];
    const auto it =
        std::lower_bound(v.begin(), v.end(), index.doc_current[i]);
    rank[i] = static_cast<double>(it - v.begin()) /
              static_cast<double>(v.size());
  }
  return rank;
}

}  // namespace trends
