#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "trends/activity.hpp"
#include "trends/burst.hpp"
#include "trends/corpus.hpp"

namespace trends {

// A trending word and the bucket where its selected burst starts
// (relative time 0).
struct Trend {
  TokenId token = 0;
  std::int64_t start_bucket = 0;
};

inline std::vector<Trend> trends_from_bursts(
    const std::vector<BurstInterval>& bursts) {
  std::vector<Trend> out;
  out.reserve(bursts.size());
  for (const auto& b : bursts) out.push_back({b.token, b.start_bucket});
  return out;
}

// One relative-time bucket: inclusive range of relative times plus one
// entry per (document, contained bursty word) pair. After merging, every
// bucket holds at least theta entries except a single flagged residual.
struct RelativeTimeBucket {
  std::int64_t rel_start = 0;
  std::int64_t rel_end = 0;
  std::vector<double> entries;
  bool residual = false;

  std::int64_t count() const {
    return static_cast<std::int64_t>(entries.size());
  }
};

// Merge pass over relative-time buckets, earlier to later: adjacent
// buckets merge while both are under theta; a run still under theta is
// folded into the next later bucket, or the previous one when it is last;
// a lone under-theta result is kept and flagged residual.
inline std::vector<RelativeTimeBucket> merge_relative_buckets(
    std::vector<RelativeTimeBucket> buckets, std::int64_t theta) {
  if (theta < 1) {
    throw std::invalid_argument("merge: theta must be positive");
  }
  std::vector<RelativeTimeBucket> out;
  out.reserve(buckets.size());
  std::size_t i = 0;
  const std::size_t n = buckets.size();

  auto absorb = [](RelativeTimeBucket& into, RelativeTimeBucket&& piece) {
    into.rel_start = std::min(into.rel_start, piece.rel_start);
    into.rel_end = std::max(into.rel_end, piece.rel_end);
    into.entries.insert(into.entries.end(),
                        std::make_move_iterator(piece.entries.begin()),
                        std::make_move_iterator(piece.entries.end()));
  };

  while (i < n) {
    RelativeTimeBucket run = std::move(buckets[i]);
    ++i;
    if (run.count() >= theta) {
      out.push_back(std::move(run));
      continue;
    }
    while (run.count() < theta && i < n &&
           buckets[i].count() < static_cast<std::int64_t>(theta)) {
      absorb(run, std::move(buckets[i]));
      ++i;
    }
    if (run.count() >= theta) {
      out.push_back(std::move(run));
    } else if (i < n) {
      absorb(run, std::move(buckets[i]));
      ++i;
      out.push_back(std::move(run));
    } else if (!out.empty()) {
      RelativeTimeBucket prev = std::move(out.back());
      out.pop_back();
      absorb(prev, std::move(run));
      out.push_back(std::move(prev));
    } else {
      run.residual = true;
      out.push_back(std::move(run));
    }
  }
  return out;
}

// Places one entry per (document, contained bursty word) pair at relative
// time T - beta_w, carrying the document's value (activity level or
// fractional rank), then merges adjacent small buckets. Documents whose
// value slot is NaN (outside the population) are skipped.
inline std::vector<RelativeTimeBucket> assemble_relative_buckets(
    const Corpus& corpus, const std::vector<Trend>& trends,
    std::span<const double> doc_value, std::int64_t theta) {
  if (trends.empty()) {
    throw std::invalid_argument("assemble: no trends given");
  }
  if (doc_value.size() != corpus.size()) {
    throw std::invalid_argument("assemble: doc_value size mismatch");
  }

  std::vector<std::int64_t> start_of(corpus.vocabulary_size(), -1);
  for (const auto& t : trends) {
    start_of.at(t.token) = t.start_bucket;
  }

  std::map<std::int64_t, std::vector<double>> by_rel;
  std::vector<TokenId> distinct;
  const auto& docs = corpus.docs();
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (std::isnan(doc_value[i])) continue;
    const auto& d = docs[i];
    distinct.assign(d.tokens.begin(), d.tokens.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    for (TokenId t : distinct) {
      const std::int64_t beta = start_of[t];
      if (beta < 0) continue;
      by_rel[d.bucket - beta].push_back(doc_value[i]);
    }
  }

  std::vector<RelativeTimeBucket> buckets;
  buckets.reserve(by_rel.size());
  for (auto& [rel, entries] : by_rel) {
    buckets.push_back({rel, rel, std::move(entries), false});
  }
  return merge_relative_buckets(std::move(buckets), theta);
}

struct CurvePoint {
  std::int64_t rel_start = 0;
  std::int64_t rel_end = 0;
  std::int64_t count = 0;
  double median_activity = 0.0;  // g
  double f = 0.0;                // H(g)
  bool residual = false;
};

struct StatusGradientCurve {
  std::vector<CurvePoint> points;
  ActivityMode mode = ActivityMode::final_level;
  PopulationKey key = PopulationKey::author;
  DocSubset subset = DocSubset::all;
};

// Lower median, so g is an attained value and H(g) is meaningful.
inline double lower_median_value(std::vector<double> v) {
  const std::size_t mid = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid),
                   v.end());
  return v[mid];
}

// Normalized curve f(t) = H(g(t)) with g the per-bucket lower median.
// Empty buckets are skipped.
inline StatusGradientCurve status_gradient(
    const std::vector<RelativeTimeBucket>& buckets, const Ecdf& h,
    ActivityMode mode = ActivityMode::final_level,
    PopulationKey key = PopulationKey::author,
    DocSubset subset = DocSubset::all) {
  StatusGradientCurve curve;
  curve.mode = mode;
  curve.key = key;
  curve.subset = subset;
  curve.points.reserve(buckets.size());
  for (const auto& b : buckets) {
    if (b.entries.empty()) {
      std::fprintf(stderr,
                   "warning: skipping empty relative-time bucket [%lld, %lld]\n",
                   static_cast<long long>(b.rel_start),
                   static_cast<long long>(b.rel_end));
      continue;
    }
    CurvePoint pt;
    pt.rel_start = b.rel_start;
    pt.rel_end = b.rel_end;
    pt.count = b.count();
    pt.median_activity = lower_median_value(b.entries);
    pt.f = h.le(pt.median_activity);
    pt.residual = b.residual;
    curve.points.push_back(pt);
  }
  return curve;
}

// Full pipeline for one (subset, key, mode) combination: activity index,
// per-document values, relative-time buckets, curve. Current mode ranks
// documents within their week first, then normalizes through the CDF of
// those ranks.
inline StatusGradientCurve subset_gradient(const Corpus& corpus,
                                           const std::vector<Trend>& trends,
                                           DocSubset subset,
                                           PopulationKey key,
                                           ActivityMode mode,
                                           std::int64_t theta) {
  const ActivityIndex index = build_activity_index(corpus, key, subset);

  std::vector<double> values(corpus.size(),
                             std::numeric_limits<double>::quiet_NaN());
  std::vector<double> population_values;
  population_values.reserve(static_cast<std::size_t>(index.population_size));

  if (mode == ActivityMode::final_level) {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (!index.in_population(i)) continue;
      values[i] = static_cast<double>(index.doc_final[i]);
      population_values.push_back(values[i]);
    }
  } else {
    values = fractional_rank(corpus, index);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (index.in_population(i)) population_values.push_back(values[i]);
    }
  }

  const Ecdf h(std::move(population_values));
  const auto buckets =
      assemble_relative_buckets(corpus, trends, values, theta);
  return status_gradient(buckets, h, mode, key, subset);
}

}  // namespace trends
