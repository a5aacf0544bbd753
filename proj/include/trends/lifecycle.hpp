#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "trends/corpus.hpp"

namespace trends {

// Authors split into five groups by final activity, each group holding
// roughly a fifth of the retained document mass. Quintile 0 marks
// excluded authors (final activity below the minimum).
struct QuintileAssignment {
  std::array<std::int64_t, 4> cutoffs{};  // ascending final-activity values
  std::vector<int> author_quintile;       // author id -> 1..5, 0 = excluded
  std::array<std::int64_t, 5> document_mass{};
  std::int64_t retained_total = 0;
  std::int64_t retained_authors = 0;
  std::int64_t max_retained_activity = 0;
  std::int64_t min_activity = 10;
};

// Sorts authors by (final activity, author key) and places cutoffs where
// the cumulative document count first reaches k/5 of the retained total.
// Each author lands wholly in one quintile.
inline QuintileAssignment quintile_cutoffs(const Corpus& corpus,
                                           std::int64_t min_activity = 10) {
  const std::size_t n_authors = corpus.author_count();
  std::vector<std::int64_t> final_activity(n_authors, 0);
  for (const auto& d : corpus.docs()) {
    for (AuthorId a : d.authors) ++final_activity[a];
  }

  struct Row {
    std::int64_t activity;
    AuthorId author;
  };
  std::vector<Row> retained;
  retained.reserve(n_authors);
  for (std::size_t a = 0; a < n_authors; ++a) {
    if (final_activity[a] >= min_activity) {
      retained.push_back({final_activity[a], static_cast<AuthorId>(a)});
    }
  }
  if (retained.size() < 5) {
    throw std::invalid_argument(
        "quintiles: fewer than 5 authors have final activity >= " +
        std::to_string(min_activity));
  }
  const auto& keys = corpus.author_keys();
  std::sort(retained.begin(), retained.end(),
            [&](const Row& x, const Row& y) {
              if (x.activity != y.activity) return x.activity < y.activity;
              return keys[x.author] < keys[y.author];
            });

  QuintileAssignment out;
  out.min_activity = min_activity;
  out.author_quintile.assign(n_authors, 0);
  out.retained_authors = static_cast<std::int64_t>(retained.size());
  for (const auto& r : retained) {
    out.retained_total += r.activity;
    out.max_retained_activity = std::max(out.max_retained_activity,
                                         r.activity);
  }

  int q = 1;
  std::int64_t cum = 0;
  for (const auto& r : retained) {
    out.author_quintile[r.author] = q;
    out.document_mass[static_cast<std::size_t>(q - 1)] += r.activity;
    cum += r.activity;
    // An author may cross several cutoffs at once; later quintiles then
    // stay empty.
    while (q < 5 &&
           5 * cum >= static_cast<std::int64_t>(q) * out.retained_total) {
      out.cutoffs[static_cast<std::size_t>(q - 1)] = r.activity;
      ++q;
    }
  }
  return out;
}

struct LifeStageCell {
  int quintile = 0;
  std::int64_t stage = 0;  // stage s covers the author's documents
                           // [s*stage_size, (s+1)*stage_size)
  std::int64_t docs = 0;
  double avg_bursty_words = 0.0;
  bool middle = false;  // quintiles 2..4, the default reporting set
};

struct LifeStageTable {
  std::vector<LifeStageCell> rows;  // ordered by (quintile, stage)
  int stage_size = 5;
};

// A bursty word, optionally restricted to its burst interval for the
// within-burst counting variant.
struct BurstyWord {
  TokenId token = 0;
  std::int64_t start_bucket = 0;
  std::int64_t end_bucket = std::numeric_limits<std::int64_t>::max();
};

// Chunks each retained author's chronological documents into stages of
// stage_size (incomplete tail dropped) and reports the average number of
// distinct bursty words per document for every (quintile, stage) cell.
// With within_burst_only, a word counts only in documents falling inside
// its burst interval.
inline LifeStageTable life_stage_usage(const Corpus& corpus,
                                       const QuintileAssignment& assignment,
                                       const std::vector<BurstyWord>& bursty,
                                       int stage_size = 5,
                                       bool within_burst_only = false) {
  if (bursty.empty()) {
    throw std::invalid_argument("life stages: empty bursty-word set");
  }
  if (stage_size < 1) {
    throw std::invalid_argument("life stages: stage_size must be positive");
  }
  if (assignment.author_quintile.size() != corpus.author_count()) {
    throw std::invalid_argument(
        "life stages: assignment built from a different corpus");
  }

  std::vector<std::int64_t> burst_lo(corpus.vocabulary_size(), -1);
  std::vector<std::int64_t> burst_hi(corpus.vocabulary_size(), -1);
  for (const auto& b : bursty) {
    burst_lo.at(b.token) = b.start_bucket;
    burst_hi.at(b.token) = b.end_bucket;
  }

  // Per-document distinct bursty-word count; corpus order is
  // chronological, so per-author sequences come out in document order.
  std::vector<std::int64_t> doc_count(corpus.size(), 0);
  {
    std::vector<TokenId> distinct;
    const auto& docs = corpus.docs();
    for (std::size_t i = 0; i < docs.size(); ++i) {
      const auto& d = docs[i];
      distinct.assign(d.tokens.begin(), d.tokens.end());
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()),
                     distinct.end());
      std::int64_t c = 0;
      for (TokenId t : distinct) {
        if (burst_lo[t] < 0) continue;
        if (within_burst_only &&
            (d.bucket < burst_lo[t] || d.bucket > burst_hi[t])) {
          continue;
        }
        ++c;
      }
      doc_count[i] = c;
    }
  }

  // (quintile, stage) -> (docs, total bursty words)
  std::map<std::pair<int, std::int64_t>, std::pair<std::int64_t, std::int64_t>>
      cells;
  std::vector<std::int64_t> author_pos(corpus.author_count(), 0);
  std::vector<std::int64_t> author_total(corpus.author_count(), 0);
  for (const auto& d : corpus.docs()) {
    for (AuthorId a : d.authors) ++author_total[a];
  }

  const auto& docs = corpus.docs();
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (AuthorId a : docs[i].authors) {
      const std::int64_t pos = author_pos[a]++;
      const int q = assignment.author_quintile[a];
      if (q == 0) continue;
      const std::int64_t stage = pos / stage_size;
      // Incomplete trailing stage is dropped.
      if ((stage + 1) * stage_size > author_total[a]) continue;
      auto& cell = cells[{q, stage}];
      cell.first += 1;
      cell.second += doc_count[i];
    }
  }

  LifeStageTable table;
  table.stage_size = stage_size;
  table.rows.reserve(cells.size());
  for (const auto& [key, val] : cells) {
    LifeStageCell row;
    row.quintile = key.first;
    row.stage = key.second;
    row.docs = val.first;
    row.avg_bursty_words =
        static_cast<double>(val.second) / static_cast<double>(val.first);
    row.middle = key.first >= 2 && key.first <= 4;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace trends
