#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "trends/corpus.hpp"

namespace trends {

// Two-state word-usage automaton: the low state emits a word into each
// document with probability alpha, the high state with probability
// c * alpha, and the state flips between steps with probability p.
struct AutomatonParams {
  double p = 0.1;
  double c = 2.0;
  double alpha = 0.0;

  void validate() const {
    if (!(p > 0.0 && p < 1.0)) {
      throw std::invalid_argument("automaton: p must be in (0,1)");
    }
    if (!(c > 1.0)) {
      throw std::invalid_argument("automaton: c must exceed 1");
    }
    if (!(alpha > 0.0 && c * alpha < 1.0)) {
      throw std::invalid_argument(
          "automaton: need 0 < alpha and c*alpha < 1");
    }
  }
};

enum class State : unsigned char { low = 0, high = 1 };

// A word's maximal high-state interval. Buckets are inclusive; weight is
// the log-likelihood gain over flattening the interval to the low state.
struct BurstInterval {
  std::string word;
  TokenId token = 0;
  std::int64_t start_bucket = 0;
  std::int64_t end_bucket = 0;
  double weight = 0.0;
  std::int64_t occurrences = 0;
  double alpha = 0.0;
};

struct TrendFilterConfig {
  std::int64_t min_burst_len = 8;           // buckets
  std::int64_t longevity_window = 13;       // buckets per quarter
  int quarters_per_side = 4;                // 0 disables the longevity test
  std::size_t top_k = 500;
  std::int64_t target_median_occurrences = 5000;
  std::vector<double> multiplier_grid = {1.5, 2.0, 2.5, 3.0, 3.5, 4.0,
                                         4.5, 5.0, 5.5, 6.0, 6.5, 7.0,
                                         7.5, 8.0, 8.5, 9.0, 9.5, 10.0};

  void validate() const {
    if (min_burst_len < 1) {
      throw std::invalid_argument("filter: min_burst_len must be positive");
    }
    if (longevity_window < 1) {
      throw std::invalid_argument(
          "filter: longevity_window must be positive");
    }
    if (quarters_per_side < 0) {
      throw std::invalid_argument(
          "filter: quarters_per_side must be nonnegative");
    }
    if (top_k < 1) {
      throw std::invalid_argument("filter: top_k must be positive");
    }
    if (target_median_occurrences < 1) {
      throw std::invalid_argument("filter: target median must be positive");
    }
    if (multiplier_grid.empty()) {
      throw std::invalid_argument("filter: empty multiplier grid");
    }
    for (std::size_t i = 0; i < multiplier_grid.size(); ++i) {
      if (!(multiplier_grid[i] > 1.0)) {
        throw std::invalid_argument("filter: grid values must exceed 1");
      }
      if (i > 0 && !(multiplier_grid[i] > multiplier_grid[i - 1])) {
        throw std::invalid_argument(
            "filter: grid must be strictly increasing");
      }
    }
  }
};

namespace detail {

struct EmissionLogs {
  double lo;      // ln(alpha)
  double lo_c;    // ln(1 - alpha)
  double hi;      // ln(c * alpha)
  double hi_c;    // ln(1 - c * alpha)
  double change;  // ln(p)
  double stay;    // ln(1 - p)

  explicit EmissionLogs(const AutomatonParams& a)
      : lo(std::log(a.alpha)),
        lo_c(std::log(1.0 - a.alpha)),
        hi(std::log(a.c * a.alpha)),
        hi_c(std::log(1.0 - a.c * a.alpha)),
        change(std::log(a.p)),
        stay(std::log(1.0 - a.p)) {}

  double emit(State s, std::int64_t n, std::int64_t k) const {
    const double dk = static_cast<double>(k);
    const double dr = static_cast<double>(n - k);
    return s == State::high ? dk * hi + dr * hi_c : dk * lo + dr * lo_c;
  }
};

inline void check_series(std::span<const std::int64_t> n,
                         std::span<const std::int64_t> k) {
  if (n.empty()) {
    throw std::invalid_argument("viterbi: empty series");
  }
  if (n.size() != k.size()) {
    throw std::invalid_argument("viterbi: mismatched series lengths");
  }
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (k[i] < 0 || n[i] < 0 || k[i] > n[i]) {
      throw std::invalid_argument("viterbi: bucket " + std::to_string(i) +
                                  " has k outside [0, n]");
    }
  }
}

}  // namespace detail

// Maximum-likelihood state path for the presence series, with the
// automaton starting in the low state (a virtual pre-observation step, so
// bucket 0 pays a transition). Ties resolve toward the low state.
inline std::vector<State> viterbi_states(std::span<const std::int64_t> n,
                                         std::span<const std::int64_t> k,
                                         const AutomatonParams& params) {
  params.validate();
  detail::check_series(n, k);
  const detail::EmissionLogs L(params);
  const std::size_t T = n.size();

  std::vector<unsigned char> from_high_lo(T, 0), from_high_hi(T, 0);
  double score_lo = L.stay + L.emit(State::low, n[0], k[0]);
  double score_hi = L.change + L.emit(State::high, n[0], k[0]);

  for (std::size_t i = 1; i < T; ++i) {
    const double to_lo_stay = score_lo + L.stay;
    const double to_lo_flip = score_hi + L.change;
    const double to_hi_flip = score_lo + L.change;
    const double to_hi_stay = score_hi + L.stay;
    // >= keeps the low-state predecessor on ties.
    const double best_lo =
        to_lo_stay >= to_lo_flip ? to_lo_stay : to_lo_flip;
    from_high_lo[i] = to_lo_stay >= to_lo_flip ? 0 : 1;
    const double best_hi =
        to_hi_flip >= to_hi_stay ? to_hi_flip : to_hi_stay;
    from_high_hi[i] = to_hi_flip >= to_hi_stay ? 0 : 1;
    score_lo = best_lo + L.emit(State::low, n[i], k[i]);
    score_hi = best_hi + L.emit(State::high, n[i], k[i]);
  }

  std::vector<State> path(T, State::low);
  State cur = score_lo >= score_hi ? State::low : State::high;
  path[T - 1] = cur;
  for (std::size_t i = T - 1; i > 0; --i) {
    const unsigned char from_high =
        cur == State::low ? from_high_lo[i] : from_high_hi[i];
    cur = from_high ? State::high : State::low;
    path[i - 1] = cur;
  }
  return path;
}

// Log-likelihood of a fixed state path (binomial coefficients omitted;
// they cancel in all path comparisons).
inline double path_log_likelihood(std::span<const std::int64_t> n,
                                  std::span<const std::int64_t> k,
                                  std::span<const State> path,
                                  const AutomatonParams& params) {
  params.validate();
  detail::check_series(n, k);
  if (path.size() != n.size()) {
    throw std::invalid_argument("path length does not match series");
  }
  const detail::EmissionLogs L(params);
  double ll = 0.0;
  State prev = State::low;
  for (std::size_t i = 0; i < n.size(); ++i) {
    ll += (path[i] == prev ? L.stay : L.change) + L.emit(path[i], n[i], k[i]);
    prev = path[i];
  }
  return ll;
}

// Log-likelihood difference between the path and the same path with
// buckets [s, e] flattened to the low state. [s, e] must be a maximal
// high-state run of the path; transition terms that change are included.
inline double burst_weight(std::span<const std::int64_t> n,
                           std::span<const std::int64_t> k,
                           std::span<const State> path, std::size_t s,
                           std::size_t e, const AutomatonParams& params) {
  params.validate();
  detail::check_series(n, k);
  const std::size_t T = n.size();
  if (path.size() != T || s > e || e >= T) {
    throw std::invalid_argument("burst_weight: bad interval");
  }
  for (std::size_t i = s; i <= e; ++i) {
    if (path[i] != State::high) {
      throw std::invalid_argument(
          "burst_weight: interval is not a high-state run");
    }
  }
  if ((s > 0 && path[s - 1] == State::high) ||
      (e + 1 < T && path[e + 1] == State::high)) {
    throw std::invalid_argument("burst_weight: run is not maximal");
  }
  const detail::EmissionLogs L(params);
  double w = 0.0;
  for (std::size_t i = s; i <= e; ++i) {
    w += L.emit(State::high, n[i], k[i]) - L.emit(State::low, n[i], k[i]);
  }
  // Flattening turns the entering flip into a stay, and the leaving flip
  // too when a successor bucket exists.
  w += L.change - L.stay;
  if (e + 1 < T) w += L.change - L.stay;
  return w;
}

// Highest-weight maximal high-state interval of the series, or nullopt if
// the path never leaves the low state. Ties break toward the earliest
// start.
inline std::optional<BurstInterval> extract_burst_from_series(
    std::span<const std::int64_t> n, std::span<const std::int64_t> k,
    const AutomatonParams& params) {
  const std::vector<State> path = viterbi_states(n, k, params);
  std::optional<BurstInterval> best;
  const std::size_t T = path.size();
  std::size_t i = 0;
  while (i < T) {
    if (path[i] != State::high) {
      ++i;
      continue;
    }
    std::size_t s = i;
    while (i < T && path[i] == State::high) ++i;
    const std::size_t e = i - 1;
    const double w = burst_weight(n, k, path, s, e, params);
    if (!best || w > best->weight) {
      BurstInterval b;
      b.start_bucket = static_cast<std::int64_t>(s);
      b.end_bucket = static_cast<std::int64_t>(e);
      b.weight = w;
      b.occurrences = 0;
      for (std::size_t j = s; j <= e; ++j) b.occurrences += k[j];
      b.alpha = params.alpha;
      best = std::move(b);
    }
  }
  return best;
}

// Per-word burst detection over the corpus. Words whose high-state rate
// c * alpha would reach 1 are skipped; they are the always-frequent words
// that stay in the low state anyway.
inline std::optional<BurstInterval> extract_bursts(const Corpus& corpus,
                                                   std::string_view word,
                                                   double c, double p) {
  const auto token = corpus.token_id(word);
  if (!token) return std::nullopt;
  const double alpha = corpus.word_alpha(*token);
  if (!(alpha > 0.0) || c * alpha >= 1.0) return std::nullopt;
  FrequencySeries series = corpus.word_frequency_series(*token);
  AutomatonParams params{p, c, alpha};
  auto burst =
      extract_burst_from_series(series.doc_counts, series.word_counts, params);
  if (burst) {
    burst->word = std::string(word);
    burst->token = *token;
  }
  return burst;
}

// Burst detection across the whole vocabulary; words are processed in
// token-id shards so the result is deterministic for any thread count.
inline std::vector<BurstInterval> detect_all_bursts(const Corpus& corpus,
                                                    double c, double p,
                                                    unsigned threads = 1) {
  const std::size_t vocab = corpus.vocabulary_size();
  std::vector<std::optional<BurstInterval>> slots(vocab);

  auto run_range = [&](std::size_t lo, std::size_t hi) {
    std::vector<std::int64_t> dense_k;
    for (std::size_t t = lo; t < hi; ++t) {
      const double alpha = corpus.word_alpha(static_cast<TokenId>(t));
      if (!(alpha > 0.0) || c * alpha >= 1.0) continue;
      dense_k.assign(corpus.bucket_doc_counts().size(), 0);
      for (const auto& [bucket, k] :
           corpus.word_bucket_counts(static_cast<TokenId>(t))) {
        dense_k[static_cast<std::size_t>(bucket)] = k;
      }
      AutomatonParams params{p, c, alpha};
      auto burst = extract_burst_from_series(corpus.bucket_doc_counts(),
                                             dense_k, params);
      if (burst) {
        burst->word = corpus.token_text()[t];
        burst->token = static_cast<TokenId>(t);
        slots[t] = std::move(burst);
      }
    }
  };

  if (threads <= 1 || vocab < 2) {
    run_range(0, vocab);
  } else {
    const unsigned workers =
        std::min<unsigned>(threads, static_cast<unsigned>(vocab));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (vocab + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(vocab, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  std::vector<BurstInterval> out;
  for (auto& slot : slots) {
    if (slot) out.push_back(std::move(*slot));
  }
  return out;
}

// Lower median; the empty case is the caller's problem.
inline std::int64_t lower_median(std::vector<std::int64_t> v) {
  const std::size_t mid = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid),
                   v.end());
  return v[mid];
}

struct CalibrationResult {
  double c = 0.0;
  bool satisfied = false;
  // One entry per grid value: median within-burst occurrences over the
  // words that burst at that multiplier, or nullopt when none did.
  std::vector<std::pair<double, std::optional<std::int64_t>>> medians;
};

// Selection rule: the largest grid value whose median meets the target;
// otherwise the smallest grid value, flagged unsatisfied.
inline CalibrationResult select_multiplier(
    std::vector<std::pair<double, std::optional<std::int64_t>>> medians,
    std::int64_t target) {
  CalibrationResult r;
  r.medians = std::move(medians);
  r.c = r.medians.front().first;
  r.satisfied = false;
  for (const auto& [c, median] : r.medians) {
    if (median && *median >= target) {
      r.c = c;
      r.satisfied = true;
    }
  }
  return r;
}

// Chooses c_D: the largest multiplier in the grid for which the median
// within-burst occurrence count over bursting words still reaches the
// target.
inline CalibrationResult calibrate_multiplier(const Corpus& corpus,
                                              const TrendFilterConfig& config,
                                              double p, unsigned threads = 1) {
  config.validate();
  if (corpus.vocabulary_size() == 0) {
    throw std::invalid_argument("calibrate: empty vocabulary");
  }
  const std::size_t vocab = corpus.vocabulary_size();
  const std::size_t grid_n = config.multiplier_grid.size();
  // occurrence slot per (grid value, word); -1 = no burst.
  std::vector<std::vector<std::int64_t>> occ(
      grid_n, std::vector<std::int64_t>(vocab, -1));

  auto run_range = [&](std::size_t lo, std::size_t hi) {
    std::vector<std::int64_t> dense_k;
    for (std::size_t t = lo; t < hi; ++t) {
      const double alpha = corpus.word_alpha(static_cast<TokenId>(t));
      if (!(alpha > 0.0)) continue;
      dense_k.assign(corpus.bucket_doc_counts().size(), 0);
      for (const auto& [bucket, k] :
           corpus.word_bucket_counts(static_cast<TokenId>(t))) {
        dense_k[static_cast<std::size_t>(bucket)] = k;
      }
      for (std::size_t gi = 0; gi < grid_n; ++gi) {
        const double c = config.multiplier_grid[gi];
        if (c * alpha >= 1.0) continue;
        AutomatonParams params{p, c, alpha};
        auto burst = extract_burst_from_series(corpus.bucket_doc_counts(),
                                               dense_k, params);
        if (burst) occ[gi][t] = burst->occurrences;
      }
    }
  };

  if (threads <= 1 || vocab < 2) {
    run_range(0, vocab);
  } else {
    const unsigned workers =
        std::min<unsigned>(threads, static_cast<unsigned>(vocab));
    std::vector<std::thread> pool;
    const std::size_t chunk = (vocab + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(vocab, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  std::vector<std::pair<double, std::optional<std::int64_t>>> medians;
  medians.reserve(grid_n);
  for (std::size_t gi = 0; gi < grid_n; ++gi) {
    std::vector<std::int64_t> bursting;
    for (std::int64_t o : occ[gi]) {
      if (o >= 0) bursting.push_back(o);
    }
    if (bursting.empty()) {
      medians.emplace_back(config.multiplier_grid[gi], std::nullopt);
    } else {
      medians.emplace_back(config.multiplier_grid[gi],
                           lower_median(std::move(bursting)));
    }
  }
  return select_multiplier(std::move(medians),
                           config.target_median_occurrences);
}

namespace detail {

// The word must occur at least once in every full window of
// `window` buckets, `quarters` windows on each side of the burst start;
// windows sticking out of the corpus range are ignored.
inline bool passes_longevity(const Corpus& corpus, TokenId token,
                             std::int64_t start,
                             const TrendFilterConfig& config) {
  const std::int64_t w = config.longevity_window;
  const std::int64_t last_bucket = corpus.bucket_count() - 1;
  for (int q = 1; q <= config.quarters_per_side; ++q) {
    const std::int64_t before_lo = start - q * w;
    const std::int64_t before_hi = start - (q - 1) * w - 1;
    if (before_lo >= 0 && before_hi <= last_bucket) {
      if (!corpus.word_occurs_in(token, before_lo, before_hi)) return false;
    }
    const std::int64_t after_lo = start + (q - 1) * w + 1;
    const std::int64_t after_hi = start + q * w;
    if (after_lo >= 0 && after_hi <= last_bucket) {
      if (!corpus.word_occurs_in(token, after_lo, after_hi)) return false;
    }
  }
  return true;
}

}  // namespace detail

// Applies the burst-length and longevity filters, then keeps the top_k
// survivors by descending weight (ties by word).
inline std::vector<BurstInterval> filter_and_rank(
    const Corpus& corpus, std::vector<BurstInterval> bursts,
    const TrendFilterConfig& config) {
  config.validate();
  std::erase_if(bursts, [&](const BurstInterval& b) {
    const std::int64_t len = b.end_bucket - b.start_bucket + 1;
    if (len < config.min_burst_len) return true;
    return !detail::passes_longevity(corpus, b.token, b.start_bucket, config);
  });
  std::sort(bursts.begin(), bursts.end(),
            [](const BurstInterval& a, const BurstInterval& b) {
              if (a.weight != b.weight) return a.weight > b.weight;
              return a.word < b.word;
            });
  if (bursts.size() > config.top_k) bursts.resize(config.top_k);
  return bursts;
}

}  // namespace trends
