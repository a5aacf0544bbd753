#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace trends {

// Time-bucket granularity of a corpus. Week buckets are epoch-anchored
// 604800-second spans; month/year buckets are calendar offsets.
enum class Granularity { week, month, year };

enum class DocKind { post, comment, other };

inline const char* to_string(Granularity g) {
  switch (g) {
    case Granularity::week: return "week";
    case Granularity::month: return "month";
    case Granularity::year: return "year";
  }
  return "?";
}

inline const char* to_string(DocKind k) {
  switch (k) {
    case DocKind::post: return "post";
    case DocKind::comment: return "comment";
    case DocKind::other: return "other";
  }
  return "?";
}

inline std::optional<Granularity> parse_granularity(const std::string& s) {
  if (s == "week") return Granularity::week;
  if (s == "month") return Granularity::month;
  if (s == "year") return Granularity::year;
  return std::nullopt;
}

inline std::optional<DocKind> parse_kind(const std::string& s) {
  if (s == "post") return DocKind::post;
  if (s == "comment") return DocKind::comment;
  if (s == "other") return DocKind::other;
  return std::nullopt;
}

// One input record before tokenization. Timestamps are seconds since the
// Unix epoch (UTC).
struct RawRecord {
  std::string id;
  std::vector<std::string> authors;
  std::int64_t timestamp = 0;
  std::string text;
  std::optional<std::string> producer;
  std::optional<DocKind> kind;
};

constexpr std::int64_t kSecondsPerWeek = 604800;
constexpr std::int64_t kSecondsPerDay = 86400;

namespace detail {

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

struct CivilDate {
  int year;
  unsigned month;  // 1..12
  unsigned day;    // 1..31
};

inline CivilDate civil_from_timestamp(std::int64_t ts) {
  using namespace std::chrono;
  const sys_days d{days{floor_div(ts, kSecondsPerDay)}};
  const year_month_day ymd{d};
  return CivilDate{static_cast<int>(ymd.year()),
                   static_cast<unsigned>(ymd.month()),
                   static_cast<unsigned>(ymd.day())};
}

}  // namespace detail

// Bucket index of `timestamp` relative to `epoch` (the timestamp of bucket
// 0). Week mode divides elapsed seconds into whole weeks; month and year
// modes count calendar offsets from the epoch's month/year.
inline std::int64_t time_bucket(std::int64_t timestamp, Granularity g,
                                std::int64_t epoch) {
  if (timestamp < epoch) {
    throw std::invalid_argument(
        "time_bucket: timestamp " + std::to_string(timestamp) +
        " precedes corpus epoch " + std::to_string(epoch));
  }
  switch (g) {
    case Granularity::week:
      return (timestamp - epoch) / kSecondsPerWeek;
    case Granularity::month: {
      const auto a = detail::civil_from_timestamp(epoch);
      const auto b = detail::civil_from_timestamp(timestamp);
      return (static_cast<std::int64_t>(b.year) - a.year) * 12 +
             (static_cast<int>(b.month) - static_cast<int>(a.month));
    }
    case Granularity::year: {
      const auto a = detail::civil_from_timestamp(epoch);
      const auto b = detail::civil_from_timestamp(timestamp);
      return static_cast<std::int64_t>(b.year) - a.year;
    }
  }
  throw std::logic_error("time_bucket: bad granularity");
}

// Accepts integer epoch-seconds, "YYYY-MM-DD", or
// "YYYY-MM-DDTHH:MM:SS[Z]" (UTC). Returns nullopt on anything else.
inline std::optional<std::int64_t> parse_timestamp(const std::string& s) {
  if (s.empty()) return std::nullopt;

  bool numeric = true;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char ch = s[i];
    if (i == 0 && (ch == '-' || ch == '+')) continue;
    if (ch < '0' || ch > '9') {
      numeric = false;
      break;
    }
  }
  if (numeric && !(s.size() == 1 && (s[0] == '-' || s[0] == '+'))) {
    try {
      return std::stoll(s);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }

  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  char sep = 0, tail = 0;
  int n = std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%d%c", &y, &mo, &d, &sep,
                      &h, &mi, &sec, &tail);
  if (n == 3) {
    h = mi = sec = 0;
  } else if (n == 7 || n == 8) {
    if (sep != 'T' && sep != ' ') return std::nullopt;
    if (n == 8 && tail != 'Z') return std::nullopt;
  } else {
    return std::nullopt;
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  if (h < 0 || h > 23 || mi < 0 || mi > 59 || sec < 0 || sec > 60)
    return std::nullopt;
  const sys_days sd{ymd};
  return sd.time_since_epoch().count() * kSecondsPerDay + h * 3600 +
         mi * 60 + sec;
}

}  // namespace trends
