#pragma once

#include <fstream>
#include <istream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "trends/corpus.hpp"
#include "trends/types.hpp"

namespace trends {

// Maps the canonical record fields onto the input's JSON field names.
struct RecordSchema {
  std::string id = "id";
  std::string authors = "authors";
  std::string timestamp = "timestamp";
  std::string text = "text";
  std::string producer = "producer";
  std::string kind = "kind";
};

namespace detail {

[[noreturn]] inline void record_error(std::size_t line_no,
                                      const std::string& what) {
  throw std::invalid_argument("ingest: record at line " +
                              std::to_string(line_no) + ": " + what);
}

inline RawRecord parse_record(const std::string& line,
                              const RecordSchema& schema,
                              std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    record_error(line_no, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) record_error(line_no, "not a JSON object");

  RawRecord r;
  if (!j.contains(schema.id)) {
    record_error(line_no, "missing field '" + schema.id + "'");
  }
  const auto& idv = j.at(schema.id);
  if (idv.is_string()) {
    r.id = idv.get<std::string>();
  } else if (idv.is_number_integer()) {
    r.id = std::to_string(idv.get<std::int64_t>());
  } else {
    record_error(line_no, "field '" + schema.id + "' is not a string");
  }

  if (!j.contains(schema.authors)) {
    record_error(line_no, "missing field '" + schema.authors + "' (doc_id \"" +
                              r.id + "\")");
  }
  const auto& av = j.at(schema.authors);
  if (av.is_string()) {
    r.authors.push_back(av.get<std::string>());
  } else if (av.is_array()) {
    for (const auto& a : av) {
      if (!a.is_string()) {
        record_error(line_no, "non-string author entry (doc_id \"" + r.id +
                                  "\")");
      }
      r.authors.push_back(a.get<std::string>());
    }
  } else {
    record_error(line_no, "field '" + schema.authors +
                              "' is neither string nor array (doc_id \"" +
                              r.id + "\")");
  }
  if (r.authors.empty()) {
    record_error(line_no, "empty author list (doc_id \"" + r.id + "\")");
  }

  if (!j.contains(schema.timestamp)) {
    record_error(line_no, "missing field '" + schema.timestamp +
                              "' (doc_id \"" + r.id + "\")");
  }
  const auto& tv = j.at(schema.timestamp);
  if (tv.is_number_integer()) {
    r.timestamp = tv.get<std::int64_t>();
  } else if (tv.is_string()) {
    auto ts = parse_timestamp(tv.get<std::string>());
    if (!ts) {
      record_error(line_no, "unparsable timestamp \"" +
                                tv.get<std::string>() + "\" (doc_id \"" +
                                r.id + "\")");
    }
    r.timestamp = *ts;
  } else {
    record_error(line_no, "field '" + schema.timestamp +
                              "' is neither integer nor string (doc_id \"" +
                              r.id + "\")");
  }

  if (!j.contains(schema.text)) {
    record_error(line_no, "missing field '" + schema.text + "' (doc_id \"" +
                              r.id + "\")");
  }
  if (!j.at(schema.text).is_string()) {
    record_error(line_no, "field '" + schema.text + "' is not a string"
                              " (doc_id \"" + r.id + "\")");
  }
  r.text = j.at(schema.text).get<std::string>();

  if (j.contains(schema.producer) && !j.at(schema.producer).is_null()) {
    const auto& pv = j.at(schema.producer);
    if (!pv.is_string()) {
      record_error(line_no, "field '" + schema.producer +
                                "' is not a string (doc_id \"" + r.id + "\")");
    }
    r.producer = pv.get<std::string>();
  }

  if (j.contains(schema.kind) && !j.at(schema.kind).is_null()) {
    const auto& kv = j.at(schema.kind);
    if (!kv.is_string()) {
      record_error(line_no, "field '" + schema.kind +
                                "' is not a string (doc_id \"" + r.id + "\")");
    }
    auto k = parse_kind(kv.get<std::string>());
    if (!k) {
      record_error(line_no, "unknown kind \"" + kv.get<std::string>() +
                                "\" (doc_id \"" + r.id + "\")");
    }
    r.kind = *k;
  }
  return r;
}

}  // namespace detail

inline std::vector<RawRecord> read_jsonl(std::istream& in,
                                         const RecordSchema& schema) {
  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    records.push_back(detail::parse_record(line, schema, line_no));
  }
  return records;
}

inline Corpus ingest(std::istream& in, const RecordSchema& schema,
                     const TokenizerConfig& tokenizer, Granularity g,
                     std::int64_t epoch) {
  return Corpus::build(read_jsonl(in, schema), tokenizer, g, epoch);
}

inline Corpus ingest_file(const std::string& path, const RecordSchema& schema,
                          const TokenizerConfig& tokenizer, Granularity g,
                          std::int64_t epoch) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("ingest: cannot open input file " + path);
  }
  return ingest(in, schema, tokenizer, g, epoch);
}

// Plain-text stopword list, one word per line; lines are normalized to
// lowercase and blank lines skipped.
inline std::unordered_set<std::string> load_stopwords(std::istream& in) {
  std::unordered_set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n' ||
                             line.back() == ' ' || line.back() == '\t')) {
      line.pop_back();
    }
    std::size_t b = 0;
    while (b < line.size() && (line[b] == ' ' || line[b] == '\t')) ++b;
    std::string w = line.substr(b);
    if (w.empty()) continue;
    for (auto& ch : w) {
      ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    out.insert(std::move(w));
  }
  return out;
}

inline std::unordered_set<std::string> load_stopwords_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open stopword list " + path);
  }
  return load_stopwords(in);
}

}  // namespace trends
